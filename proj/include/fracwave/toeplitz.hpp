#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <stdexcept>
#include <vector>

#include "fracwave/fft.hpp"

namespace fracwave {

struct singular_matrix_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Tridiagonal Toeplitz matrix tridiag(sub, diag, super) of a given size.
struct TriDiagToeplitz {
    double sub;
    double diag;
    double super;
    std::size_t size;
};

/// Eigenvalues of a TriDiagToeplitz together with the similarity transform:
/// for the symmetric case the transform is the orthonormal sine matrix
/// Q_{ij} = sqrt(2/M) sin(i j pi / M), M = size + 1, which is its own inverse.
struct SineSpectrum {
    std::size_t size;
    std::vector<double> eigenvalues;
};

/// lambda_i = diag + 2 sub sqrt(super/sub) cos(i pi / (size+1)), i = 1..size.
/// Requires sub*super > 0 (real spectrum) or sub == super (covers 0).
inline SineSpectrum sine_spectrum(const TriDiagToeplitz& t) {
    if (t.size == 0) throw std::invalid_argument("sine_spectrum: size must be >= 1");
    if (!(t.sub * t.super > 0.0) && t.sub != t.super)
        throw std::domain_error("sine_spectrum: complex spectrum (sub*super <= 0)");
    const double pi = 3.14159265358979323846;
    const double m = static_cast<double>(t.size + 1);
    const double amp = (t.sub == t.super) ? 2.0 * t.sub
                                          : 2.0 * t.sub * std::sqrt(t.super / t.sub);
    SineSpectrum s{t.size, std::vector<double>(t.size)};
    for (std::size_t i = 1; i <= t.size; ++i)
        s.eigenvalues[i - 1] = t.diag + amp * std::cos(static_cast<double>(i) * pi / m);
    return s;
}

/// Orthonormal DST-I of fixed size m: (Qv)_i = sqrt(2/M) sum_j sin(ij pi/M) v_j
/// with M = m + 1. Small sizes multiply by a dense matrix; larger ones go
/// through FFTW's RODFT00 (logical FFT of length 2M with odd extension).
/// Involutive: applying twice returns the input.
class SineTransformPlan {
public:
    enum class Method { automatic, dense, fft };
    static constexpr std::size_t kDenseThreshold = 64;

    explicit SineTransformPlan(std::size_t m, Method method = Method::automatic)
        : m_(m) {
        if (m == 0) throw std::invalid_argument("SineTransformPlan: size must be >= 1");
        if (method == Method::automatic)
            method = (m < kDenseThreshold) ? Method::dense : Method::fft;
        dense_ = (method == Method::dense);
        const double pi = 3.14159265358979323846;
        const double big_m = static_cast<double>(m + 1);
        scale_ = std::sqrt(2.0 / big_m);
        if (dense_) {
            q_.resize(m * m);
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < m; ++j)
                    q_[i * m + j] = scale_ * std::sin(static_cast<double>((i + 1) * (j + 1)) *
                                                      pi / big_m);
            scratch_.resize(m);
        } else {
            buf_ = fftw_alloc_real(m);
            std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
            plan_ = fftw_plan_r2r_1d(static_cast<int>(m), buf_, buf_, FFTW_RODFT00,
                                     FFTW_ESTIMATE);
        }
    }
    SineTransformPlan(const SineTransformPlan&) = delete;
    SineTransformPlan& operator=(const SineTransformPlan&) = delete;
    ~SineTransformPlan() {
        if (!dense_) {
            std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
            fftw_destroy_plan(plan_);
            fftw_free(buf_);
        }
    }

    [[nodiscard]] std::size_t size() const noexcept { return m_; }

    void apply(std::span<const double> in, std::span<double> out) {
        if (in.size() != m_ || out.size() != m_)
            throw std::invalid_argument("SineTransformPlan: length mismatch");
        if (dense_) {
            for (std::size_t i = 0; i < m_; ++i) {
                double s = 0.0;
                const double* row = q_.data() + i * m_;
                for (std::size_t j = 0; j < m_; ++j) s += row[j] * in[j];
                scratch_[i] = s;
            }
            std::copy(scratch_.begin(), scratch_.end(), out.begin());
        } else {
            std::copy(in.begin(), in.end(), buf_);
            fftw_execute(plan_);  // RODFT00 output is 2x the sine sum
            const double half_scale = 0.5 * scale_;
            for (std::size_t i = 0; i < m_; ++i) out[i] = half_scale * buf_[i];
        }
    }

    void apply_inplace(std::span<double> v) { apply(v, v); }

private:
    std::size_t m_;
    bool dense_;
    double scale_;
    std::vector<double> q_;
    std::vector<double> scratch_;
    double* buf_ = nullptr;
    fftw_plan plan_ = nullptr;
};

/// One-shot orthonormal DST-I of v (size M-1 for mesh parameter M).
inline std::vector<double> apply_sine_transform(std::span<const double> v) {
    SineTransformPlan plan(v.size());
    std::vector<double> out(v.size());
    plan.apply(v, out);
    return out;
}

/// y = T x for the (rows x cols) Toeplitz matrix with the given first column
/// and first row, via circulant embedding and FFT. Requires
/// first_col[0] == first_row[0].
inline std::vector<double> toeplitz_matvec(std::span<const double> first_col,
                                           std::span<const double> first_row,
                                           std::span<const double> x) {
    const std::size_t rows = first_col.size();
    const std::size_t cols = first_row.size();
    if (rows == 0 || cols == 0)
        throw std::invalid_argument("toeplitz_matvec: empty generator");
    if (x.size() != cols) throw std::invalid_argument("toeplitz_matvec: size mismatch");
    if (first_col[0] != first_row[0])
        throw std::domain_error("toeplitz_matvec: corner entries disagree");

    const std::size_t len = detail::next_fast_len(rows + cols - 1);
    detail::RealFft fft(len);

    auto real = fft.real();
    std::fill(real.begin(), real.end(), 0.0);
    for (std::size_t k = 0; k < rows; ++k) real[k] = first_col[k];
    for (std::size_t k = 1; k < cols; ++k) real[len - k] = first_row[k];
    fft.forward();
    std::vector<double> gen(fft.spectrum().begin(), fft.spectrum().end());

    std::fill(real.begin(), real.end(), 0.0);
    std::copy(x.begin(), x.end(), real.begin());
    fft.forward();
    auto spec = fft.spectrum();
    const double inv_len = 1.0 / static_cast<double>(len);
    for (std::size_t k = 0; k < fft.spectrum_size(); ++k) {
        const double re = spec[2 * k] * gen[2 * k] - spec[2 * k + 1] * gen[2 * k + 1];
        const double im = spec[2 * k] * gen[2 * k + 1] + spec[2 * k + 1] * gen[2 * k];
        spec[2 * k] = re * inv_len;
        spec[2 * k + 1] = im * inv_len;
    }
    fft.backward();
    return {real.begin(), real.begin() + static_cast<std::ptrdiff_t>(rows)};
}

/// Reference O(N^2) solve of the lower-triangular Toeplitz system whose first
/// column is `col`; the oracle for the divide-and-conquer path.
inline std::vector<double> forward_substitution(std::span<const double> col,
                                                std::span<const double> rhs) {
    const std::size_t n = col.size();
    if (rhs.size() != n) throw std::invalid_argument("forward_substitution: size mismatch");
    if (n == 0) return {};
    if (col[0] == 0.0) throw singular_matrix_error("forward_substitution: zero diagonal");
    std::vector<double> y(n);
    const double inv_d = 1.0 / col[0];
    for (std::size_t r = 0; r < n; ++r) {
        double s = rhs[r];
        for (std::size_t k = 0; k < r; ++k) s -= col[r - k] * y[k];
        y[r] = s * inv_d;
    }
    return y;
}

/// Circulant spectra of every off-diagonal block met when the divide-and-
/// conquer recursion runs on a size-n system with the given strictly-lower
/// generator tail (t_1..t_{n-1}). The diagonal entry is not involved, so one
/// cache serves every system that shares the tail, whatever its diagonal.
class ToeplitzSpectraCache {
public:
    struct Entry {
        std::size_t len;           // embedding length (5-smooth)
        std::vector<double> spec;  // interleaved (re, im), pre-scaled by 1/len
    };

    ToeplitzSpectraCache(std::span<const double> tail, std::size_t n,
                         std::size_t base = 32)
        : tail_(tail.begin(), tail.end()), n_(n), base_(std::max<std::size_t>(base, 1)) {
        if (n == 0) throw std::invalid_argument("ToeplitzSpectraCache: empty system");
        if (tail_.size() + 1 < n)
            throw std::invalid_argument("ToeplitzSpectraCache: tail too short");
        std::set<std::size_t> sizes;
        gather(n, sizes);
        for (const std::size_t m : sizes) build(m);
    }

    [[nodiscard]] std::size_t n() const noexcept { return n_; }
    [[nodiscard]] std::size_t base() const noexcept { return base_; }
    [[nodiscard]] std::span<const double> tail() const noexcept { return tail_; }
    [[nodiscard]] const Entry& at(std::size_t m) const { return entries_.at(m); }

private:
    void gather(std::size_t m, std::set<std::size_t>& sizes) const {
        if (m <= base_) return;
        sizes.insert(m);
        gather((m + 1) / 2, sizes);
        gather(m / 2, sizes);
    }

    // Block C for the split m = m1 + m2 (m1 = ceil) is the m2 x m1 Toeplitz
    // with entries C_{r,c} = t_{m1+r-c}; its circulant generator is the
    // contiguous tail slice t_1..t_{m-1} laid out around the wrap point.
    void build(std::size_t m) {
        const std::size_t m1 = (m + 1) / 2;
        const std::size_t m2 = m / 2;
        const std::size_t len = detail::next_fast_len(m - 1);
        detail::RealFft fft(len);
        auto real = fft.real();
        std::fill(real.begin(), real.end(), 0.0);
        for (std::size_t j = 0; j < m2; ++j) real[j] = tail_[m1 - 1 + j];       // t_{m1+j}
        for (std::size_t k = 1; k < m1; ++k) real[len - k] = tail_[m1 - 1 - k];  // t_{m1-k}
        fft.forward();
        auto spec = fft.spectrum();
        const double inv_len = 1.0 / static_cast<double>(len);
        Entry e{len, std::vector<double>(spec.size())};
        for (std::size_t k = 0; k < spec.size(); ++k) e.spec[k] = spec[k] * inv_len;
        entries_.emplace(m, std::move(e));
    }

    std::vector<double> tail_;
    std::size_t n_;
    std::size_t base_;
    std::map<std::size_t, Entry> entries_;
};

/// Divide-and-conquer solver for lower-triangular Toeplitz systems sharing
/// one spectra cache. Each instance owns its FFT scratch, so independent
/// instances may run concurrently against the same cache.
class TriangularToeplitzSolver {
public:
    explicit TriangularToeplitzSolver(const ToeplitzSpectraCache& cache) : cache_(cache) {}

    /// Solves in place: g holds the right-hand side on entry, the solution on
    /// exit. `diag` is t_0; the strictly-lower part comes from the cache tail.
    void solve(double diag, std::span<double> g) {
        if (g.size() != cache_.n())
            throw std::invalid_argument("TriangularToeplitzSolver: rhs length mismatch");
        if (diag == 0.0) throw singular_matrix_error("TriangularToeplitzSolver: zero diagonal");
        diag_ = diag;
        inv_diag_ = 1.0 / diag;
        recurse(g);
    }

private:
    void recurse(std::span<double> g) {
        const std::size_t m = g.size();
        if (m <= cache_.base()) {
            const auto tail = cache_.tail();
            for (std::size_t r = 0; r < m; ++r) {
                double s = g[r];
                for (std::size_t k = 0; k < r; ++k) s -= tail[r - k - 1] * g[k];
                g[r] = s * inv_diag_;
            }
            return;
        }
        const std::size_t m1 = (m + 1) / 2;
        recurse(g.first(m1));
        subtract_block(m, g);
        recurse(g.subspan(m1));
    }

    // g[m1..m) -= C * g[0..m1) with C applied through its cached spectrum.
    void subtract_block(std::size_t m, std::span<double> g) {
        const std::size_t m1 = (m + 1) / 2;
        const std::size_t m2 = m / 2;
        const auto& entry = cache_.at(m);
        detail::RealFft& fft = context(entry.len);
        auto real = fft.real();
        std::fill(real.begin() + static_cast<std::ptrdiff_t>(m1), real.end(), 0.0);
        std::copy(g.begin(), g.begin() + static_cast<std::ptrdiff_t>(m1), real.begin());
        fft.forward();
        auto spec = fft.spectrum();
        for (std::size_t k = 0; k < fft.spectrum_size(); ++k) {
            const double re =
                spec[2 * k] * entry.spec[2 * k] - spec[2 * k + 1] * entry.spec[2 * k + 1];
            const double im =
                spec[2 * k] * entry.spec[2 * k + 1] + spec[2 * k + 1] * entry.spec[2 * k];
            spec[2 * k] = re;
            spec[2 * k + 1] = im;
        }
        fft.backward();
        for (std::size_t r = 0; r < m2; ++r) g[m1 + r] -= real[r];
    }

    detail::RealFft& context(std::size_t len) {
        auto it = ffts_.find(len);
        if (it == ffts_.end())
            it = ffts_.emplace(len, std::make_unique<detail::RealFft>(len)).first;
        return *it->second;
    }

    const ToeplitzSpectraCache& cache_;
    std::map<std::size_t, std::unique_ptr<detail::RealFft>> ffts_;
    double diag_ = 1.0;
    double inv_diag_ = 1.0;
};

/// One-shot divide-and-conquer solve of the system with first column `col`.
inline std::vector<double> solve_lower_tri_toeplitz(std::span<const double> col,
                                                    std::span<const double> rhs) {
    const std::size_t n = col.size();
    if (rhs.size() != n) throw std::invalid_argument("solve_lower_tri_toeplitz: size mismatch");
    if (n == 0) return {};
    if (col[0] == 0.0)
        throw singular_matrix_error("solve_lower_tri_toeplitz: zero diagonal");
    std::vector<double> y(rhs.begin(), rhs.end());
    ToeplitzSpectraCache cache(col.subspan(1), n);
    TriangularToeplitzSolver solver(cache);
    solver.solve(col[0], y);
    return y;
}

}  // namespace fracwave
