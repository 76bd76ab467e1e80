#pragma once

#include <fftw3.h>

#include <cstddef>
#include <mutex>
#include <span>

namespace fracwave::detail {

// FFTW plan creation/destruction is not thread-safe; execution on distinct
// buffers is. All planning goes through this mutex.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

/// Smallest 5-smooth (2^a 3^b 5^c) integer >= n.
inline std::size_t next_fast_len(std::size_t n) {
    if (n <= 1) return 1;
    for (std::size_t c = n;; ++c) {
        std::size_t r = c;
        while (r % 2 == 0) r /= 2;
        while (r % 3 == 0) r /= 3;
        while (r % 5 == 0) r /= 5;
        if (r == 1) return c;
    }
}

/// One fixed-length real<->complex FFT context with its own aligned buffers.
/// Plans use FFTW_ESTIMATE only, so planning is deterministic and cheap.
/// The inverse transform is unnormalized (scale by 1/size()).
class RealFft {
public:
    explicit RealFft(std::size_t n)
        : n_(n),
          real_(fftw_alloc_real(n)),
          cplx_(fftw_alloc_complex(n / 2 + 1)) {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        fwd_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), real_, cplx_, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_c2r_1d(static_cast<int>(n), cplx_, real_, FFTW_ESTIMATE);
    }
    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;
    ~RealFft() {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
        fftw_free(real_);
        fftw_free(cplx_);
    }

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] std::size_t spectrum_size() const noexcept { return n_ / 2 + 1; }
    [[nodiscard]] std::span<double> real() noexcept { return {real_, n_}; }
    /// Interleaved (re, im) view of the complex buffer.
    [[nodiscard]] std::span<double> spectrum() noexcept {
        return {reinterpret_cast<double*>(cplx_), 2 * spectrum_size()};
    }

    void forward() noexcept { fftw_execute(fwd_); }
    void backward() noexcept { fftw_execute(bwd_); }

private:
    std::size_t n_;
    double* real_;
    fftw_complex* cplx_;
    fftw_plan fwd_;
    fftw_plan bwd_;
};

}  // namespace fracwave::detail
