#pragma once

// Independent reference implementations used only by the test suite.
// Nothing here shares code with the library paths under test.

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace oracle {

// Double-exponential (tanh-sinh) quadrature over (a, b). Handles integrable
// endpoint singularities. The integrand is called as f(x, from_a, from_b)
// where the offsets from either endpoint are computed without cancellation;
// singular factors must be built from those offsets, never from x itself.
template <class F>
double tanh_sinh(F&& f, double a, double b, double rel_tol = 1e-13) {
    const double half = 0.5 * (b - a);
    const double pi_half = 1.5707963267948966;
    const double u_max = 6.2;

    auto level_sum = [&](double h) {
        double s = 0.0, comp = 0.0;
        const long kmax = static_cast<long>(u_max / h);
        for (long k = -kmax; k <= kmax; ++k) {
            const double u = static_cast<double>(k) * h;
            const double z = pi_half * std::sinh(u);
            const double az = std::abs(z);
            if (az > 350.0) continue;  // weight underflows
            const double ch = std::cosh(z);
            const double w = pi_half * std::cosh(u) / (ch * ch);
            const double dist = (b - a) / (1.0 + std::exp(2.0 * az));
            if (!(dist > 0.0)) continue;
            const double far = (b - a) - dist;
            const double term = (k >= 0) ? w * f(b - dist, far, dist)  //
                                         : w * f(a + dist, dist, far);
            const double y = term - comp;
            const double t = s + y;
            comp = (t - s) - y;
            s = t;
        }
        return half * h * s;
    };

    double prev = level_sum(1.0);
    for (int level = 1; level <= 12; ++level) {
        const double cur = level_sum(std::pow(0.5, level));
        if (std::abs(cur - prev) <= rel_tol * std::max(std::abs(cur), 1e-300) && level >= 3)
            return cur;
        prev = cur;
    }
    return prev;
}

// Caputo derivative of order mu in (0,2] at t, from the m-th derivative of
// the function (m = ceil(mu)):  1/Gamma(m-mu) * int_0^t g_m(s) (t-s)^{m-1-mu} ds.
// Integration runs over r = t - s so the kernel singularity sits at the left
// endpoint; g_m receives s as an exact offset from the right one.
inline double caputo_quadrature(const std::function<double(double)>& g_m, double mu, double t) {
    if (mu == 1.0 || mu == 2.0) return g_m(t);  // classical limits
    const double m = std::ceil(mu);
    const double sigma = m - 1.0 - mu;  // in (-1, 0)
    const double scale = 1.0 / std::tgamma(m - mu);
    return scale * tanh_sinh(
                       [&](double /*r*/, double from_a, double from_b) {
                           return g_m(from_b) * std::pow(from_a, sigma);
                       },
                       0.0, t);
}

// Dense Gaussian elimination with partial pivoting; A row-major n x n.
inline std::vector<double> dense_solve(std::vector<double> A, std::vector<double> rhs) {
    const std::size_t n = rhs.size();
    if (A.size() != n * n) throw std::invalid_argument("dense_solve: shape mismatch");
    std::vector<std::size_t> piv(n);
    for (std::size_t i = 0; i < n; ++i) piv[i] = i;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t best = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(A[r * n + col]) > std::abs(A[best * n + col])) best = r;
        if (A[best * n + col] == 0.0) throw std::runtime_error("dense_solve: singular matrix");
        if (best != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(A[best * n + c], A[col * n + c]);
            std::swap(rhs[best], rhs[col]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const double m = A[r * n + col] / A[col * n + col];
            if (m == 0.0) continue;
            A[r * n + col] = 0.0;
            for (std::size_t c = col + 1; c < n; ++c) A[r * n + c] -= m * A[col * n + c];
            rhs[r] -= m * rhs[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t ri = n; ri-- > 0;) {
        double s = rhs[ri];
        for (std::size_t c = ri + 1; c < n; ++c) s -= A[ri * n + c] * x[c];
        x[ri] = s / A[ri * n + ri];
    }
    return x;
}

inline std::vector<double> dense_matvec(const std::vector<double>& A,
                                        const std::vector<double>& x) {
    const std::size_t n = x.size();
    const std::size_t rows = A.size() / n;
    std::vector<double> y(rows, 0.0);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < n; ++c) y[r] += A[r * n + c] * x[c];
    return y;
}

}  // namespace oracle
