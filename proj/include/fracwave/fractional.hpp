#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fracwave {

/// Compensated (Kahan) accumulator. Used wherever long weighted histories
/// are summed so that results stay reproducible across optimization levels.
class KahanSum {
public:
    void add(double x) noexcept {
        const double y = x - c_;
        const double t = s_ + y;
        c_ = (t - s_) - y;
        s_ = t;
    }
    [[nodiscard]] double value() const noexcept { return s_; }

private:
    double s_ = 0.0;
    double c_ = 0.0;
};

/// A temporal differentiation order in (0, 2].
///
/// Orders in (0, 1] select the sub-diffusion kernel (L1), orders in (1, 2]
/// the diffusion-wave kernel (modified L2). The boundary value 1 is treated
/// by the sub-diffusion branch; 2 degenerates to the classical second
/// difference.
class FractionalOrder {
public:
    explicit FractionalOrder(double v) : v_(v) {
        if (!std::isfinite(v) || !(v > 0.0) || v > 2.0)
            throw std::domain_error("FractionalOrder: order must lie in (0, 2], got " +
                                    std::to_string(v));
    }
    [[nodiscard]] double value() const noexcept { return v_; }
    [[nodiscard]] bool is_sub() const noexcept { return v_ <= 1.0; }
    [[nodiscard]] bool is_wave() const noexcept { return v_ > 1.0; }

private:
    double v_;
};

enum class KernelKind { l1, l2 };

/// Convolution weights of a discrete fractional-derivative kernel.
/// `values[k]` holds a_k (L1) or b_k (L2); both families are positive,
/// strictly decreasing and convex in k.
struct CoefficientTable {
    FractionalOrder order;
    KernelKind kind;
    std::vector<double> values;
};

/// Values v^0..v^n sampled on a uniform time grid with step tau.
struct TimeSequence {
    std::span<const double> values;
    double tau;
};

namespace detail {

// k^s for k = 0..n-1 computed as exp(s*log k). A shared log table makes bulk
// generation cheap when many tables of different order are assembled over the
// same grid (distributed-order runs).
inline const double* log_table(std::size_t n) {
    thread_local std::vector<double> logs{0.0};
    if (logs.size() < n) {
        const std::size_t old = logs.size();
        logs.resize(n);
        for (std::size_t k = old; k < n; ++k)
            logs[k] = std::log(static_cast<double>(k));
    }
    return logs.data();
}

// Weights d_k = [(k+1)^s - k^s] / Gamma(1+s) for s in [0, 1).
//
// The difference is evaluated as k^s * expm1(s * log1p(1/k)), which avoids
// the catastrophic cancellation of the naive two-power form once k is large
// (relative error stays at a few ulp even for k ~ 1e6).
inline std::vector<double> power_difference_table(double s, std::size_t n) {
    std::vector<double> d(n);
    const double inv_gamma = 1.0 / std::tgamma(1.0 + s);
    d[0] = inv_gamma;
    if (s == 0.0) {  // order exactly 1 (L1) or 2 (L2): classical limit
        for (std::size_t k = 1; k < n; ++k) d[k] = 0.0;
        return d;
    }
    const double* logs = log_table(n);
    for (std::size_t k = 1; k < n; ++k) {
        const double kd = static_cast<double>(k);
        const double pow_ks = std::exp(s * logs[k]);
        d[k] = pow_ks * std::expm1(s * std::log1p(1.0 / kd)) * inv_gamma;
    }
    return d;
}

inline void require_steps(std::size_t n) {
    if (n == 0) throw std::invalid_argument("coefficient table needs at least one entry");
}

}  // namespace detail

/// L1 weights a_k = [(k+1)^{1-alpha} - k^{1-alpha}] / Gamma(2-alpha),
/// k = 0..n-1, for alpha in (0, 1].
inline CoefficientTable l1_coefficients(FractionalOrder alpha, std::size_t n) {
    if (!alpha.is_sub())
        throw std::domain_error("l1_coefficients: order must lie in (0, 1]");
    detail::require_steps(n);
    return {alpha, KernelKind::l1,
            detail::power_difference_table(1.0 - alpha.value(), n)};
}

/// Modified-L2 weights b_k = [(k+1)^{2-beta} - k^{2-beta}] / Gamma(3-beta),
/// k = 0..n-1, for beta in (1, 2]. Identical to the L1 table at order beta-1.
inline CoefficientTable l2_coefficients(FractionalOrder beta, std::size_t n) {
    if (!beta.is_wave())
        throw std::domain_error("l2_coefficients: order must lie in (1, 2]");
    detail::require_steps(n);
    return {beta, KernelKind::l2,
            detail::power_difference_table(2.0 - beta.value(), n)};
}

/// Discrete Caputo derivative of order alpha in (0, 1] at the last sample:
///
///   tau^{-alpha} [ a_0 v^n - sum_{k=1}^{n-1} (a_{n-k-1} - a_{n-k}) v^k
///                  - a_{n-1} v^0 ].
///
/// Evaluated in the equivalent form with v^k - v^0 increments (the weights
/// sum to zero), so constant sequences give exactly zero. History is
/// accumulated oldest-first with compensation.
inline double apply_l1(const TimeSequence& seq, FractionalOrder alpha) {
    if (seq.values.size() < 2)
        throw std::invalid_argument("apply_l1: need at least v^0 and v^1");
    if (!(seq.tau > 0.0)) throw std::invalid_argument("apply_l1: tau must be positive");
    if (!alpha.is_sub()) throw std::domain_error("apply_l1: order must lie in (0, 1]");

    const std::size_t n = seq.values.size() - 1;
    const auto a = l1_coefficients(alpha, n).values;
    const double v0 = seq.values[0];
    KahanSum acc;
    for (std::size_t k = 1; k < n; ++k)  // oldest to newest
        acc.add(-(a[n - k - 1] - a[n - k]) * (seq.values[k] - v0));
    acc.add(a[0] * (seq.values[n] - v0));
    return acc.value() * std::pow(seq.tau, -alpha.value());
}

/// Discrete Caputo derivative of order beta in (1, 2] at the last sample,
/// including the initial-velocity correction:
///
///   tau^{-beta} [ sum_{k=2}^{n} b_{n-k} (v^k - 2v^{k-1} + v^{k-2})
///                 + 2 b_{n-1} (v^1 - v^0 - tau * v_prime_0) ].
///
/// Second differences are formed as differences of first differences and the
/// velocity term is folded inside the bracket, so sequences sampled from
/// linear functions (with matching v_prime_0) give exactly zero.
inline double apply_l2(const TimeSequence& seq, FractionalOrder beta, double v_prime_0) {
    if (seq.values.size() < 2)
        throw std::invalid_argument("apply_l2: need at least v^0 and v^1");
    if (!(seq.tau > 0.0)) throw std::invalid_argument("apply_l2: tau must be positive");
    if (!beta.is_wave()) throw std::domain_error("apply_l2: order must lie in (1, 2]");

    const std::size_t n = seq.values.size() - 1;
    const auto b = l2_coefficients(beta, n).values;
    const auto& v = seq.values;
    KahanSum acc;
    for (std::size_t k = 2; k <= n; ++k)  // oldest to newest
        acc.add(b[n - k] * ((v[k] - v[k - 1]) - (v[k - 1] - v[k - 2])));
    acc.add(2.0 * b[n - 1] * (v[1] - v[0] - seq.tau * v_prime_0));
    return acc.value() * std::pow(seq.tau, -beta.value());
}

/// Caputo derivative of t^p (p >= 0) of order mu in (0, 2] at t > 0:
///
///   Gamma(p+1) / Gamma(p+1-mu) * t^{p-mu},
///
/// and exactly zero when p is an integer with p <= ceil(mu) - 1 (the
/// derivative annihilates such monomials). For mu in (1, 2] a non-integer
/// p < 1 is rejected: t^p then has no integrable second derivative at 0.
inline double caputo_monomial(double p, FractionalOrder mu, double t) {
    if (!std::isfinite(p) || p < 0.0)
        throw std::domain_error("caputo_monomial: exponent must be >= 0");
    if (!(t > 0.0)) throw std::domain_error("caputo_monomial: t must be positive");

    const bool integer_p = std::floor(p) == p;
    const double annihilated = std::ceil(mu.value()) - 1.0;
    if (integer_p && p <= annihilated) return 0.0;
    if (mu.is_wave() && !integer_p && p < 1.0)
        throw std::domain_error(
            "caputo_monomial: order in (1,2] needs p in {0,1} or p > 1");

    return std::tgamma(p + 1.0) / std::tgamma(p + 1.0 - mu.value()) *
           std::pow(t, p - mu.value());
}

}  // namespace fracwave
