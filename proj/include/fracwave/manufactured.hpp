#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "fracwave/distributed.hpp"
#include "fracwave/fractional.hpp"
#include "fracwave/problem.hpp"

namespace fracwave {

/// A problem whose source was derived symbolically from a chosen exact
/// solution, so discretization error can be measured directly. Sources are
/// only valid for t > 0 (they are sampled at t_n >= tau).
struct ManufacturedProblem1D {
    Problem1D problem;
    SpaceTimeFn exact;
};

struct ManufacturedProblem2D {
    Problem2D problem;
    SpaceTimeFn2D exact;
};

struct ManufacturedDistributed1D {
    DistributionSpec distribution;
    ProblemShell1D shell;
    SpaceTimeFn exact;
};

namespace detail {

// Caputo derivative of t^3 + t of order mu (the constant part of the smooth
// profiles differentiates to zero for every order in (0, 2]).
inline double caputo_cubic_affine(FractionalOrder mu, double t) {
    return caputo_monomial(3.0, mu, t) + caputo_monomial(1.0, mu, t);
}

// Separable source sin(x) * g(t) with the time profile memoized: assembly
// sweeps x fastest, so g (which hides gamma-function calls) runs once per
// level instead of once per node.
template <class G>
SpaceTimeFn separable_sine_source(G g) {
    return [g, tc = std::nan(""), gc = 0.0](double x, double t) mutable {
        if (t != tc) {
            tc = t;
            gc = g(t);
        }
        return std::sin(x) * gc;
    };
}

template <class G>
SpaceTimeFn2D separable_sine_source_2d(G g) {
    return [g, tc = std::nan(""), gc = 0.0](double x, double y, double t) mutable {
        if (t != tc) {
            tc = t;
            gc = g(t);
        }
        return std::sin(x) * std::sin(y) * gc;
    };
}

}  // namespace detail

/// u = sin(x) (t^3 + t + 1) on (0, pi) x (0, 1] under
/// D^{a1} u + D^{a2} u + u = u_xx + f: the telegraph-type testbed with
/// nonzero initial value, initial velocity and reaction.
inline ManufacturedProblem1D two_term_smooth(double a1, double a2) {
    const double pi = 3.14159265358979323846;
    const MultiTermSpec spec({{1.0, FractionalOrder(a1)}, {1.0, FractionalOrder(a2)}});
    const FractionalOrder o1(a1), o2(a2);
    ManufacturedProblem1D m{
        Problem1D{
            pi, 1.0, spec,
            detail::separable_sine_source([o1, o2](double t) {
                return detail::caputo_cubic_affine(o1, t) + detail::caputo_cubic_affine(o2, t) +
                       2.0 * (t * t * t + t + 1.0);
            }),
            [](double x) { return std::sin(x); },
            [](double x) { return std::sin(x); },
            nullptr, nullptr, 1.0},
        [](double x, double t) { return std::sin(x) * (t * t * t + t + 1.0); }};
    return m;
}

/// u = sin(x) t^nu (nu >= 1) under the same two-term equation; for
/// non-integer nu the temporal rate degrades to nu - 1, which is what the
/// low-regularity study measures.
inline ManufacturedProblem1D low_regularity(double nu, double a1, double a2) {
    if (!(nu >= 1.0))
        throw std::invalid_argument("low_regularity: exponent must be >= 1");
    const double pi = 3.14159265358979323846;
    const MultiTermSpec spec({{1.0, FractionalOrder(a1)}, {1.0, FractionalOrder(a2)}});
    const FractionalOrder o1(a1), o2(a2);
    const bool linear = nu == 1.0;
    ManufacturedProblem1D m{
        Problem1D{pi, 1.0, spec,
                  detail::separable_sine_source([o1, o2, nu](double t) {
                      return caputo_monomial(nu, o1, t) + caputo_monomial(nu, o2, t) +
                             2.0 * std::pow(t, nu);
                  }),
                  nullptr,
                  [linear](double x) { return linear ? std::sin(x) : 0.0; },
                  nullptr, nullptr, 1.0},
        [nu](double x, double t) { return std::sin(x) * std::pow(t, nu); }};
    return m;
}

/// u = sin(x) sin(y) (t^3 + t + 1) on (0, pi)^2 x (0, 1/2] under
/// D^{a1} u + D^{a2} u = u_xx + u_yy + f (no reaction in 2D).
inline ManufacturedProblem2D two_term_smooth_2d(double a1, double a2) {
    const double pi = 3.14159265358979323846;
    const MultiTermSpec spec({{1.0, FractionalOrder(a1)}, {1.0, FractionalOrder(a2)}});
    const FractionalOrder o1(a1), o2(a2);
    ManufacturedProblem2D m{
        Problem2D{
            pi, pi, 0.5, spec,
            detail::separable_sine_source_2d([o1, o2](double t) {
                return detail::caputo_cubic_affine(o1, t) + detail::caputo_cubic_affine(o2, t) +
                       2.0 * (t * t * t + t + 1.0);
            }),
            [](double x, double y) { return std::sin(x) * std::sin(y); },
            [](double x, double y) { return std::sin(x) * std::sin(y); },
            0.0},
        [](double x, double y, double t) {
            return std::sin(x) * std::sin(y) * (t * t * t + t + 1.0);
        }};
    return m;
}

/// (6t^3 - 6t) / ln t, continued smoothly through its removable singularity
/// at t = 1 (value 12) and t -> 0+ (value 0).
inline double cubic_log_ratio(double t) {
    const double e = t - 1.0;
    if (e == 0.0) return 12.0;
    return 6.0 * t * (2.0 + e) * (e / std::log1p(e));
}

/// u = sin(x) t^3 on (0, pi) x (0, 1] under the distributed-order equation
/// int_0^2 Gamma(4-a) D^a u da = u_xx + f. The weight cancels the Gamma in
/// D^a t^3, so the distributed term integrates in closed form and
/// f = sin(x) (t^3 + (6t^3 - 6t)/ln t).
inline ManufacturedDistributed1D distributed_cubic(std::size_t resolution) {
    const double pi = 3.14159265358979323846;
    ManufacturedDistributed1D m{
        DistributionSpec{[](double a) { return std::tgamma(4.0 - a); }, resolution, 0.0, 2.0},
        ProblemShell1D{pi, 1.0,
                       detail::separable_sine_source(
                           [](double t) { return t * t * t + cubic_log_ratio(t); }),
                       [](double) { return 0.0; },
                       [](double) { return 0.0; },
                       nullptr, nullptr, 0.0},
        [](double x, double t) { return std::sin(x) * t * t * t; }};
    return m;
}

}  // namespace fracwave
