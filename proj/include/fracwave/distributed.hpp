#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include "fracwave/problem.hpp"
#include "fracwave/solver1d.hpp"

namespace fracwave {

/// Distributed-order operator: int_{lo}^{hi} w(alpha) D^alpha u dalpha with
/// a positive weight density. The order interval is split into 2*resolution
/// equal panels (width sigma = (hi - lo) / (2*resolution)), so on the default
/// interval [0, 2] sigma = 1/resolution.
struct DistributionSpec {
    std::function<double(double)> weight;
    std::size_t resolution = 1;
    double lo = 0.0;
    double hi = 2.0;
};

/// Problem data without the fractional operator; solve_distributed pairs it
/// with the spec produced by discretize_distribution.
struct ProblemShell1D {
    double length;
    double horizon;
    SpaceTimeFn source;
    SpaceFn initial;
    SpaceFn initial_velocity;
    TimeFn boundary_left;
    TimeFn boundary_right;
    double reaction = 0.0;
};

enum class Backend { stepping, fast };

inline GridField solve(const Problem1D& p, const TimeMesh& tmesh, const SpatialMesh1D& smesh,
                       Backend backend) {
    return backend == Backend::stepping ? solve_stepping(p, tmesh, smesh)
                                        : solve_fast(p, tmesh, smesh);
}

/// Composite midpoint rule: 2*resolution terms with orders at the panel
/// midpoints lo + (p - 1/2) sigma and weights sigma * w(midpoint). The
/// quadrature error is O(sigma^2) for twice-differentiable integrands, so
/// distributed-order runs converge at second order in sigma on top of the
/// solver's own rates.
inline MultiTermSpec discretize_distribution(const DistributionSpec& d) {
    if (!d.weight) throw std::invalid_argument("DistributionSpec: weight function required");
    if (d.resolution == 0)
        throw std::invalid_argument("DistributionSpec: resolution must be >= 1");
    if (!(d.lo >= 0.0) || !(d.hi <= 2.0) || !(d.hi > d.lo))
        throw std::invalid_argument("DistributionSpec: need 0 <= lo < hi <= 2");

    const std::size_t count = 2 * d.resolution;
    const double sigma = (d.hi - d.lo) / static_cast<double>(count);
    std::vector<FractionalTerm> terms;
    terms.reserve(count);
    for (std::size_t p = 1; p <= count; ++p) {
        const double order = d.lo + (static_cast<double>(p) - 0.5) * sigma;
        const double w = d.weight(order);
        if (!(w > 0.0))
            throw std::domain_error("discretize_distribution: weight must be positive");
        terms.push_back({sigma * w, FractionalOrder(order)});
    }
    return MultiTermSpec(std::move(terms));
}

/// Reduces the distributed operator by midpoint quadrature and delegates to
/// the multi-term solvers; bit-identical to calling them on
/// discretize_distribution(d) directly.
inline GridField solve_distributed(const DistributionSpec& d, const ProblemShell1D& shell,
                                   const TimeMesh& tmesh, const SpatialMesh1D& smesh,
                                   Backend backend = Backend::fast) {
    Problem1D p{shell.length,       shell.horizon,       discretize_distribution(d),
                shell.source,       shell.initial,       shell.initial_velocity,
                shell.boundary_left, shell.boundary_right, shell.reaction};
    return solve(p, tmesh, smesh, backend);
}

}  // namespace fracwave
