#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fracwave/fractional.hpp"
#include "fracwave/mesh.hpp"

namespace fracwave {

/// One term K * D^order of a multi-term fractional time operator.
struct FractionalTerm {
    double weight;
    FractionalOrder order;
};

/// Sum of Caputo derivatives sum_j K_j D^{order_j} with positive weights and
/// strictly increasing orders in (0, 2]. Orders <= 1 ride the sub-diffusion
/// (L1) kernel, orders > 1 the diffusion-wave (modified L2) kernel.
class MultiTermSpec {
public:
    explicit MultiTermSpec(std::vector<FractionalTerm> terms) : terms_(std::move(terms)) {
        if (terms_.empty())
            throw std::invalid_argument("MultiTermSpec: needs at least one term");
        double prev = 0.0;
        for (const auto& t : terms_) {
            if (!(t.weight > 0.0))
                throw std::invalid_argument("MultiTermSpec: weights must be positive");
            if (!(t.order.value() > prev))
                throw std::invalid_argument("MultiTermSpec: orders must be strictly increasing");
            prev = t.order.value();
        }
    }

    [[nodiscard]] const std::vector<FractionalTerm>& terms() const noexcept { return terms_; }
    [[nodiscard]] bool has_wave() const noexcept { return terms_.back().order.is_wave(); }
    /// Largest order; every row of the all-at-once form is scaled by
    /// tau to this power so the system stays well-conditioned as tau -> 0.
    [[nodiscard]] double scaling_order() const noexcept { return terms_.back().order.value(); }

private:
    std::vector<FractionalTerm> terms_;
};

using SpaceTimeFn = std::function<double(double, double)>;  // f(x, t)
using SpaceFn = std::function<double(double)>;
using TimeFn = std::function<double(double)>;

/// sum_j K_j D_t^{order_j} u = u_xx - reaction*u + f  on (0, L) x (0, T],
/// with Dirichlet data g0, gL (null handles mean identically zero), initial
/// value phi0 and - whenever a wave-order term is present - initial velocity
/// phi1.
struct Problem1D {
    double length;
    double horizon;
    MultiTermSpec spec;
    SpaceTimeFn source;         // f(x, t); null means zero
    SpaceFn initial;            // phi0; null means zero
    SpaceFn initial_velocity;   // phi1; required when spec.has_wave()
    TimeFn boundary_left;       // g0(t); null means homogeneous
    TimeFn boundary_right;      // gL(t); null means homogeneous
    double reaction = 0.0;
};

using SpaceTimeFn2D = std::function<double(double, double, double)>;  // f(x, y, t)
using SpaceFn2D = std::function<double(double, double)>;

/// 2D analog on the rectangle (0, Lx) x (0, Ly) with homogeneous Dirichlet
/// boundary (the solvers support nothing else in 2D).
struct Problem2D {
    double length_x;
    double length_y;
    double horizon;
    MultiTermSpec spec;
    SpaceTimeFn2D source;
    SpaceFn2D initial;
    SpaceFn2D initial_velocity;
    double reaction = 0.0;
};

/// Space-time solution table: rows n = 0..N of nodal values i = 0..M.
/// Row 0 carries the sampled initial data, columns 0 and M the boundary.
class GridField {
public:
    GridField(std::size_t levels, std::size_t nodes)
        : nodes_(nodes), data_(levels * nodes, 0.0) {
        if (levels == 0 || nodes == 0)
            throw std::invalid_argument("GridField: empty extent");
    }

    [[nodiscard]] std::size_t levels() const noexcept { return data_.size() / nodes_; }
    [[nodiscard]] std::size_t nodes() const noexcept { return nodes_; }
    [[nodiscard]] double& at(std::size_t n, std::size_t i) noexcept {
        return data_[n * nodes_ + i];
    }
    [[nodiscard]] double at(std::size_t n, std::size_t i) const noexcept {
        return data_[n * nodes_ + i];
    }
    [[nodiscard]] std::span<double> level(std::size_t n) noexcept {
        return {data_.data() + n * nodes_, nodes_};
    }
    [[nodiscard]] std::span<const double> level(std::size_t n) const noexcept {
        return {data_.data() + n * nodes_, nodes_};
    }

private:
    std::size_t nodes_;
    std::vector<double> data_;
};

/// 2D space-time solution table: levels n = 0..N of nodal (i, j) grids.
class GridField2D {
public:
    GridField2D(std::size_t levels, std::size_t nodes_x, std::size_t nodes_y)
        : nx_(nodes_x), ny_(nodes_y), data_(levels * nodes_x * nodes_y, 0.0) {
        if (levels == 0 || nodes_x == 0 || nodes_y == 0)
            throw std::invalid_argument("GridField2D: empty extent");
    }

    [[nodiscard]] std::size_t levels() const noexcept { return data_.size() / (nx_ * ny_); }
    [[nodiscard]] std::size_t nodes_x() const noexcept { return nx_; }
    [[nodiscard]] std::size_t nodes_y() const noexcept { return ny_; }
    [[nodiscard]] double& at(std::size_t n, std::size_t i, std::size_t j) noexcept {
        return data_[(n * nx_ + i) * ny_ + j];
    }
    [[nodiscard]] double at(std::size_t n, std::size_t i, std::size_t j) const noexcept {
        return data_[(n * nx_ + i) * ny_ + j];
    }
    [[nodiscard]] std::span<double> level(std::size_t n) noexcept {
        return {data_.data() + n * nx_ * ny_, nx_ * ny_};
    }
    [[nodiscard]] std::span<const double> level(std::size_t n) const noexcept {
        return {data_.data() + n * nx_ * ny_, nx_ * ny_};
    }

private:
    std::size_t nx_;
    std::size_t ny_;
    std::vector<double> data_;
};

/// max |a - b| over all levels and nodes (frames included).
inline double max_abs_difference(const GridField& a, const GridField& b) {
    if (a.levels() != b.levels() || a.nodes() != b.nodes())
        throw std::invalid_argument("max_abs_difference: shape mismatch");
    double r = 0.0;
    for (std::size_t n = 0; n < a.levels(); ++n)
        for (std::size_t i = 0; i < a.nodes(); ++i)
            r = std::max(r, std::abs(a.at(n, i) - b.at(n, i)));
    return r;
}

inline double max_abs_difference(const GridField2D& a, const GridField2D& b) {
    if (a.levels() != b.levels() || a.nodes_x() != b.nodes_x() || a.nodes_y() != b.nodes_y())
        throw std::invalid_argument("max_abs_difference: shape mismatch");
    double r = 0.0;
    for (std::size_t n = 0; n < a.levels(); ++n) {
        const auto la = a.level(n);
        const auto lb = b.level(n);
        for (std::size_t k = 0; k < la.size(); ++k)
            r = std::max(r, std::abs(la[k] - lb[k]));
    }
    return r;
}

inline double max_abs(const GridField& a) {
    double r = 0.0;
    for (std::size_t n = 0; n < a.levels(); ++n)
        for (std::size_t i = 0; i < a.nodes(); ++i) r = std::max(r, std::abs(a.at(n, i)));
    return r;
}

inline double max_abs(const GridField2D& a) {
    double r = 0.0;
    for (std::size_t n = 0; n < a.levels(); ++n)
        for (const double v : a.level(n)) r = std::max(r, std::abs(v));
    return r;
}

/// max_i |u_i^N - exact(x_i, T)| over interior nodes at the final time.
template <class Exact>
double max_error_at_final(const GridField& u, Exact&& exact, const TimeMesh& tmesh,
                          const SpatialMesh1D& smesh) {
    const std::size_t n = u.levels() - 1;
    double r = 0.0;
    for (std::size_t i = 1; i < smesh.M; ++i)
        r = std::max(r, std::abs(u.at(n, i) - exact(smesh.x(i), tmesh.t(n))));
    return r;
}

template <class Exact>
double max_error_at_final(const GridField2D& u, Exact&& exact, const TimeMesh& tmesh,
                          const SpatialMesh2D& smesh) {
    const std::size_t n = u.levels() - 1;
    const double t = tmesh.t(n);
    double r = 0.0;
    for (std::size_t i = 1; i < smesh.x.M; ++i)
        for (std::size_t j = 1; j < smesh.y.M; ++j)
            r = std::max(r, std::abs(u.at(n, i, j) - exact(smesh.x.x(i), smesh.y.x(j), t)));
    return r;
}

}  // namespace fracwave
