#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace fracwave {

/// Uniform partition of [0, T] into N steps of size tau = T/N.
struct TimeMesh {
    double T;
    std::size_t N;
    double tau;

    TimeMesh(double horizon, std::size_t steps) : T(horizon), N(steps), tau(horizon / steps) {
        if (!(horizon > 0.0)) throw std::invalid_argument("TimeMesh: T must be positive");
        if (steps == 0) throw std::invalid_argument("TimeMesh: N must be >= 1");
    }
    [[nodiscard]] double t(std::size_t n) const noexcept { return tau * static_cast<double>(n); }
};

/// Uniform partition of [0, L] into M cells, nodes x_i = i*h, i = 0..M.
struct SpatialMesh1D {
    double L;
    std::size_t M;
    double h;

    SpatialMesh1D(double length, std::size_t cells)
        : L(length), M(cells), h(length / cells) {
        if (!(length > 0.0)) throw std::invalid_argument("SpatialMesh1D: L must be positive");
        if (cells < 2) throw std::invalid_argument("SpatialMesh1D: M must be >= 2");
    }
    [[nodiscard]] double x(std::size_t i) const noexcept { return h * static_cast<double>(i); }
    [[nodiscard]] std::size_t interior() const noexcept { return M - 1; }
};

/// Tensor grid on the rectangle (0, Lx) x (0, Ly).
struct SpatialMesh2D {
    SpatialMesh1D x;
    SpatialMesh1D y;
};

/// Nodal values over all nodes 0..M of a 1D mesh.
using GridFunction1D = std::vector<double>;

/// Nodal values over a 2D mesh, row-major: value(i, j) = data[i * (My+1) + j].
struct GridFunction2D {
    std::size_t nx1;  // nodes along x (Mx + 1)
    std::size_t ny1;  // nodes along y (My + 1)
    std::vector<double> data;

    GridFunction2D(std::size_t nx, std::size_t ny) : nx1(nx), ny1(ny), data(nx * ny, 0.0) {}
    double& at(std::size_t i, std::size_t j) noexcept { return data[i * ny1 + j]; }
    double at(std::size_t i, std::size_t j) const noexcept { return data[i * ny1 + j]; }
};

template <class F>
GridFunction1D sample(F&& f, const SpatialMesh1D& mesh) {
    GridFunction1D v(mesh.M + 1);
    for (std::size_t i = 0; i <= mesh.M; ++i) v[i] = f(mesh.x(i));
    return v;
}

template <class F>
GridFunction2D sample2d(F&& f, const SpatialMesh2D& mesh) {
    GridFunction2D v(mesh.x.M + 1, mesh.y.M + 1);
    for (std::size_t i = 0; i <= mesh.x.M; ++i)
        for (std::size_t j = 0; j <= mesh.y.M; ++j) v.at(i, j) = f(mesh.x.x(i), mesh.y.x(j));
    return v;
}

}  // namespace fracwave
