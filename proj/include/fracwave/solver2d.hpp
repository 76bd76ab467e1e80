#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "fracwave/mesh.hpp"
#include "fracwave/pool.hpp"
#include "fracwave/problem.hpp"
#include "fracwave/solver1d.hpp"
#include "fracwave/toeplitz.hpp"

namespace fracwave {

namespace detail {

inline void check_problem_2d(const Problem2D& p, const TimeMesh& tmesh,
                             const SpatialMesh2D& smesh) {
    if (!(p.length_x > 0.0) || !(p.length_y > 0.0) || !(p.horizon > 0.0))
        throw std::invalid_argument("Problem2D: extents must be positive");
    if (std::abs(smesh.x.L - p.length_x) > 1e-12 * p.length_x ||
        std::abs(smesh.y.L - p.length_y) > 1e-12 * p.length_y ||
        std::abs(tmesh.T - p.horizon) > 1e-12 * p.horizon)
        throw std::invalid_argument("Problem2D: meshes do not match the domain");
    if (p.spec.has_wave() && !p.initial_velocity)
        throw std::invalid_argument(
            "Problem2D: orders above one require the initial velocity phi1");
}

/// Interior values of the compact average applied along both axes of a full
/// nodal grid ((m1+1) x (m2+1), row-major). `tmp` needs (m1+1)*(m2-1) slots;
/// `out` gets (m1-1)*(m2-1) values, j fastest.
inline void average_interior_2d(std::span<const double> full, std::size_t m1,
                                std::size_t m2, std::vector<double>& tmp,
                                std::span<double> out) {
    const std::size_t mi2 = m2 - 1;
    tmp.resize((m1 + 1) * mi2);
    for (std::size_t i = 0; i <= m1; ++i) {
        const double* row = full.data() + i * (m2 + 1);
        double* t = tmp.data() + i * mi2;
        for (std::size_t j = 1; j < m2; ++j)
            t[j - 1] = (row[j - 1] + 10.0 * row[j] + row[j + 1]) / 12.0;
    }
    for (std::size_t i = 1; i < m1; ++i) {
        const double* lo = tmp.data() + (i - 1) * mi2;
        const double* mid = tmp.data() + i * mi2;
        const double* hi = tmp.data() + (i + 1) * mi2;
        double* o = out.data() + (i - 1) * mi2;
        for (std::size_t j = 0; j < mi2; ++j)
            o[j] = (lo[j] + 10.0 * mid[j] + hi[j]) / 12.0;
    }
}

/// Orthonormal sine transform along both axes of an interior block
/// ((m1-1) x (m2-1), j fastest). Involutive, like its 1D factors.
class DoubleSineTransform {
public:
    DoubleSineTransform(std::size_t mi1, std::size_t mi2)
        : mi1_(mi1), mi2_(mi2), px_(mi1), py_(mi2), column_(mi1) {}

    void apply_inplace(std::span<double> block) {
        for (std::size_t i = 0; i < mi1_; ++i)
            py_.apply_inplace(block.subspan(i * mi2_, mi2_));
        for (std::size_t j = 0; j < mi2_; ++j) {
            for (std::size_t i = 0; i < mi1_; ++i) column_[i] = block[i * mi2_ + j];
            px_.apply_inplace(column_);
            for (std::size_t i = 0; i < mi1_; ++i) block[i * mi2_ + j] = column_[i];
        }
    }

private:
    std::size_t mi1_;
    std::size_t mi2_;
    SineTransformPlan px_;
    SineTransformPlan py_;
    std::vector<double> column_;
};

/// Eigenvalues of the compact-average and second-difference stencils along
/// one axis, combined into the per-mode multipliers the schemes need.
struct AxisSpectra {
    std::vector<double> lam1;
    std::vector<double> lam2;

    explicit AxisSpectra(std::size_t mi)
        : lam1(sine_spectrum({1.0 / 12.0, 10.0 / 12.0, 1.0 / 12.0, mi}).eigenvalues),
          lam2(sine_spectrum({-1.0, 2.0, -1.0, mi}).eigenvalues) {}
};

}  // namespace detail

/// History-summing reference backend on the rectangle. Each step solves
///
///   [(Gamma_n + c) A_x A_y - (A_y dx^2 + A_x dy^2)] u^n = A_x A_y f^n + history
///
/// by a double sine transform: the operator is diagonal per mode pair. The
/// history is accumulated per node on the A_x A_y-averaged layers, exactly
/// as in one dimension. O(N^2 M1 M2) history work dominates.
inline GridField2D solve_2d_stepping(const Problem2D& p, const TimeMesh& tmesh,
                                     const SpatialMesh2D& smesh) {
    detail::check_problem_2d(p, tmesh, smesh);
    const std::size_t n_steps = tmesh.N;
    const std::size_t m1 = smesh.x.M, m2 = smesh.y.M;
    const std::size_t mi1 = m1 - 1, mi2 = m2 - 1;
    const std::size_t nodes = mi1 * mi2;
    const double tau = tmesh.tau;
    const double c = p.reaction;
    const double inv_h1sq = 1.0 / (smesh.x.h * smesh.x.h);
    const double inv_h2sq = 1.0 / (smesh.y.h * smesh.y.h);

    GridField2D u(n_steps + 1, m1 + 1, m2 + 1);
    if (p.initial) {
        const auto phi0 = sample2d(p.initial, smesh);
        std::copy(phi0.data.begin(), phi0.data.end(), u.level(0).begin());
    }

    const detail::SteppingWeights sw(p.spec, tau, n_steps);

    std::vector<double> stencil_tmp;
    std::vector<double> aphi1(nodes, 0.0);
    if (p.initial_velocity) {
        const auto phi1 = sample2d(p.initial_velocity, smesh);
        detail::average_interior_2d(phi1.data, m1, m2, stencil_tmp, aphi1);
    }

    detail::LayerStore layers(nodes, n_steps);
    std::vector<double> averaged(nodes);
    const auto push_layer = [&](std::size_t n) {
        detail::average_interior_2d(u.level(n), m1, m2, stencil_tmp, averaged);
        layers.push(averaged);
    };
    push_layer(0);

    detail::DoubleSineTransform dst(mi1, mi2);
    const detail::AxisSpectra sx(mi1), sy(mi2);

    std::vector<double> rw(n_steps + 1, 0.0), rv(n_steps + 1, 0.0);
    std::vector<double> fgrid((m1 + 1) * (m2 + 1)), rhs(nodes);

    for (std::size_t n = 1; n <= n_steps; ++n) {
        const double tn = tmesh.t(n);
        const double gamma = sw.gamma(n);

        if (p.source) {
            for (std::size_t i = 0; i <= m1; ++i)
                for (std::size_t j = 0; j <= m2; ++j)
                    fgrid[i * (m2 + 1) + j] = p.source(smesh.x.x(i), smesh.y.x(j), tn);
            detail::average_interior_2d(fgrid, m1, m2, stencil_tmp, rhs);
        } else {
            std::fill(rhs.begin(), rhs.end(), 0.0);
        }

        sw.fill_windows(n, rw, rv);
        for (std::size_t k = 0; k < nodes; ++k)
            rhs[k] += sw.history(n, tau, rw.data(), rv.data(), layers.averages(k),
                                 layers.second_differences(k), aphi1[k]);

        dst.apply_inplace(rhs);
        for (std::size_t i = 0; i < mi1; ++i) {
            for (std::size_t j = 0; j < mi2; ++j) {
                const double mult = (gamma + c) * sx.lam1[i] * sy.lam1[j] +
                                    sx.lam2[i] * sy.lam1[j] * inv_h1sq +
                                    sx.lam1[i] * sy.lam2[j] * inv_h2sq;
                if (mult == 0.0)
                    throw singular_matrix_error("solve_2d_stepping: zero mode multiplier");
                rhs[i * mi2 + j] /= mult;
            }
        }
        dst.apply_inplace(rhs);

        auto level = u.level(n);
        for (std::size_t i = 0; i < mi1; ++i)
            for (std::size_t j = 0; j < mi2; ++j)
                level[(i + 1) * (m2 + 1) + (j + 1)] = rhs[i * mi2 + j];
        push_layer(n);
    }
    return u;
}

/// All-at-once backend on the rectangle: double sine transform per level,
/// one modified triangular Toeplitz time solve per mode pair (shared spectra
/// cache, worker pool), inverse transforms at the end. Homogeneous Dirichlet
/// data only, like the rest of the 2D machinery.
inline GridField2D solve_2d_fast(const Problem2D& p, const TimeMesh& tmesh,
                                 const SpatialMesh2D& smesh) {
    detail::check_problem_2d(p, tmesh, smesh);
    const std::size_t n_steps = tmesh.N;
    const std::size_t m1 = smesh.x.M, m2 = smesh.y.M;
    const std::size_t mi1 = m1 - 1, mi2 = m2 - 1;
    const std::size_t nodes = mi1 * mi2;
    const double inv_h1sq = 1.0 / (smesh.x.h * smesh.x.h);
    const double inv_h2sq = 1.0 / (smesh.y.h * smesh.y.h);

    const auto co = scheme_coefficients(p.spec, tmesh.tau, n_steps);
    const double tp = co.tau_power;

    std::vector<double> stencil_tmp;
    std::vector<double> aphi0(nodes, 0.0), aphi1(nodes, 0.0);
    if (p.initial) {
        const auto phi0 = sample2d(p.initial, smesh);
        detail::average_interior_2d(phi0.data, m1, m2, stencil_tmp, aphi0);
    }
    if (p.initial_velocity) {
        const auto phi1 = sample2d(p.initial_velocity, smesh);
        detail::average_interior_2d(phi1.data, m1, m2, stencil_tmp, aphi1);
    }

    std::vector<double> b(n_steps * nodes, 0.0);
    {
        std::vector<double> fgrid((m1 + 1) * (m2 + 1)), af(nodes);
        for (std::size_t n = 1; n <= n_steps; ++n) {
            double* row = b.data() + (n - 1) * nodes;
            if (p.source) {
                const double tn = tmesh.t(n);
                for (std::size_t i = 0; i <= m1; ++i)
                    for (std::size_t j = 0; j <= m2; ++j)
                        fgrid[i * (m2 + 1) + j] = p.source(smesh.x.x(i), smesh.y.x(j), tn);
                detail::average_interior_2d(fgrid, m1, m2, stencil_tmp, af);
                for (std::size_t k = 0; k < nodes; ++k) row[k] = tp * af[k];
            }
            const double wu0 = co.initial_weight[n - 1];
            const double wv = co.velocity_weight[n - 1];
            for (std::size_t k = 0; k < nodes; ++k)
                row[k] += wu0 * aphi0[k] + wv * aphi1[k];
        }
    }

    detail::DoubleSineTransform dst(mi1, mi2);
    for (std::size_t n = 0; n < n_steps; ++n)
        dst.apply_inplace(std::span(b.data() + n * nodes, nodes));

    std::vector<double> cols(nodes * n_steps);
    for (std::size_t n = 0; n < n_steps; ++n)
        for (std::size_t k = 0; k < nodes; ++k) cols[k * n_steps + n] = b[n * nodes + k];

    const detail::AxisSpectra sx(mi1), sy(mi2);

    std::optional<ToeplitzSpectraCache> cache;
    if (n_steps >= 2)
        cache.emplace(std::span<const double>(co.diagonals).subspan(1), n_steps - 1);

    const WorkerPool pool;
    std::vector<std::unique_ptr<TriangularToeplitzSolver>> solvers(pool.workers());
    pool.parallel_for(nodes, [&](std::size_t k, std::size_t lane) {
        const std::size_t i = k / mi2, j = k % mi2;
        double* g = cols.data() + k * n_steps;
        const double shift =
            p.reaction * tp + tp * (sx.lam2[i] / sx.lam1[i] * inv_h1sq +
                                    sy.lam2[j] / sy.lam1[j] * inv_h2sq);
        const double inv_l1 = 1.0 / (sx.lam1[i] * sy.lam1[j]);
        for (std::size_t n = 0; n < n_steps; ++n) g[n] *= inv_l1;

        const double d0 = co.diagonals[0] + shift;
        const double c1 = d0 + co.column_excess[0];
        if (c1 == 0.0) throw singular_matrix_error("solve_2d_fast: singular first pivot");
        const double e0 = g[0] / c1;
        for (std::size_t n = 1; n < n_steps; ++n)
            g[n] -= (co.diagonals[n] + co.column_excess[n]) * e0;
        g[0] = e0;
        if (n_steps >= 2) {
            auto& solver = solvers[lane];
            if (!solver) solver = std::make_unique<TriangularToeplitzSolver>(*cache);
            solver->solve(d0, std::span(g + 1, n_steps - 1));
        }
    });

    for (std::size_t n = 0; n < n_steps; ++n)
        for (std::size_t k = 0; k < nodes; ++k) b[n * nodes + k] = cols[k * n_steps + n];
    for (std::size_t n = 0; n < n_steps; ++n)
        dst.apply_inplace(std::span(b.data() + n * nodes, nodes));

    GridField2D u(n_steps + 1, m1 + 1, m2 + 1);
    if (p.initial) {
        const auto phi0 = sample2d(p.initial, smesh);
        std::copy(phi0.data.begin(), phi0.data.end(), u.level(0).begin());
    }
    for (std::size_t n = 1; n <= n_steps; ++n) {
        auto level = u.level(n);
        const double* row = b.data() + (n - 1) * nodes;
        for (std::size_t i = 0; i < mi1; ++i)
            for (std::size_t j = 0; j < mi2; ++j)
                level[(i + 1) * (m2 + 1) + (j + 1)] = row[i * mi2 + j];
    }
    return u;
}

}  // namespace fracwave
