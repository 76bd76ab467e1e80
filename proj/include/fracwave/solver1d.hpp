#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "fracwave/fractional.hpp"
#include "fracwave/mesh.hpp"
#include "fracwave/pool.hpp"
#include "fracwave/problem.hpp"
#include "fracwave/toeplitz.hpp"

namespace fracwave {

/// Scalar data of the all-at-once form of the scheme, with every time level
/// scaled by tau^{beta*} (beta* = largest order). The time operator is a
/// lower-triangular Toeplitz matrix with the given diagonals except in its
/// first column, which gains `column_excess` from the two-level start of the
/// wave stencil; `initial_weight` and `velocity_weight` multiply A_x(phi0)
/// and A_x(phi1) on the right-hand side.
struct SchemeCoefficients {
    double scaling_order = 0.0;            // beta*
    double tau_power = 0.0;                // tau^{beta*}
    std::vector<double> diagonals;         // t_0..t_{N-1}
    std::vector<double> column_excess;     // first column = diagonals[n] + column_excess[n]
    std::vector<double> initial_weight;    // weight of A_x(phi0) at level n+1
    std::vector<double> velocity_weight;   // weight of A_x(phi1) at level n+1
};

/// Assembles the combined kernel data for a multi-term operator on N steps.
///
/// Per sub-diffusion term (weight K, order alpha, L1 weights a_k):
///   t_0 += K tau^{beta*-alpha} a_0,  t_m += K tau^{beta*-alpha} (a_m - a_{m-1}),
///   initial_weight[n] += K tau^{beta*-alpha} a_n.
/// Per wave term (order beta, modified-L2 weights b_k):
///   t_m += K tau^{beta*-beta} (b_m - 2 b_{m-1} + b_{m-2})   (b_{-1} = b_{-2} = 0),
///   column_excess[n] += K tau^{beta*-beta} b_n,
///   initial_weight[0] += 2 K tau^{beta*-beta} b_0,
///   initial_weight[n] += K tau^{beta*-beta} (2 b_n - b_{n-1})  for n >= 1,
/// and velocity_weight = 2 tau * column_excess throughout.
inline SchemeCoefficients scheme_coefficients(const MultiTermSpec& spec, double tau,
                                              std::size_t n_steps) {
    if (!(tau > 0.0)) throw std::invalid_argument("scheme_coefficients: tau must be positive");
    if (n_steps == 0) throw std::invalid_argument("scheme_coefficients: need at least one step");
    const std::size_t n = n_steps;
    SchemeCoefficients co;
    co.scaling_order = spec.scaling_order();
    co.tau_power = std::pow(tau, co.scaling_order);
    co.diagonals.assign(n, 0.0);
    co.column_excess.assign(n, 0.0);
    co.initial_weight.assign(n, 0.0);
    co.velocity_weight.assign(n, 0.0);

    for (const auto& term : spec.terms()) {
        const double scale =
            term.weight * std::pow(tau, co.scaling_order - term.order.value());
        if (term.order.is_sub()) {
            const auto a = l1_coefficients(term.order, n).values;
            co.diagonals[0] += scale * a[0];
            for (std::size_t m = 1; m < n; ++m)
                co.diagonals[m] += scale * (a[m] - a[m - 1]);
            for (std::size_t m = 0; m < n; ++m) co.initial_weight[m] += scale * a[m];
        } else {
            const auto b = l2_coefficients(term.order, n).values;
            co.diagonals[0] += scale * b[0];
            if (n > 1) co.diagonals[1] += scale * (b[1] - 2.0 * b[0]);
            for (std::size_t m = 2; m < n; ++m)
                co.diagonals[m] += scale * (b[m] - 2.0 * b[m - 1] + b[m - 2]);
            for (std::size_t m = 0; m < n; ++m) co.column_excess[m] += scale * b[m];
            co.initial_weight[0] += scale * 2.0 * b[0];
            for (std::size_t m = 1; m < n; ++m)
                co.initial_weight[m] += scale * (2.0 * b[m] - b[m - 1]);
        }
    }
    for (std::size_t m = 0; m < n; ++m)
        co.velocity_weight[m] = 2.0 * tau * co.column_excess[m];
    return co;
}

namespace detail {

inline void check_problem(const Problem1D& p, const TimeMesh& tmesh,
                          const SpatialMesh1D& smesh) {
    if (!(p.length > 0.0) || !(p.horizon > 0.0))
        throw std::invalid_argument("Problem1D: length and horizon must be positive");
    if (std::abs(smesh.L - p.length) > 1e-12 * p.length ||
        std::abs(tmesh.T - p.horizon) > 1e-12 * p.horizon)
        throw std::invalid_argument("Problem1D: meshes do not match the domain");
    if (p.spec.has_wave() && !p.initial_velocity)
        throw std::invalid_argument(
            "Problem1D: orders above one require the initial velocity phi1");
}

/// Interior values of the compact average of a full nodal row.
inline void average_interior(std::span<const double> row, std::span<double> out) {
    for (std::size_t i = 1; i + 1 < row.size(); ++i)
        out[i - 1] = (row[i - 1] + 10.0 * row[i] + row[i + 1]) / 12.0;
}

/// Dot product with four independent accumulators; the plain loop would
/// serialize on the single sum and halve history-summing throughput.
inline double dot(const double* a, const double* b, std::size_t n) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        s0 += a[k] * b[k];
        s1 += a[k + 1] * b[k + 1];
        s2 += a[k + 2] * b[k + 2];
        s3 += a[k + 3] * b[k + 3];
    }
    for (; k < n; ++k) s0 += a[k] * b[k];
    return (s0 + s1) + (s2 + s3);
}

/// Per-step history weights of the marching form of the scheme, combined over
/// all terms of the operator and indexed by time lag. Shared between the 1D
/// and 2D history-summing backends, whose schemes differ only in the spatial
/// stencil the weights multiply.
struct SteppingWeights {
    std::vector<double> sub_lag;     // weight of layer n-d, d >= 1
    std::vector<double> wave_lag;    // weight of 2nd-difference layer n-d
    std::vector<double> sub_zero;    // weight of layer 0 at step k+1
    std::vector<double> wave_start;  // two-level start weight at step k+1
    double gamma_sub = 0.0;
    double gamma_wave = 0.0;
    bool any_wave = false;

    SteppingWeights(const MultiTermSpec& spec, double tau, std::size_t n_steps)
        : sub_lag(n_steps, 0.0),
          wave_lag(n_steps, 0.0),
          sub_zero(n_steps, 0.0),
          wave_start(n_steps, 0.0) {
        for (const auto& term : spec.terms()) {
            const double scale = term.weight * std::pow(tau, -term.order.value());
            if (term.order.is_sub()) {
                const auto a = l1_coefficients(term.order, n_steps).values;
                gamma_sub += scale * a[0];
                for (std::size_t d = 1; d < n_steps; ++d)
                    sub_lag[d] += scale * (a[d - 1] - a[d]);
                for (std::size_t k = 0; k < n_steps; ++k) sub_zero[k] += scale * a[k];
            } else {
                any_wave = true;
                const auto b = l2_coefficients(term.order, n_steps).values;
                gamma_wave += scale * b[0];
                for (std::size_t d = 1; d < n_steps; ++d) wave_lag[d] += scale * b[d];
                for (std::size_t k = 0; k < n_steps; ++k) wave_start[k] += scale * 2.0 * b[k];
            }
        }
    }

    /// Weight the kernels give the newest layer at step n (the wave stencil
    /// starts two-level, so step one is special).
    [[nodiscard]] double gamma(std::size_t n) const noexcept {
        return gamma_sub + (n == 1 ? 2.0 : 1.0) * gamma_wave;
    }

    /// Reversed lag windows for step n, making the per-node history sums
    /// contiguous dot products: rw[k] = sub_lag[n-k], rv[k] = wave_lag[n-k].
    void fill_windows(std::size_t n, std::span<double> rw, std::span<double> rv) const {
        for (std::size_t k = 1; k < n; ++k) rw[k] = sub_lag[n - k];
        for (std::size_t k = 2; k < n; ++k) rv[k] = wave_lag[n - k];
    }

    /// History contribution at step n for one node: w points at its stored
    /// averaged layers 0..n-1, d2 at their second time differences (slots 0
    /// and 1 unused), vel is the averaged initial velocity at the node.
    [[nodiscard]] double history(std::size_t n, double tau, const double* rw,
                                 const double* rv, const double* w, const double* d2,
                                 double vel) const {
        double acc = sub_zero[n - 1] * w[0];
        if (n >= 2) acc += dot(rw + 1, w + 1, n - 1);
        if (any_wave) {
            if (n == 1) {
                acc += wave_start[0] * (w[0] + tau * vel);
            } else {
                acc += gamma_wave * (2.0 * w[n - 1] - w[n - 2]);
                acc -= wave_start[n - 1] * (w[1] - w[0] - tau * vel);
                if (n >= 3) acc -= dot(rv + 2, d2 + 2, n - 2);
            }
        }
        return acc;
    }
};

/// Stored layers of a history-summing march, transposed so each node's
/// history is contiguous: averages(i)[k] is the stencil-averaged layer k at
/// node i, second_differences(i)[k] its second time difference (k >= 2).
class LayerStore {
public:
    LayerStore(std::size_t nodes, std::size_t n_steps) : avg_(nodes), d2_(nodes) {
        for (std::size_t i = 0; i < nodes; ++i) {
            avg_[i].reserve(n_steps + 1);
            d2_[i].assign(2, 0.0);  // slots k = 0, 1 are never read
            d2_[i].reserve(n_steps + 1);
        }
    }

    void push(std::span<const double> averaged_level) {
        for (std::size_t i = 0; i < avg_.size(); ++i) {
            auto& a = avg_[i];
            a.push_back(averaged_level[i]);
            const std::size_t k = a.size() - 1;
            if (k >= 2) d2_[i].push_back((a[k] - a[k - 1]) - (a[k - 1] - a[k - 2]));
        }
    }

    [[nodiscard]] const double* averages(std::size_t i) const noexcept {
        return avg_[i].data();
    }
    [[nodiscard]] const double* second_differences(std::size_t i) const noexcept {
        return d2_[i].data();
    }

private:
    std::vector<std::vector<double>> avg_;
    std::vector<std::vector<double>> d2_;
};

/// Prefactored elimination for a constant-coefficient tridiagonal system.
class TridiagonalSolver {
public:
    TridiagonalSolver(double sub, double diag, double super, std::size_t size)
        : sub_(sub), upper_(size), inv_denom_(size) {
        if (size == 0) throw std::invalid_argument("TridiagonalSolver: empty system");
        double denom = diag;
        for (std::size_t i = 0; i < size; ++i) {
            if (denom == 0.0) throw singular_matrix_error("TridiagonalSolver: zero pivot");
            inv_denom_[i] = 1.0 / denom;
            upper_[i] = super * inv_denom_[i];
            denom = diag - sub * upper_[i];
        }
    }

    void solve(std::span<double> rhs) const {
        const std::size_t n = upper_.size();
        if (rhs.size() != n) throw std::invalid_argument("TridiagonalSolver: size mismatch");
        rhs[0] *= inv_denom_[0];
        for (std::size_t i = 1; i < n; ++i)
            rhs[i] = (rhs[i] - sub_ * rhs[i - 1]) * inv_denom_[i];
        for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= upper_[i] * rhs[i + 1];
    }

private:
    double sub_;
    std::vector<double> upper_;
    std::vector<double> inv_denom_;
};

}  // namespace detail

/// Right-hand side of the all-at-once matrix equation, N rows (time levels
/// 1..N) by M-1 columns (interior nodes), row-major. Row n holds
///
///   tau^{beta*} (A_x F^n)_i + initial_weight[n] (A_x phi0)_i
///                           + velocity_weight[n] (A_x phi1)_i
///
/// plus, in the first and last column, the lifts of inhomogeneous Dirichlet
/// data through the A_x / delta_x^2 stencils and through the time operator
/// acting on the boundary trajectory.
inline std::vector<double> assemble_rhs(const Problem1D& p, const TimeMesh& tmesh,
                                        const SpatialMesh1D& smesh,
                                        const SchemeCoefficients& co) {
    detail::check_problem(p, tmesh, smesh);
    const std::size_t n_steps = tmesh.N;
    const std::size_t mi = smesh.M - 1;
    if (co.diagonals.size() != n_steps)
        throw std::invalid_argument("assemble_rhs: coefficient/mesh size mismatch");
    const double h = smesh.h;
    const double tp = co.tau_power;

    std::vector<double> b(n_steps * mi, 0.0);

    std::vector<double> aphi0(mi, 0.0), aphi1(mi, 0.0);
    if (p.initial) detail::average_interior(sample(p.initial, smesh), aphi0);
    if (p.initial_velocity) detail::average_interior(sample(p.initial_velocity, smesh), aphi1);

    std::vector<double> frow(smesh.M + 1), af(mi);
    for (std::size_t n = 1; n <= n_steps; ++n) {
        double* row = b.data() + (n - 1) * mi;
        const double wu0 = co.initial_weight[n - 1];
        const double wv = co.velocity_weight[n - 1];
        if (p.source) {
            const double tn = tmesh.t(n);
            for (std::size_t i = 0; i <= smesh.M; ++i) frow[i] = p.source(smesh.x(i), tn);
            detail::average_interior(frow, af);
            for (std::size_t i = 0; i < mi; ++i) row[i] = tp * af[i];
        }
        for (std::size_t i = 0; i < mi; ++i) row[i] += wu0 * aphi0[i] + wv * aphi1[i];
    }

    // Boundary lifts: the trajectory g(t_n) feeds the first/last interior
    // equation through delta_x^2 (+g/h^2), through A_x under the reaction
    // (-c g / 12), and through A_x under the time operator (-(T g)/12 with T
    // the modified-first-column Toeplitz operator).
    const auto lift = [&](const TimeFn& g, std::size_t column) {
        std::vector<double> gv(n_steps);
        for (std::size_t n = 1; n <= n_steps; ++n) gv[n - 1] = g(tmesh.t(n));
        std::vector<double> tg;
        if (n_steps == 1) {
            tg = {co.diagonals[0] * gv[0]};
        } else {
            std::vector<double> first_row(n_steps, 0.0);
            first_row[0] = co.diagonals[0];
            tg = toeplitz_matvec(co.diagonals, first_row, gv);
        }
        const double edge = 1.0 / (h * h) - p.reaction / 12.0;
        for (std::size_t n = 0; n < n_steps; ++n) {
            const double tg_full = tg[n] + co.column_excess[n] * gv[0];
            b[n * mi + column] += tp * edge * gv[n] - tg_full / 12.0;
        }
    };
    if (p.boundary_left) lift(p.boundary_left, 0);
    if (p.boundary_right) lift(p.boundary_right, mi - 1);

    return b;
}

inline std::vector<double> assemble_rhs(const Problem1D& p, const TimeMesh& tmesh,
                                        const SpatialMesh1D& smesh) {
    return assemble_rhs(p, tmesh, smesh, scheme_coefficients(p.spec, tmesh.tau, tmesh.N));
}

/// History-summing reference backend. Marches n = 1..N, at each step solving
///
///   [(Gamma_n + c) A_x - delta_x^2] u^n = A_x f^n + history + lifts
///
/// with Gamma_n the weight the kernels give the newest level (the wave
/// stencil starts two-level, so Gamma_1 differs from the later Gamma).
/// Total work is O(N^2 M): every step re-weights all stored layers.
inline GridField solve_stepping(const Problem1D& p, const TimeMesh& tmesh,
                                const SpatialMesh1D& smesh) {
    detail::check_problem(p, tmesh, smesh);
    const std::size_t n_steps = tmesh.N;
    const std::size_t m = smesh.M;
    const std::size_t mi = m - 1;
    const double tau = tmesh.tau;
    const double h = smesh.h;
    const double c = p.reaction;
    const double inv_h2 = 1.0 / (h * h);

    GridField u(n_steps + 1, m + 1);
    for (std::size_t i = 0; i <= m; ++i)
        u.at(0, i) = p.initial ? p.initial(smesh.x(i)) : 0.0;

    const detail::SteppingWeights sw(p.spec, tau, n_steps);

    std::vector<double> aphi1(mi, 0.0);
    if (p.initial_velocity) detail::average_interior(sample(p.initial_velocity, smesh), aphi1);

    detail::LayerStore layers(mi, n_steps);
    std::vector<double> averaged(mi);
    const auto push_layer = [&](std::size_t n) {
        detail::average_interior(u.level(n), averaged);
        layers.push(averaged);
    };
    push_layer(0);

    std::vector<double> rw(n_steps + 1, 0.0), rv(n_steps + 1, 0.0);
    std::vector<double> frow(m + 1), rhs(mi);

    std::optional<detail::TridiagonalSolver> first_solver, later_solver;
    const auto solver_for = [&](std::size_t n) -> const detail::TridiagonalSolver& {
        const double gamma = sw.gamma(n);
        const double off = (gamma + c) / 12.0 - inv_h2;
        const double diag = (gamma + c) * 10.0 / 12.0 + 2.0 * inv_h2;
        auto& slot = (n == 1 && sw.any_wave) ? first_solver : later_solver;
        if (!slot) slot.emplace(off, diag, off, mi);
        return *slot;
    };

    for (std::size_t n = 1; n <= n_steps; ++n) {
        const double tn = tmesh.t(n);
        const double gamma = sw.gamma(n);

        if (p.source) {
            for (std::size_t i = 0; i <= m; ++i) frow[i] = p.source(smesh.x(i), tn);
            detail::average_interior(frow, rhs);
        } else {
            std::fill(rhs.begin(), rhs.end(), 0.0);
        }

        sw.fill_windows(n, rw, rv);
        for (std::size_t i = 0; i < mi; ++i)
            rhs[i] += sw.history(n, tau, rw.data(), rv.data(), layers.averages(i),
                                 layers.second_differences(i), aphi1[i]);

        const double gl = p.boundary_left ? p.boundary_left(tn) : 0.0;
        const double gr = p.boundary_right ? p.boundary_right(tn) : 0.0;
        if (gl != 0.0) rhs[0] += (inv_h2 - (gamma + c) / 12.0) * gl;
        if (gr != 0.0) rhs[mi - 1] += (inv_h2 - (gamma + c) / 12.0) * gr;

        solver_for(n).solve(rhs);

        u.at(n, 0) = gl;
        u.at(n, m) = gr;
        for (std::size_t i = 0; i < mi; ++i) u.at(n, i + 1) = rhs[i];
        push_layer(n);
    }
    return u;
}

/// All-at-once backend: sine-transforms the right-hand side in space, solves
/// one modified lower-triangular Toeplitz time system per spatial mode (the
/// distinct first column is peeled onto the right-hand side, the rest goes
/// through the divide-and-conquer solver against a shared spectra cache),
/// and transforms back. O(N log^2 N) per mode; homogeneous boundaries only.
inline GridField solve_fast(const Problem1D& p, const TimeMesh& tmesh,
                            const SpatialMesh1D& smesh) {
    detail::check_problem(p, tmesh, smesh);
    if (p.boundary_left || p.boundary_right)
        throw std::invalid_argument(
            "solve_fast: needs homogeneous Dirichlet data; use solve_stepping");
    const std::size_t n_steps = tmesh.N;
    const std::size_t m = smesh.M;
    const std::size_t mi = m - 1;
    const double h = smesh.h;

    const auto co = scheme_coefficients(p.spec, tmesh.tau, n_steps);
    std::vector<double> b = assemble_rhs(p, tmesh, smesh, co);

    SineTransformPlan plan(mi);
    for (std::size_t n = 0; n < n_steps; ++n)
        plan.apply_inplace(std::span(b.data() + n * mi, mi));

    std::vector<double> cols(mi * n_steps);
    for (std::size_t n = 0; n < n_steps; ++n)
        for (std::size_t i = 0; i < mi; ++i) cols[i * n_steps + n] = b[n * mi + i];

    const auto lam1 = sine_spectrum({1.0 / 12.0, 10.0 / 12.0, 1.0 / 12.0, mi}).eigenvalues;
    const auto lam2 = sine_spectrum({-1.0, 2.0, -1.0, mi}).eigenvalues;

    std::optional<ToeplitzSpectraCache> cache;
    if (n_steps >= 2)
        cache.emplace(std::span<const double>(co.diagonals).subspan(1), n_steps - 1);

    const double tp = co.tau_power;
    const WorkerPool pool;
    std::vector<std::unique_ptr<TriangularToeplitzSolver>> solvers(pool.workers());
    pool.parallel_for(mi, [&](std::size_t i, std::size_t lane) {
        double* g = cols.data() + i * n_steps;
        const double shift = p.reaction * tp + (tp / (h * h)) * lam2[i] / lam1[i];
        const double inv_l1 = 1.0 / lam1[i];
        for (std::size_t n = 0; n < n_steps; ++n) g[n] *= inv_l1;

        const double d0 = co.diagonals[0] + shift;
        const double c1 = d0 + co.column_excess[0];
        if (c1 == 0.0) throw singular_matrix_error("solve_fast: singular first pivot");
        const double e0 = g[0] / c1;
        for (std::size_t k = 1; k < n_steps; ++k)
            g[k] -= (co.diagonals[k] + co.column_excess[k]) * e0;
        g[0] = e0;
        if (n_steps >= 2) {
            auto& solver = solvers[lane];
            if (!solver) solver = std::make_unique<TriangularToeplitzSolver>(*cache);
            solver->solve(d0, std::span(g + 1, n_steps - 1));
        }
    });

    for (std::size_t n = 0; n < n_steps; ++n)
        for (std::size_t i = 0; i < mi; ++i) b[n * mi + i] = cols[i * n_steps + n];
    for (std::size_t n = 0; n < n_steps; ++n)
        plan.apply_inplace(std::span(b.data() + n * mi, mi));

    GridField u(n_steps + 1, m + 1);
    for (std::size_t i = 0; i <= m; ++i)
        u.at(0, i) = p.initial ? p.initial(smesh.x(i)) : 0.0;
    for (std::size_t n = 1; n <= n_steps; ++n)
        for (std::size_t i = 0; i < mi; ++i) u.at(n, i + 1) = b[(n - 1) * mi + i];
    return u;
}

}  // namespace fracwave
