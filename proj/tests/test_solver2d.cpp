#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "fracwave/manufactured.hpp"
#include "fracwave/solver1d.hpp"
#include "fracwave/solver2d.hpp"

using fracwave::FractionalOrder;
using fracwave::FractionalTerm;
using fracwave::GridField2D;
using fracwave::MultiTermSpec;
using fracwave::Problem2D;
using fracwave::SpatialMesh1D;
using fracwave::SpatialMesh2D;
using fracwave::TimeMesh;

namespace {

constexpr double kPi = 3.14159265358979323846;

MultiTermSpec spec_of(std::initializer_list<std::pair<double, double>> weight_order) {
    std::vector<FractionalTerm> terms;
    for (const auto& [w, o] : weight_order) terms.push_back({w, FractionalOrder(o)});
    return MultiTermSpec(std::move(terms));
}

}  // namespace

TEST_CASE("2d problem validation", "[solver2d]") {
    const TimeMesh tm(1.0, 4);
    const SpatialMesh2D sm{SpatialMesh1D(kPi, 4), SpatialMesh1D(kPi, 4)};

    Problem2D p{kPi, kPi, 1.0, spec_of({{1.0, 1.5}}), nullptr, nullptr, nullptr, 0.0};
    CHECK_THROWS_AS(fracwave::solve_2d_stepping(p, tm, sm), std::invalid_argument);
    CHECK_THROWS_AS(fracwave::solve_2d_fast(p, tm, sm), std::invalid_argument);

    Problem2D q{kPi, kPi, 1.0, spec_of({{1.0, 0.5}}), nullptr, nullptr, nullptr, 0.0};
    const SpatialMesh2D bad{SpatialMesh1D(1.0, 4), SpatialMesh1D(kPi, 4)};
    CHECK_THROWS_AS(fracwave::solve_2d_fast(q, tm, bad), std::invalid_argument);
    CHECK_THROWS_AS(fracwave::solve_2d_fast(q, TimeMesh(2.0, 4), sm), std::invalid_argument);
}

TEST_CASE("2d zero data gives a zero field", "[solver2d]") {
    const TimeMesh tm(1.0, 6);
    const SpatialMesh2D sm{SpatialMesh1D(kPi, 6), SpatialMesh1D(kPi, 5)};
    Problem2D p{kPi, kPi, 1.0, spec_of({{1.0, 0.4}, {1.0, 1.6}}),
                nullptr, nullptr, [](double, double) { return 0.0; }, 0.0};
    CHECK(fracwave::max_abs(fracwave::solve_2d_stepping(p, tm, sm)) == 0.0);
    CHECK(fracwave::max_abs(fracwave::solve_2d_fast(p, tm, sm)) == 0.0);
}

TEST_CASE("2d fast and stepping backends agree", "[solver2d][equivalence]") {
    std::vector<Problem2D> cases;
    std::vector<SpatialMesh2D> meshes;

    cases.push_back(fracwave::two_term_smooth_2d(0.5, 1.5).problem);
    meshes.push_back({SpatialMesh1D(kPi, 8), SpatialMesh1D(kPi, 8)});

    // non-square rectangle, odd node counts, reaction, mixed orders
    cases.push_back({2.0, kPi, 1.0, spec_of({{1.0, 0.4}, {0.5, 1.7}}),
                     [](double x, double y, double t) {
                         return x * (2.0 - x) * y * (kPi - y) * std::exp(-t);
                     },
                     [](double x, double y) { return x * (2.0 - x) * std::sin(y); },
                     [](double x, double y) {
                         return std::sin(kPi * x / 2.0) * y * (kPi - y);
                     },
                     0.8});
    meshes.push_back({SpatialMesh1D(2.0, 9), SpatialMesh1D(kPi, 7)});

    // pure sub-diffusion, no velocity needed
    cases.push_back({kPi, kPi, 1.0, spec_of({{1.0, 0.5}}),
                     [](double x, double y, double t) {
                         return std::sin(x) * std::sin(y) * t;
                     },
                     [](double x, double y) { return std::sin(x) * std::sin(2.0 * y); },
                     nullptr, 0.0});
    meshes.push_back({SpatialMesh1D(kPi, 6), SpatialMesh1D(kPi, 9)});

    // three terms spanning both kernels
    cases.push_back({kPi, kPi, 1.0, spec_of({{0.5, 0.25}, {2.0, 0.9}, {1.0, 1.6}}),
                     [](double x, double y, double t) {
                         return std::sin(x) * std::sin(y) * (1.0 + t * t);
                     },
                     [](double x, double y) { return std::sin(2.0 * x) * std::sin(y); },
                     [](double x, double y) { return std::sin(x) * std::sin(y); },
                     0.3});
    meshes.push_back({SpatialMesh1D(kPi, 8), SpatialMesh1D(kPi, 8)});

    for (std::size_t ci = 0; ci < cases.size(); ++ci) {
        for (const std::size_t n : {8u, 32u}) {
            const TimeMesh tm(cases[ci].horizon, n);
            const auto slow = fracwave::solve_2d_stepping(cases[ci], tm, meshes[ci]);
            const auto fast = fracwave::solve_2d_fast(cases[ci], tm, meshes[ci]);
            const double scale = 1.0 + fracwave::max_abs(slow);
            INFO("case " << ci << " N=" << n);
            CHECK(fracwave::max_abs_difference(fast, slow) <= 1e-10 * scale);
        }
    }
}

TEST_CASE("2d solve of a pure y-mode matches the 1d solve with a shifted reaction",
          "[solver2d][oracle]") {
    // Data of the form F1(x,t) sin(j0 pi y / Ly) stays in that y-mode, and the
    // scheme collapses to the 1D scheme with reaction c + lam2/(lam1 h2^2).
    // This pins the 2D spatial coupling against the independently tested 1D path.
    const std::size_t j0 = 2;
    const std::size_t m2 = 8;
    const double ly = kPi;
    const TimeMesh tm(1.0, 24);
    const SpatialMesh1D sx(kPi, 10);
    const SpatialMesh2D sm{sx, SpatialMesh1D(ly, m2)};
    const double h2 = sm.y.h;
    const double c = 0.4;

    const auto f1 = [](double x, double t) { return std::sin(x) * (1.0 + t * t); };
    const auto p0 = [](double x) { return std::sin(x); };
    const auto p1 = [](double x) { return std::sin(2.0 * x); };
    const auto mode = [&](double y) { return std::sin(j0 * kPi * y / ly); };

    Problem2D p2{kPi, ly, 1.0, spec_of({{0.6, 0.5}, {1.0, 1.4}}),
                 [&](double x, double y, double t) { return f1(x, t) * mode(y); },
                 [&](double x, double y) { return p0(x) * mode(y); },
                 [&](double x, double y) { return p1(x) * mode(y); },
                 c};

    const auto lam1 =
        fracwave::sine_spectrum({1.0 / 12.0, 10.0 / 12.0, 1.0 / 12.0, m2 - 1}).eigenvalues;
    const auto lam2 = fracwave::sine_spectrum({-1.0, 2.0, -1.0, m2 - 1}).eigenvalues;
    const double shifted = c + lam2[j0 - 1] / (lam1[j0 - 1] * h2 * h2);

    fracwave::Problem1D p1d{kPi, 1.0, spec_of({{0.6, 0.5}, {1.0, 1.4}}),
                            f1, p0, p1, nullptr, nullptr, shifted};
    const auto w = fracwave::solve_fast(p1d, tm, sx);

    const auto check = [&](const GridField2D& u) {
        double dev = 0.0, scale = 0.0;
        for (std::size_t n = 1; n <= tm.N; ++n)
            for (std::size_t i = 0; i <= sx.M; ++i)
                for (std::size_t j = 0; j <= m2; ++j) {
                    const double want = w.at(n, i) * mode(sm.y.x(j));
                    dev = std::max(dev, std::abs(u.at(n, i, j) - want));
                    scale = std::max(scale, std::abs(want));
                }
        CHECK(dev <= 1e-9 * (1.0 + scale));
    };
    check(fracwave::solve_2d_fast(p2, tm, sm));
    check(fracwave::solve_2d_stepping(p2, tm, sm));
}

TEST_CASE("separable data stays numerically rank one", "[solver2d]") {
    // sin x sin y is a discrete eigenvector pair, so every level of the
    // solution is exactly a rank-1 tensor up to roundoff; mode mixing would
    // show up as a second singular value.
    const auto m = fracwave::two_term_smooth_2d(0.5, 1.5);
    const TimeMesh tm(0.5, 16);
    const SpatialMesh2D sm{SpatialMesh1D(kPi, 9), SpatialMesh1D(kPi, 7)};
    const auto u = fracwave::solve_2d_fast(m.problem, tm, sm);

    Eigen::MatrixXd a(sm.x.M - 1, sm.y.M - 1);
    for (std::size_t i = 1; i < sm.x.M; ++i)
        for (std::size_t j = 1; j < sm.y.M; ++j)
            a(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(j - 1)) =
                u.at(tm.N, i, j);
    const auto svals = Eigen::JacobiSVD<Eigen::MatrixXd>(a).singularValues();
    REQUIRE(svals.size() >= 2);
    CHECK(svals(0) > 0.1);  // the solution itself is O(1)
    CHECK(svals(1) <= 1e-12 * svals(0));
}

TEST_CASE("2d errors shrink at first order in time", "[solver2d][rates]") {
    const auto m = fracwave::two_term_smooth_2d(0.5, 1.5);
    const SpatialMesh2D sm{SpatialMesh1D(kPi, 16), SpatialMesh1D(kPi, 16)};
    double prev = 0.0;
    for (const std::size_t n : {16u, 32u, 64u}) {
        const TimeMesh tm(0.5, n);
        const auto u = fracwave::solve_2d_fast(m.problem, tm, sm);
        const double e = fracwave::max_error_at_final(u, m.exact, tm, sm);
        if (prev != 0.0) {
            const double order = std::log2(prev / e);
            CHECK(order > 0.8);
            CHECK(order < 1.25);
        }
        prev = e;
    }
}

TEST_CASE("2d errors shrink at fourth order in space", "[solver2d][rates]") {
    const auto m = fracwave::two_term_smooth_2d(0.5, 1.5);
    const TimeMesh tm(0.5, 1u << 15);
    double errors[2];
    const std::size_t meshes[2] = {4, 6};
    for (int k = 0; k < 2; ++k) {
        const SpatialMesh2D sm{SpatialMesh1D(kPi, meshes[k]), SpatialMesh1D(kPi, meshes[k])};
        const auto u = fracwave::solve_2d_fast(m.problem, tm, sm);
        errors[k] = fracwave::max_error_at_final(u, m.exact, tm, sm);
    }
    const double order = std::log(errors[0] / errors[1]) / std::log(6.0 / 4.0);
    CHECK(order > 3.5);
    CHECK(order < 4.5);
}
