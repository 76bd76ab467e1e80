// Command-line experiment runner for the fracwave library: manufactured
// convergence studies (run), quick cross-backend invariant checks (verify),
// and complexity-scaling measurements (bench).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fracwave/distributed.hpp"
#include "fracwave/manufactured.hpp"
#include "fracwave/report.hpp"
#include "fracwave/solver2d.hpp"

namespace {

using fracwave::Backend;
using fracwave::RefineAxis;

struct RunConfig {
    std::string example = "ex1";
    double alpha = 0.5;
    double beta = 1.5;
    double nu = 1.5;
    std::string refine = "time";
    std::vector<std::size_t> resolutions;
    std::size_t m = 16;      // spatial cells on the fixed axis
    std::size_t nt = 65536;  // time steps on the fixed axis
    std::size_t j = 16;      // quadrature resolution on the fixed axis (ex2)
    std::string backend = "fast";
    std::string csv_path;
    std::string md_path;
    std::string svg_path;
    bool with_l2 = false;
};

RefineAxis parse_axis(const std::string& s) {
    if (s == "time") return RefineAxis::time;
    if (s == "space") return RefineAxis::space;
    if (s == "sigma") return RefineAxis::sigma;
    throw std::invalid_argument("unknown refinement axis: " + s +
                                " (expected time|space|sigma)");
}

Backend parse_backend(const std::string& s) {
    if (s == "fast") return Backend::fast;
    if (s == "stepping") return Backend::stepping;
    throw std::invalid_argument("unknown backend: " + s + " (expected fast|stepping)");
}

/// Reference slope drawn in the SVG: the scheme's theoretical rate on the
/// refined axis (O(tau), O(sigma^2), O(h^4)).
double slope_for(RefineAxis axis) {
    switch (axis) {
        case RefineAxis::time: return 1.0;
        case RefineAxis::sigma: return 2.0;
        default: return 4.0;
    }
}

/// Fill run options from a JSON document, keeping any value the command line
/// set explicitly (flags always win over the file).
void apply_config(const CLI::App& cmd, const std::string& path, RunConfig& rc) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    nlohmann::json cfg;
    try {
        in >> cfg;
    } catch (const std::exception& e) {
        throw std::runtime_error("config " + path + ": " + e.what());
    }
    if (!cfg.is_object()) throw std::runtime_error("config " + path + ": expected an object");

    static const char* known[] = {"example", "alpha", "beta",    "nu",  "refine",
                                  "n",       "m",     "nt",      "j",   "backend",
                                  "out",     "md",    "svg",     "l2"};
    for (const auto& item : cfg.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || item.key() == k;
        if (!ok) throw std::runtime_error("config " + path + ": unknown key \"" + item.key() + "\"");
    }

    const auto set = [&](const char* flag, const char* key, auto& slot) {
        using T = std::decay_t<decltype(slot)>;
        if (cmd.count(flag) == 0 && cfg.contains(key)) slot = cfg.at(key).get<T>();
    };
    set("--example", "example", rc.example);
    set("--alpha", "alpha", rc.alpha);
    set("--beta", "beta", rc.beta);
    set("--nu", "nu", rc.nu);
    set("--refine", "refine", rc.refine);
    set("--n", "n", rc.resolutions);
    set("--m", "m", rc.m);
    set("--nt", "nt", rc.nt);
    set("--j", "j", rc.j);
    set("--backend", "backend", rc.backend);
    set("--out", "out", rc.csv_path);
    set("--md", "md", rc.md_path);
    set("--svg", "svg", rc.svg_path);
    set("--l2", "l2", rc.with_l2);
}

fracwave::SolveOutcome measure(const fracwave::GridField& u, const fracwave::SpaceTimeFn& exact,
                               const fracwave::TimeMesh& tm, const fracwave::SpatialMesh1D& sm,
                               bool with_l2) {
    const std::size_t n = u.levels() - 1;
    double emax = 0.0, ss = 0.0;
    for (std::size_t i = 1; i < sm.M; ++i) {
        const double d = std::abs(u.at(n, i) - exact(sm.x(i), tm.t(n)));
        emax = std::max(emax, d);
        ss += d * d;
    }
    if (!with_l2) return emax;
    return {emax, std::sqrt(sm.h * ss)};
}

fracwave::SolveOutcome measure(const fracwave::GridField2D& u,
                               const fracwave::SpaceTimeFn2D& exact,
                               const fracwave::TimeMesh& tm, const fracwave::SpatialMesh2D& sm,
                               bool with_l2) {
    const std::size_t n = u.levels() - 1;
    const double t = tm.t(n);
    double emax = 0.0, ss = 0.0;
    for (std::size_t i = 1; i < sm.x.M; ++i)
        for (std::size_t j = 1; j < sm.y.M; ++j) {
            const double d = std::abs(u.at(n, i, j) - exact(sm.x.x(i), sm.y.x(j), t));
            emax = std::max(emax, d);
            ss += d * d;
        }
    if (!with_l2) return emax;
    return {emax, std::sqrt(sm.x.h * sm.y.h * ss)};
}

fracwave::ConvergenceReport run_experiment(const RunConfig& rc) {
    const RefineAxis axis = parse_axis(rc.refine);
    const Backend backend = parse_backend(rc.backend);
    if (rc.resolutions.empty())
        throw std::invalid_argument(
            "no resolutions given: pass --n 16,32,64,... or \"n\" in the config");
    const std::span<const std::size_t> rs(rc.resolutions);

    if (rc.example == "ex1" || rc.example == "lowreg") {
        if (axis == RefineAxis::sigma)
            throw std::invalid_argument("sigma refinement needs --example ex2");
        const auto m = rc.example == "ex1"
                           ? fracwave::two_term_smooth(rc.alpha, rc.beta)
                           : fracwave::low_regularity(rc.nu, rc.alpha, rc.beta);
        return fracwave::run_refinement(
            axis, rs,
            [&](std::size_t r) {
                const fracwave::TimeMesh tm(m.problem.horizon,
                                            axis == RefineAxis::time ? r : rc.nt);
                const fracwave::SpatialMesh1D sm(m.problem.length,
                                                 axis == RefineAxis::space ? r : rc.m);
                const auto u = fracwave::solve(m.problem, tm, sm, backend);
                return measure(u, m.exact, tm, sm, rc.with_l2);
            },
            rc.with_l2);
    }
    if (rc.example == "ex2") {
        return fracwave::run_refinement(
            axis, rs,
            [&](std::size_t r) {
                const auto m = fracwave::distributed_cubic(axis == RefineAxis::sigma ? r : rc.j);
                const fracwave::TimeMesh tm(m.shell.horizon,
                                            axis == RefineAxis::time ? r : rc.nt);
                const fracwave::SpatialMesh1D sm(m.shell.length,
                                                 axis == RefineAxis::space ? r : rc.m);
                const auto u =
                    fracwave::solve_distributed(m.distribution, m.shell, tm, sm, backend);
                return measure(u, m.exact, tm, sm, rc.with_l2);
            },
            rc.with_l2);
    }
    if (rc.example == "ex3") {
        if (axis == RefineAxis::sigma)
            throw std::invalid_argument("sigma refinement needs --example ex2");
        const auto m = fracwave::two_term_smooth_2d(rc.alpha, rc.beta);
        return fracwave::run_refinement(
            axis, rs,
            [&](std::size_t r) {
                const fracwave::TimeMesh tm(m.problem.horizon,
                                            axis == RefineAxis::time ? r : rc.nt);
                const std::size_t cells = axis == RefineAxis::space ? r : rc.m;
                const fracwave::SpatialMesh2D sm{{m.problem.length_x, cells},
                                                 {m.problem.length_y, cells}};
                const auto u = backend == Backend::fast
                                   ? fracwave::solve_2d_fast(m.problem, tm, sm)
                                   : fracwave::solve_2d_stepping(m.problem, tm, sm);
                return measure(u, m.exact, tm, sm, rc.with_l2);
            },
            rc.with_l2);
    }
    throw std::invalid_argument("unknown example id: " + rc.example +
                                " (expected ex1|ex2|ex3|lowreg)");
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + path);
}

int cmd_run(const RunConfig& rc) {
    const auto report = run_experiment(rc);
    std::fputs(fracwave::to_markdown(report).c_str(), stdout);
    if (!rc.csv_path.empty()) {
        write_file(rc.csv_path, fracwave::to_csv(report));
        std::fprintf(stderr, "wrote %s\n", rc.csv_path.c_str());
    }
    if (!rc.md_path.empty()) {
        write_file(rc.md_path, fracwave::to_markdown(report));
        std::fprintf(stderr, "wrote %s\n", rc.md_path.c_str());
    }
    if (!rc.svg_path.empty()) {
        write_file(rc.svg_path, fracwave::to_svg(report, slope_for(parse_axis(rc.refine))));
        std::fprintf(stderr, "wrote %s\n", rc.svg_path.c_str());
    }
    return 0;
}

// --- verify: fast invariant checks that cross-validate the two backends ---

double rel_diff(const fracwave::GridField& a, const fracwave::GridField& b) {
    double d = 0.0, scale = 0.0;
    for (std::size_t n = 0; n < a.levels(); ++n)
        for (std::size_t i = 0; i < a.nodes(); ++i) {
            d = std::max(d, std::abs(a.at(n, i) - b.at(n, i)));
            scale = std::max(scale, std::abs(a.at(n, i)));
        }
    return d / (1.0 + scale);
}

double rel_diff(const fracwave::GridField2D& a, const fracwave::GridField2D& b) {
    double d = 0.0, scale = 0.0;
    for (std::size_t n = 0; n < a.levels(); ++n) {
        const auto ua = a.level(n);
        const auto ub = b.level(n);
        for (std::size_t i = 0; i < ua.size(); ++i) {
            d = std::max(d, std::abs(ua[i] - ub[i]));
            scale = std::max(scale, std::abs(ua[i]));
        }
    }
    return d / (1.0 + scale);
}

int cmd_verify() {
    int failures = 0;
    const auto check = [&](const char* name, bool ok, const std::string& detail) {
        std::printf("%s  %-36s %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
        if (!ok) ++failures;
    };
    const auto sci = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.1e", v);
        return std::string(buf);
    };

    {
        const auto m = fracwave::two_term_smooth(0.5, 1.5);
        const fracwave::TimeMesh tm(1.0, 64);
        const fracwave::SpatialMesh1D sm(m.problem.length, 16);
        const double d = rel_diff(fracwave::solve_stepping(m.problem, tm, sm),
                                  fracwave::solve_fast(m.problem, tm, sm));
        check("1d backend equivalence", d <= 1e-11, "max rel diff " + sci(d) + " (tol 1e-11)");
    }
    {
        const auto m = fracwave::two_term_smooth_2d(0.5, 1.5);
        const fracwave::TimeMesh tm(m.problem.horizon, 8);
        const fracwave::SpatialMesh2D sm{{m.problem.length_x, 8}, {m.problem.length_y, 8}};
        const double d = rel_diff(fracwave::solve_2d_stepping(m.problem, tm, sm),
                                  fracwave::solve_2d_fast(m.problem, tm, sm));
        check("2d backend equivalence", d <= 1e-11, "max rel diff " + sci(d) + " (tol 1e-11)");
    }
    {
        const auto m = fracwave::distributed_cubic(3);
        const fracwave::TimeMesh tm(m.shell.horizon, 32);
        const fracwave::SpatialMesh1D sm(m.shell.length, 12);
        const auto composed =
            fracwave::solve_distributed(m.distribution, m.shell, tm, sm, Backend::fast);
        const fracwave::Problem1D p{m.shell.length,
                                    m.shell.horizon,
                                    fracwave::discretize_distribution(m.distribution),
                                    m.shell.source,
                                    m.shell.initial,
                                    m.shell.initial_velocity,
                                    m.shell.boundary_left,
                                    m.shell.boundary_right,
                                    m.shell.reaction};
        const double d = rel_diff(composed, fracwave::solve_fast(p, tm, sm));
        check("distributed composition", d == 0.0, "max rel diff " + sci(d) + " (exact)");
    }
    {
        const fracwave::MultiTermSpec spec({{0.7, fracwave::FractionalOrder(0.3)},
                                            {1.3, fracwave::FractionalOrder(0.9)},
                                            {0.5, fracwave::FractionalOrder(1.2)},
                                            {2.0, fracwave::FractionalOrder(1.8)}});
        const auto co = fracwave::scheme_coefficients(spec, 0.05, 64);
        double row = 0.0, worst = 0.0;
        for (std::size_t n = 0; n < 64; ++n) {
            row += co.diagonals[n];
            worst = std::max(worst, std::abs(row + co.column_excess[n] - co.initial_weight[n]) /
                                        std::abs(co.initial_weight[n]));
        }
        check("kernel row-sum identity", worst <= 1e-13, "max rel residual " + sci(worst) + " (tol 1e-13)");
    }
    {
        std::mt19937 rng(97531u);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        double worst = 0.0;
        for (const std::size_t m : {63u, 64u, 1023u}) {
            fracwave::SineTransformPlan plan(m);
            std::vector<double> v(m), w(m);
            for (auto& x : v) x = dist(rng);
            plan.apply(v, w);
            plan.apply_inplace(w);
            for (std::size_t i = 0; i < m; ++i)
                worst = std::max(worst, std::abs(v[i] - w[i]));
        }
        check("sine transform involution", worst <= 1e-12, "max abs diff " + sci(worst) + " (tol 1e-12)");
    }

    std::printf("%s\n", failures == 0 ? "all checks passed" : "some checks FAILED");
    return failures == 0 ? 0 : 1;
}

// --- bench: wall-clock scaling of the two backends under N doubling ---

struct BenchConfig {
    std::vector<std::size_t> sizes{16384, 32768, 65536, 131072};
    std::size_t m = 16;
    std::size_t stepping_max = 65536;
    bool skip_stepping = false;
};

int cmd_bench(const BenchConfig& bc) {
    const auto m = fracwave::two_term_smooth(0.5, 1.5);
    const fracwave::SpatialMesh1D sm(m.problem.length, bc.m);
    std::printf("two-term (0.5, 1.5), M = %zu cells; seconds per solve and ratio per row\n",
                bc.m);
    std::printf("%-10s %-10s %-12s %s\n", "backend", "N", "seconds", "ratio");

    const auto time_solve = [&](Backend backend, std::size_t n) {
        const fracwave::TimeMesh tm(m.problem.horizon, n);
        const auto start = std::chrono::steady_clock::now();
        const auto u = fracwave::solve(m.problem, tm, sm, backend);
        const auto stop = std::chrono::steady_clock::now();
        // touch the result so the solve cannot be elided
        volatile double sink = u.at(n, sm.M / 2);
        (void)sink;
        return std::chrono::duration<double>(stop - start).count();
    };

    for (const Backend backend : {Backend::fast, Backend::stepping}) {
        if (backend == Backend::stepping && bc.skip_stepping) continue;
        double prev = 0.0;
        for (const std::size_t n : bc.sizes) {
            if (backend == Backend::stepping && n > bc.stepping_max) continue;
            const double s = time_solve(backend, n);
            if (prev > 0.0)
                std::printf("%-10s %-10zu %-12.3f %.2f\n",
                            backend == Backend::fast ? "fast" : "stepping", n, s, s / prev);
            else
                std::printf("%-10s %-10zu %-12.3f -\n",
                            backend == Backend::fast ? "fast" : "stepping", n, s);
            prev = s;
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "fracwave: compact-difference solvers for multi-term and distributed-order\n"
        "time-fractional mixed diffusion-wave equations"};
    app.require_subcommand(1);
    app.footer(
        "Environment:\n"
        "  FRACWAVE_THREADS   cap the solver worker pool (default: hardware concurrency)\n"
        "\n"
        "Examples:\n"
        "  fracwave run --example ex1 --alpha 0.5 --beta 1.5 --refine time \\\n"
        "               --n 16,32,64,128 --backend fast --out report.csv\n"
        "  fracwave run --example ex2 --refine sigma --n 2,4,6,8 --nt 65536 --svg orders.svg\n"
        "  fracwave verify\n"
        "  fracwave bench --sizes 16384,32768,65536");

    RunConfig rc;
    std::string config_path;
    auto* run = app.add_subcommand("run", "run a manufactured convergence study");
    run->add_option("--config", config_path, "JSON config file (flags override its values)");
    run->add_option("--example", rc.example,
                    "problem id: ex1 (1d two-term), ex2 (1d distributed-order), "
                    "ex3 (2d two-term), lowreg (1d low-regularity)");
    run->add_option("--alpha", rc.alpha, "sub-diffusive order in (0, 1]")
        ->check(CLI::Range(0.0, 1.0).description("(0, 1]"));
    run->add_option("--beta", rc.beta, "wave-type order in (1, 2]")
        ->check(CLI::Range(1.0, 2.0).description("(1, 2]"));
    run->add_option("--nu", rc.nu, "time regularity exponent for lowreg (u ~ t^nu)");
    run->add_option("--refine", rc.refine, "refined axis: time | space | sigma");
    run->add_option("--n", rc.resolutions, "strictly increasing resolution list, e.g. 16,32,64")
        ->delimiter(',');
    run->add_option("--m", rc.m, "spatial cells when space is not refined (default 16)");
    run->add_option("--nt", rc.nt, "time steps when time is not refined (default 65536)");
    run->add_option("--j", rc.j,
                    "quadrature resolution when sigma is not refined (sigma = 1/J; default 16)");
    run->add_option("--backend", rc.backend, "fast | stepping (default fast)");
    run->add_option("--out", rc.csv_path, "write the report as CSV");
    run->add_option("--md", rc.md_path, "write the report as a markdown table");
    run->add_option("--svg", rc.svg_path, "write a log-log error plot with a reference slope");
    run->add_flag("--l2", rc.with_l2, "also record the discrete L2 error");

    auto* verify = app.add_subcommand("verify", "run quick cross-backend invariant checks");

    BenchConfig bc;
    auto* bench = app.add_subcommand("bench", "measure solver scaling under N doubling");
    bench->add_option("--sizes", bc.sizes, "time-step counts to run, e.g. 16384,32768")
        ->delimiter(',');
    bench->add_option("--m", bc.m, "spatial cells (default 16)");
    bench->add_option("--stepping-max", bc.stepping_max,
                      "largest N the stepping backend runs (default 65536)");
    bench->add_flag("--skip-stepping", bc.skip_stepping, "bench the fast backend only");

    try {
        app.parse(argc, argv);
        if (run->parsed()) {
            if (!config_path.empty()) apply_config(*run, config_path, rc);
            return cmd_run(rc);
        }
        if (verify->parsed()) return cmd_verify();
        if (bench->parsed()) return cmd_bench(bc);
        return 0;
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "fracwave: error: %s\n", e.what());
        return 1;
    }
}
