#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "fracwave/report.hpp"

using fracwave::ConvergenceReport;
using fracwave::ConvergenceRow;
using fracwave::RefineAxis;
using fracwave::SolveOutcome;

TEST_CASE("observed order reproduces published table arithmetic", "[report]") {
    // halving the step: errors 4.4722e-2 -> 2.2796e-2 give order near 0.9722
    // (the reference value was computed from unrounded errors, hence the
    // millimeter of slack)
    CHECK(fracwave::observed_order(4.4722e-2, 2.2796e-2, 16, 32) ==
          Catch::Approx(0.9722).margin(1e-3));
    // spatial ratio 6/4: 1.0743e-3 -> 2.1008e-4 gives 4.0248 on the nose
    CHECK(fracwave::observed_order(1.0743e-3, 2.1008e-4, 4, 6) ==
          Catch::Approx(4.0248).margin(5e-4));

    CHECK(std::isnan(fracwave::observed_order(0.0, 1e-3, 4, 8)));
    CHECK(std::isnan(fracwave::observed_order(1e-3, 0.0, 4, 8)));
    CHECK(std::isnan(fracwave::observed_order(1e-3, 1e-4, 8, 8)));
}

TEST_CASE("refinement runner records rows, orders, and timings", "[report]") {
    const std::vector<std::size_t> res{8, 16, 32, 64};
    const auto report = fracwave::run_refinement(
        RefineAxis::time, res, [](std::size_t r) {
            const double h = 1.0 / static_cast<double>(r);
            return SolveOutcome(h * h);
        });
    REQUIRE(report.rows.size() == 4);
    CHECK(std::isnan(report.rows[0].order));
    for (std::size_t k = 1; k < 4; ++k)
        CHECK(report.rows[k].order == Catch::Approx(2.0).margin(1e-12));
    for (const auto& row : report.rows) CHECK(row.cpu_seconds >= 0.0);
    CHECK(report.rows[2].resolution == 32);
}

TEST_CASE("refinement runner validates its resolution list", "[report]") {
    const auto solve = [](std::size_t) { return SolveOutcome(1.0); };
    CHECK_THROWS_AS(fracwave::run_refinement(RefineAxis::time,
                                             std::vector<std::size_t>{16}, solve),
                    std::invalid_argument);
    CHECK_THROWS_AS(fracwave::run_refinement(RefineAxis::time,
                                             std::vector<std::size_t>{16, 16}, solve),
                    std::invalid_argument);
    CHECK_THROWS_AS(fracwave::run_refinement(RefineAxis::time,
                                             std::vector<std::size_t>{32, 16}, solve),
                    std::invalid_argument);
}

TEST_CASE("solver failures carry the offending row", "[report]") {
    const std::vector<std::size_t> res{8, 16};
    try {
        fracwave::run_refinement(RefineAxis::space, res, [](std::size_t r) -> SolveOutcome {
            if (r == 16) throw std::domain_error("boom");
            return SolveOutcome(1.0);
        });
        FAIL("expected a throw");
    } catch (const std::runtime_error& e) {
        const std::string msg = e.what();
        CHECK(msg.find("M=16") != std::string::npos);
        CHECK(msg.find("boom") != std::string::npos);
    }
}

TEST_CASE("csv layout matches the published schema", "[report]") {
    ConvergenceReport r;
    r.axis = RefineAxis::time;
    r.rows.push_back({16, 4.4722e-2, std::nan(""), 1.25e-3, std::nan("")});
    r.rows.push_back({32, 2.2796e-2, 0.9722, 2.5e-3, std::nan("")});
    const std::string csv = fracwave::to_csv(r);
    CHECK(csv ==
          "resolution,error,order,cpu_seconds\n"
          "16,4.4722e-02,,1.2500e-03\n"
          "32,2.2796e-02,0.9722,2.5000e-03\n");

    // single-row report: header plus one row, order empty
    ConvergenceReport one;
    one.rows.push_back({16, 1.0e-3, std::nan(""), 1.0e-3, std::nan("")});
    const std::string c1 = fracwave::to_csv(one);
    CHECK(c1 == "resolution,error,order,cpu_seconds\n16,1.0000e-03,,1.0000e-03\n");

    // zero-error rows keep the error column and blank the order
    ConvergenceReport z;
    z.rows.push_back({8, 0.0, std::nan(""), 1.0e-4, std::nan("")});
    z.rows.push_back({16, 0.0, std::nan(""), 2.0e-4, std::nan("")});
    const std::string cz = fracwave::to_csv(z);
    CHECK(cz.find("8,0.0000e+00,,") != std::string::npos);

    CHECK_THROWS_AS(fracwave::to_csv(ConvergenceReport{}), std::invalid_argument);
}

TEST_CASE("csv grows an l2 column only on request", "[report]") {
    ConvergenceReport r;
    r.with_l2 = true;
    r.rows.push_back({16, 1.0e-2, std::nan(""), 1.0e-3, 4.0e-3});
    const std::string csv = fracwave::to_csv(r);
    CHECK(csv ==
          "resolution,error,order,cpu_seconds,l2_error\n"
          "16,1.0000e-02,,1.0000e-03,4.0000e-03\n");
}

TEST_CASE("markdown table mirrors the csv", "[report]") {
    ConvergenceReport r;
    r.axis = RefineAxis::space;
    r.rows.push_back({4, 1.0743e-3, std::nan(""), 1.0e-3, std::nan("")});
    r.rows.push_back({6, 2.1008e-4, 4.0248, 2.0e-3, std::nan("")});
    const std::string md = fracwave::to_markdown(r);
    CHECK(md.find("| M | error | order | cpu (s) |") == 0);
    CHECK(md.find("| 4 | 1.0743e-03 | — |") != std::string::npos);
    CHECK(md.find("| 6 | 2.1008e-04 | 4.0248 |") != std::string::npos);
}

TEST_CASE("svg chart carries data and the reference slope", "[report]") {
    ConvergenceReport r;
    r.axis = RefineAxis::time;
    double e = 4.0e-2;
    for (const std::size_t n : {16u, 32u, 64u, 128u}) {
        ConvergenceRow row;
        row.resolution = n;
        row.error = e;
        row.cpu_seconds = 1e-3;
        r.rows.push_back(row);
        e /= 2.0;
    }
    const std::string svg = fracwave::to_svg(r, 1.0);
    CHECK(svg.find("<svg") == 0);
    CHECK(svg.find("polyline") != std::string::npos);
    CHECK(svg.find("slope 1") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);

    // all-zero errors degrade to a message, not a crash
    ConvergenceReport z;
    z.rows.push_back({8, 0.0, std::nan(""), 1.0e-4, std::nan("")});
    z.rows.push_back({16, 0.0, std::nan(""), 1.0e-4, std::nan("")});
    const std::string sz = fracwave::to_svg(z, 4.0);
    CHECK(sz.find("<svg") == 0);
    CHECK(sz.find("not enough positive errors") != std::string::npos);
}
