#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fracwave {

enum class RefineAxis { time, space, sigma };

/// Column header of the resolution being refined: time steps N, spatial
/// cells M, or quadrature resolution J.
inline const char* axis_label(RefineAxis axis) {
    switch (axis) {
        case RefineAxis::time: return "N";
        case RefineAxis::space: return "M";
        default: return "J";
    }
}

/// What one solve reports back to the refinement runner. Implicit from a
/// plain max error; the L2 slot stays NaN unless the caller fills it.
struct SolveOutcome {
    double max_error = std::numeric_limits<double>::quiet_NaN();
    double l2_error = std::numeric_limits<double>::quiet_NaN();

    SolveOutcome() = default;
    SolveOutcome(double e) : max_error(e) {}  // NOLINT: implicit by design
    SolveOutcome(double e, double l2) : max_error(e), l2_error(l2) {}
};

struct ConvergenceRow {
    std::size_t resolution = 0;
    double error = std::numeric_limits<double>::quiet_NaN();
    double order = std::numeric_limits<double>::quiet_NaN();  // NaN on row one
    double cpu_seconds = std::numeric_limits<double>::quiet_NaN();
    double l2_error = std::numeric_limits<double>::quiet_NaN();
};

struct ConvergenceReport {
    RefineAxis axis = RefineAxis::time;
    bool with_l2 = false;
    std::vector<ConvergenceRow> rows;
};

/// log(E_prev/E_cur) / log(r_cur/r_prev); NaN whenever either error is zero,
/// negative, or non-finite (zero-error exact reproductions stay unmarked).
inline double observed_order(double e_prev, double e_cur, double r_prev, double r_cur) {
    if (!(e_prev > 0.0) || !(e_cur > 0.0) || !std::isfinite(e_prev) ||
        !std::isfinite(e_cur) || !(r_cur > 0.0) || !(r_prev > 0.0) || r_cur == r_prev)
        return std::numeric_limits<double>::quiet_NaN();
    return std::log(e_prev / e_cur) / std::log(r_cur / r_prev);
}

/// Runs `solve` once per resolution (sequentially, so the recorded wall times
/// are honest), collecting errors and observed orders. The resolution list
/// must be strictly increasing with at least two entries. Solver failures are
/// rethrown with the offending row attached.
template <class Solve>
ConvergenceReport run_refinement(RefineAxis axis, std::span<const std::size_t> resolutions,
                                 Solve&& solve, bool with_l2 = false) {
    if (resolutions.size() < 2)
        throw std::invalid_argument("run_refinement: need at least two resolutions");
    for (std::size_t k = 1; k < resolutions.size(); ++k)
        if (resolutions[k] <= resolutions[k - 1])
            throw std::invalid_argument("run_refinement: resolutions must strictly increase");

    ConvergenceReport report;
    report.axis = axis;
    report.with_l2 = with_l2;
    report.rows.reserve(resolutions.size());
    for (const std::size_t r : resolutions) {
        SolveOutcome out;
        const auto start = std::chrono::steady_clock::now();
        try {
            out = solve(r);
        } catch (const std::exception& e) {
            throw std::runtime_error("refinement row " + std::string(axis_label(axis)) +
                                     "=" + std::to_string(r) + ": " + e.what());
        }
        const auto stop = std::chrono::steady_clock::now();

        ConvergenceRow row;
        row.resolution = r;
        row.error = out.max_error;
        row.l2_error = out.l2_error;
        row.cpu_seconds = std::chrono::duration<double>(stop - start).count();
        if (!report.rows.empty()) {
            const auto& prev = report.rows.back();
            row.order = observed_order(prev.error, row.error,
                                       static_cast<double>(prev.resolution),
                                       static_cast<double>(r));
        }
        report.rows.push_back(row);
    }
    return report;
}

namespace detail {

inline std::string format(const char* spec, double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

inline std::string sci5(double v) { return format("%.4e", v); }
inline std::string fixed4(double v) { return format("%.4f", v); }

}  // namespace detail

/// CSV with columns `resolution,error,order,cpu_seconds` (plus `l2_error`
/// when the report carries one); errors in 5-significant-digit scientific
/// notation, undefined orders as empty fields.
inline std::string to_csv(const ConvergenceReport& report) {
    if (report.rows.empty()) throw std::invalid_argument("to_csv: empty report");
    std::string out = "resolution,error,order,cpu_seconds";
    if (report.with_l2) out += ",l2_error";
    out += '\n';
    for (const auto& row : report.rows) {
        out += std::to_string(row.resolution);
        out += ',';
        if (std::isfinite(row.error)) out += detail::sci5(row.error);
        out += ',';
        if (std::isfinite(row.order)) out += detail::fixed4(row.order);
        out += ',';
        if (std::isfinite(row.cpu_seconds)) out += detail::sci5(row.cpu_seconds);
        if (report.with_l2) {
            out += ',';
            if (std::isfinite(row.l2_error)) out += detail::sci5(row.l2_error);
        }
        out += '\n';
    }
    return out;
}

/// Markdown table mirroring the CSV layout.
inline std::string to_markdown(const ConvergenceReport& report) {
    if (report.rows.empty()) throw std::invalid_argument("to_markdown: empty report");
    std::string out = "| ";
    out += axis_label(report.axis);
    out += " | error | order | cpu (s) |";
    if (report.with_l2) out += " l2 error |";
    out += "\n|--:|--:|--:|--:|";
    if (report.with_l2) out += "--:|";
    out += '\n';
    for (const auto& row : report.rows) {
        out += "| " + std::to_string(row.resolution) + " | ";
        out += std::isfinite(row.error) ? detail::sci5(row.error) : std::string("—");
        out += " | ";
        out += std::isfinite(row.order) ? detail::fixed4(row.order) : std::string("—");
        out += " | ";
        out += std::isfinite(row.cpu_seconds) ? detail::sci5(row.cpu_seconds)
                                              : std::string("—");
        out += " |";
        if (report.with_l2) {
            out += ' ';
            out += std::isfinite(row.l2_error) ? detail::sci5(row.l2_error)
                                               : std::string("—");
            out += " |";
        }
        out += '\n';
    }
    return out;
}

/// Log-log error-vs-resolution chart with a dashed reference line of the
/// given slope anchored at the first data point. Self-contained SVG.
inline std::string to_svg(const ConvergenceReport& report, double reference_slope) {
    if (report.rows.empty()) throw std::invalid_argument("to_svg: empty report");

    std::vector<std::pair<double, double>> pts;  // (log10 r, log10 E)
    for (const auto& row : report.rows)
        if (std::isfinite(row.error) && row.error > 0.0)
            pts.emplace_back(std::log10(static_cast<double>(row.resolution)),
                             std::log10(row.error));

    const double width = 640.0, height = 440.0;
    const double ml = 86.0, mr = 24.0, mt = 24.0, mb = 58.0;
    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" "
                      "height=\"440\" viewBox=\"0 0 640 440\" "
                      "font-family=\"sans-serif\" font-size=\"12\">\n"
                      "<rect width=\"640\" height=\"440\" fill=\"white\"/>\n";

    if (pts.size() < 2) {
        svg += "<text x=\"320\" y=\"220\" text-anchor=\"middle\">not enough positive "
               "errors to plot</text>\n</svg>\n";
        return svg;
    }

    double x0 = pts.front().first, x1 = pts.back().first;
    double y0 = pts.front().second, y1 = pts.front().second;
    for (const auto& [px, py] : pts) {
        y0 = std::min(y0, py);
        y1 = std::max(y1, py);
    }
    // room for the reference line above the data
    y1 = std::max(y1, pts.front().second + std::log10(1.6));
    const double padx = 0.04 * (x1 - x0 + 1e-12), pady = 0.08 * (y1 - y0 + 1e-12);
    x0 -= padx;
    x1 += padx;
    y0 -= pady;
    y1 += pady;

    const auto sx = [&](double lx) { return ml + (lx - x0) / (x1 - x0) * (width - ml - mr); };
    const auto sy = [&](double ly) {
        return height - mb - (ly - y0) / (y1 - y0) * (height - mt - mb);
    };
    const auto num = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.1f", v);
        return std::string(buf);
    };

    // frame
    svg += "<rect x=\"" + num(ml) + "\" y=\"" + num(mt) + "\" width=\"" +
           num(width - ml - mr) + "\" height=\"" + num(height - mt - mb) +
           "\" fill=\"none\" stroke=\"#888\"/>\n";

    // y ticks at integer decades
    for (int d = static_cast<int>(std::ceil(y0)); d <= static_cast<int>(std::floor(y1)); ++d) {
        const double py = sy(d);
        svg += "<line x1=\"" + num(ml) + "\" y1=\"" + num(py) + "\" x2=\"" +
               num(width - mr) + "\" y2=\"" + num(py) +
               "\" stroke=\"#ddd\" stroke-width=\"1\"/>\n";
        svg += "<text x=\"" + num(ml - 8.0) + "\" y=\"" + num(py + 4.0) +
               "\" text-anchor=\"end\">1e" + std::to_string(d) + "</text>\n";
    }
    // x ticks at the data resolutions
    const std::size_t stride = (report.rows.size() > 6) ? 2 : 1;
    for (std::size_t k = 0; k < report.rows.size(); k += stride) {
        const double lx = std::log10(static_cast<double>(report.rows[k].resolution));
        const double px = sx(lx);
        svg += "<line x1=\"" + num(px) + "\" y1=\"" + num(height - mb) + "\" x2=\"" +
               num(px) + "\" y2=\"" + num(height - mb + 5.0) + "\" stroke=\"#888\"/>\n";
        svg += "<text x=\"" + num(px) + "\" y=\"" + num(height - mb + 20.0) +
               "\" text-anchor=\"middle\">" + std::to_string(report.rows[k].resolution) +
               "</text>\n";
    }
    // axis labels
    svg += "<text x=\"" + num(ml + (width - ml - mr) / 2.0) + "\" y=\"" +
           num(height - 12.0) + "\" text-anchor=\"middle\">" + axis_label(report.axis) +
           "</text>\n";
    svg += "<text x=\"20\" y=\"" + num(mt + (height - mt - mb) / 2.0) +
           "\" text-anchor=\"middle\" transform=\"rotate(-90 20 " +
           num(mt + (height - mt - mb) / 2.0) + ")\">max error</text>\n";

    // reference slope anchored 1.4x above the first data point
    const double anchor = pts.front().second + std::log10(1.4);
    const double lx0 = pts.front().first, lx1 = pts.back().first;
    svg += "<line x1=\"" + num(sx(lx0)) + "\" y1=\"" + num(sy(anchor)) + "\" x2=\"" +
           num(sx(lx1)) + "\" y2=\"" + num(sy(anchor - reference_slope * (lx1 - lx0))) +
           "\" stroke=\"#c0392b\" stroke-dasharray=\"6 4\" stroke-width=\"1.5\"/>\n";
    svg += "<text x=\"" + num(sx(lx1) - 4.0) + "\" y=\"" +
           num(sy(anchor - reference_slope * (lx1 - lx0)) - 8.0) +
           "\" text-anchor=\"end\" fill=\"#c0392b\">slope " +
           detail::format("%.0f", reference_slope) + "</text>\n";

    // data polyline and markers
    std::string path;
    for (const auto& [px, py] : pts)
        path += num(sx(px)) + "," + num(sy(py)) + " ";
    svg += "<polyline points=\"" + path +
           "\" fill=\"none\" stroke=\"#2c5f8a\" stroke-width=\"2\"/>\n";
    for (const auto& [px, py] : pts)
        svg += "<circle cx=\"" + num(sx(px)) + "\" cy=\"" + num(sy(py)) +
               "\" r=\"3.5\" fill=\"#2c5f8a\"/>\n";

    svg += "</svg>\n";
    return svg;
}

}  // namespace fracwave
