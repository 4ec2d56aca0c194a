#pragma once

/**
 * @file io.hpp
 * @brief Text outputs: convergence CSV, log-log error plot (SVG), mesh,
 *        system and solution dumps. All writers are deterministic.
 */

#include "nitsche/analysis.hpp"
#include "nitsche/assembly.hpp"
#include "nitsche/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace nitsche {

inline constexpr const char* convergence_csv_header = "level,h,elements,dofs,l2_error,eoc";

/// CSV with 16 significant digits; the eoc column is empty where undefined.
inline void write_convergence_csv(const ConvergenceTable& table, std::ostream& os)
{
    os << convergence_csv_header << '\n';
    os << std::setprecision(16);
    for (const auto& r : table.records) {
        os << r.level << ',' << r.h << ',' << r.elements << ',' << r.dofs << ',' << r.l2_error << ',';
        if (r.eoc) os << *r.eoc;
        os << '\n';
    }
}

[[nodiscard]] inline std::string convergence_csv(const ConvergenceTable& table)
{
    std::ostringstream os;
    write_convergence_csv(table, os);
    return os.str();
}

/**
 * Mesh dump. Sections "nodes" (index x y), "elements" (index n0 n1 n2 [n3])
 * and "boundary" (n0 n1 edge), each preceded by its entry count.
 */
inline void write_mesh(const Mesh& mesh, std::ostream& os)
{
    os << std::setprecision(17);
    os << "nodes " << mesh.node_count() << '\n';
    for (std::size_t i = 0; i < mesh.node_count(); ++i)
        os << i << ' ' << mesh.nodes()[i].x << ' ' << mesh.nodes()[i].y << '\n';
    os << "elements " << mesh.element_count() << '\n';
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
        os << e;
        for (const std::size_t n : mesh.element(e)) os << ' ' << n;
        os << '\n';
    }
    os << "boundary " << mesh.boundary_facets().size() << '\n';
    for (const auto& f : mesh.boundary_facets())
        os << f.nodes[0] << ' ' << f.nodes[1] << ' ' << f.boundary_edge << '\n';
}

/// Matrix in MatrixMarket coordinate form (1-based "row col value").
inline void write_matrix(const CsrMatrix& a, std::ostream& os)
{
    os << "%%MatrixMarket matrix coordinate real general\n";
    os << a.rows() << ' ' << a.rows() << ' ' << a.nonzeros() << '\n';
    os << std::setprecision(17);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k)
            os << i + 1 << ' ' << a.cols()[k] + 1 << ' ' << a.values()[k] << '\n';
}

/// Right-hand side as 1-based "index value" lines.
inline void write_rhs(const std::vector<double>& b, std::ostream& os)
{
    os << std::setprecision(17);
    for (std::size_t i = 0; i < b.size(); ++i) os << i + 1 << ' ' << b[i] << '\n';
}

/**
 * Samples u_h on the centres of an nx x ny grid over the domain's bounding
 * box; centres outside the domain are skipped. Columns x,y,u_h.
 */
inline void write_solution_samples(const DiscreteSolution& sol, std::size_t nx, std::size_t ny, std::ostream& os)
{
    const auto& v = sol.mesh().domain().vertices();
    Point2 lo = v.front(), hi = v.front();
    for (const Point2 p : v) {
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
    }
    os << "x,y,u_h\n" << std::setprecision(16);
    for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t i = 0; i < nx; ++i) {
            const Point2 p{lo.x + (hi.x - lo.x) * (static_cast<double>(i) + 0.5) / static_cast<double>(nx),
                           lo.y + (hi.y - lo.y) * (static_cast<double>(j) + 0.5) / static_cast<double>(ny)};
            if (!sol.mesh().domain().contains(p)) continue;
            os << p.x << ',' << p.y << ',' << eval_full(sol, p) << '\n';
        }
    }
}

struct PlotResult {
    std::string svg;
    std::vector<std::string> warnings;
};

/**
 * Log-log plot of L2 error against h with markers, a polyline through the data
 * and a dashed slope-2 reference line through the last point. Rows with a
 * non-positive error are left out with a warning.
 */
[[nodiscard]] inline PlotResult emit_plot(const ConvergenceTable& table)
{
    PlotResult out;
    std::vector<std::pair<double, double>> pts; // (log10 h, log10 e)
    for (const auto& r : table.records) {
        if (!(r.l2_error > 0.0) || !(r.h > 0.0)) {
            out.warnings.push_back("level " + std::to_string(r.level) + " has a non-positive error; point omitted");
            continue;
        }
        pts.emplace_back(std::log10(r.h), std::log10(r.l2_error));
    }
    if (pts.empty()) throw AnalysisError("nothing to plot: no level has a positive error");

    std::vector<std::pair<double, double>> ref;
    if (pts.size() >= 2) {
        const auto [hx, ey] = pts.back();
        double xmin = hx, xmax = hx;
        for (const auto& p : pts) {
            xmin = std::min(xmin, p.first);
            xmax = std::max(xmax, p.first);
        }
        ref = {{xmin, ey + 2.0 * (xmin - hx)}, {xmax, ey + 2.0 * (xmax - hx)}};
    }

    double x0 = std::numeric_limits<double>::max(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& set : {pts, ref}) {
        for (const auto& [x, y] : set) {
            x0 = std::min(x0, x);
            x1 = std::max(x1, x);
            y0 = std::min(y0, y);
            y1 = std::max(y1, y);
        }
    }
    x0 = std::floor(x0 * 2.0 - 0.1) / 2.0;
    x1 = std::ceil(x1 * 2.0 + 0.1) / 2.0;
    y0 = std::floor(y0 - 0.1);
    y1 = std::ceil(y1 + 0.1);

    constexpr double width = 640.0, height = 480.0;
    constexpr double left = 90.0, right = 30.0, top = 30.0, bottom = 70.0;
    const auto sx = [&](double x) { return left + (x - x0) / (x1 - x0) * (width - left - right); };
    const auto sy = [&](double y) { return top + (y1 - y) / (y1 - y0) * (height - top - bottom); };

    std::ostringstream os;
    os << std::fixed << std::setprecision(2);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    os << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    os << "<rect class=\"frame\" x=\"" << left << "\" y=\"" << top << "\" width=\"" << width - left - right
       << "\" height=\"" << height - top - bottom << "\" fill=\"none\" stroke=\"black\"/>\n";

    for (double d = std::ceil(y0); d <= y1 + 1e-9; d += 1.0) {
        os << "<line class=\"tick\" x1=\"" << left - 5.0 << "\" y1=\"" << sy(d) << "\" x2=\"" << left << "\" y2=\""
           << sy(d) << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << left - 8.0 << "\" y=\"" << sy(d) + 4.0
           << "\" font-size=\"12\" text-anchor=\"end\">1e" << static_cast<int>(d) << "</text>\n";
    }
    for (double d = std::ceil(x0 * 2.0) / 2.0; d <= x1 + 1e-9; d += 0.5) {
        os << "<line class=\"tick\" x1=\"" << sx(d) << "\" y1=\"" << height - bottom << "\" x2=\"" << sx(d)
           << "\" y2=\"" << height - bottom + 5.0 << "\" stroke=\"black\"/>\n";
        std::ostringstream label;
        label << std::setprecision(3) << std::pow(10.0, d);
        os << "<text x=\"" << sx(d) << "\" y=\"" << height - bottom + 20.0
           << "\" font-size=\"12\" text-anchor=\"middle\">" << label.str() << "</text>\n";
    }
    os << "<text class=\"xlabel\" x=\"" << left + 0.5 * (width - left - right) << "\" y=\"" << height - 20.0
       << "\" font-size=\"14\" text-anchor=\"middle\">h</text>\n";
    os << "<text class=\"ylabel\" x=\"20\" y=\"" << top + 0.5 * (height - top - bottom)
       << "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
       << top + 0.5 * (height - top - bottom) << ")\">L2 error</text>\n";

    if (!ref.empty()) {
        os << "<line class=\"reference\" x1=\"" << sx(ref[0].first) << "\" y1=\"" << sy(ref[0].second) << "\" x2=\""
           << sx(ref[1].first) << "\" y2=\"" << sy(ref[1].second)
           << "\" stroke=\"gray\" stroke-dasharray=\"6,4\"/>\n";
        os << "<text x=\"" << sx(ref[0].first) + 6.0 << "\" y=\"" << sy(ref[0].second) - 6.0
           << "\" font-size=\"12\" fill=\"gray\">slope 2</text>\n";
    }
    if (pts.size() >= 2) {
        os << "<polyline class=\"data\" fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
        for (std::size_t k = 0; k < pts.size(); ++k)
            os << (k ? " " : "") << sx(pts[k].first) << ',' << sy(pts[k].second);
        os << "\"/>\n";
    }
    for (const auto& [x, y] : pts)
        os << "<circle class=\"marker\" cx=\"" << sx(x) << "\" cy=\"" << sy(y)
           << "\" r=\"4\" fill=\"steelblue\"/>\n";
    os << "</svg>\n";
    out.svg = os.str();
    return out;
}

} // namespace nitsche
