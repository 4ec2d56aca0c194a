#pragma once

/**
 * @file cases.hpp
 * @brief Manufactured test problems with known exact solutions.
 *
 * Registered names:
 *  - "paper-3-3"    u = exp(-r^2) theta on (-1,1)x(0,1), mu = 1; g jumps by -pi at the origin.
 *  - "smooth-sine"  u = sin(pi x) sin(pi y) on (0,1)^2, mu = 1, g = 0.
 *  - "linear-patch" u = x + y on (0,1)^2, mu = 0, f = 0.
 */

#include "nitsche/boundary_data.hpp"
#include "nitsche/error.hpp"
#include "nitsche/geometry.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

namespace nitsche {

using VectorField = std::function<Point2(Point2)>;

struct ManufacturedCase {
    std::string name;
    std::string description;
    PolygonDomain domain;
    ScalarField exact;
    ScalarField source;
    ScalarField mu;
    std::vector<EdgeTrace> traces;
    int coarse_subdivisions{1}; ///< coarse-grid cells per unit length
};

/// Restriction of a smooth field and its gradient to boundary edge @p edge.
[[nodiscard]] inline EdgeTrace trace_from_field(const PolygonDomain& domain, std::size_t edge, ScalarField u,
                                                VectorField grad_u)
{
    const Point2 start = domain.edge_start(edge);
    const Point2 tau = domain.tangent(edge);
    EdgeTrace tr;
    tr.length = domain.edge_length(edge);
    tr.value = [u, start, tau](double s) { return u(start + s * tau); };
    tr.derivative = [grad_u = std::move(grad_u), start, tau](double s) { return dot(grad_u(start + s * tau), tau); };
    return tr;
}

/**
 * Checks -lap(u) + mu u = f with a 5-point stencil at interior sample points
 * that keep away from the declared discontinuity points, then validates the
 * edge traces. Throws BoundaryDataError on mismatch.
 */
inline void verify_case(const ManufacturedCase& c)
{
    validate_traces(c.domain, c.traces);
    const PolygonDomain& d = c.domain;
    const Point2 ctr = d.centroid();
    std::vector<Point2> samples{ctr};
    for (const Point2 v : d.vertices()) {
        samples.push_back(ctr + 0.5 * (v - ctr));
        samples.push_back(ctr + 0.85 * (v - ctr));
    }
    const double step = 1e-4 * d.diameter();
    for (const Point2 p : samples) {
        bool near_singular = false;
        for (std::size_t i = 0; i < d.size(); ++i)
            if (d.is_declared(i) && distance(p, d.point(i)) < 0.1 * d.diameter()) near_singular = true;
        if (near_singular) continue;
        const double u0 = c.exact(p);
        const double lap = (c.exact({p.x + step, p.y}) + c.exact({p.x - step, p.y}) + c.exact({p.x, p.y + step}) +
                            c.exact({p.x, p.y - step}) - 4.0 * u0) /
                           (step * step);
        const double residual = -lap + c.mu(p) * u0 - c.source(p);
        if (std::abs(residual) > 1e-5 * (1.0 + std::abs(c.source(p))))
            throw BoundaryDataError("case '" + c.name + "': exact solution does not satisfy the PDE");
    }
}

[[nodiscard]] inline ManufacturedCase jump_rectangle_case()
{
    using std::numbers::pi;
    // Boundary points: (-1,0), origin (declared), (1,0), (1,1), (-1,1).
    PolygonDomain domain({{-1.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {-1.0, 1.0}}, {{0.0, 0.0}});

    const ScalarField u = [](Point2 p) { return std::exp(-(p.x * p.x + p.y * p.y)) * std::atan2(p.y, p.x); };
    const VectorField grad_u = [](Point2 p) {
        const double r2 = p.x * p.x + p.y * p.y;
        const double e = std::exp(-r2);
        const double th = std::atan2(p.y, p.x);
        return Point2{e * (-2.0 * p.x * th - p.y / r2), e * (-2.0 * p.y * th + p.x / r2)};
    };

    std::vector<EdgeTrace> traces;
    // (-1,0) -> (0,0): theta = pi.
    traces.push_back(EdgeTrace{[](double s) { const double x = s - 1.0; return pi * std::exp(-x * x); },
                               [](double s) { const double x = s - 1.0; return -2.0 * x * pi * std::exp(-x * x); },
                               1.0});
    // (0,0) -> (1,0): theta = 0.
    traces.push_back(EdgeTrace{[](double) { return 0.0; }, [](double) { return 0.0; }, 1.0});
    for (std::size_t e = 2; e < domain.size(); ++e) traces.push_back(trace_from_field(domain, e, u, grad_u));

    ManufacturedCase c{"paper-3-3",
                       "u = exp(-r^2) theta on (-1,1)x(0,1), mu = 1, Dirichlet jump at the origin",
                       domain,
                       u,
                       [](Point2 p) {
                           const double r2 = p.x * p.x + p.y * p.y;
                           return std::exp(-r2) * (5.0 - 4.0 * r2) * std::atan2(p.y, p.x);
                       },
                       [](Point2) { return 1.0; },
                       std::move(traces),
                       1};
    return c;
}

[[nodiscard]] inline ManufacturedCase smooth_sine_case()
{
    using std::numbers::pi;
    PolygonDomain domain({{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}});
    const ScalarField u = [](Point2 p) { return std::sin(pi * p.x) * std::sin(pi * p.y); };
    std::vector<EdgeTrace> traces;
    // Exactly zero on the boundary; sin(pi) round-off is not data.
    for (std::size_t e = 0; e < domain.size(); ++e)
        traces.push_back(EdgeTrace{[](double) { return 0.0; }, [](double) { return 0.0; }, domain.edge_length(e)});
    return ManufacturedCase{"smooth-sine",
                            "u = sin(pi x) sin(pi y) on (0,1)^2, mu = 1, homogeneous data",
                            domain,
                            u,
                            [u](Point2 p) { return (2.0 * pi * pi + 1.0) * u(p); },
                            [](Point2) { return 1.0; },
                            std::move(traces),
                            4};
}

[[nodiscard]] inline ManufacturedCase linear_patch_case()
{
    PolygonDomain domain({{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}});
    const ScalarField u = [](Point2 p) { return p.x + p.y; };
    const VectorField grad_u = [](Point2) { return Point2{1.0, 1.0}; };
    std::vector<EdgeTrace> traces;
    for (std::size_t e = 0; e < domain.size(); ++e) traces.push_back(trace_from_field(domain, e, u, grad_u));
    return ManufacturedCase{"linear-patch",
                            "u = x + y on (0,1)^2, mu = 0, f = 0",
                            domain,
                            u,
                            [](Point2) { return 0.0; },
                            [](Point2) { return 0.0; },
                            std::move(traces),
                            1};
}

[[nodiscard]] inline std::vector<std::string> case_names() { return {"paper-3-3", "smooth-sine", "linear-patch"}; }

/// Looks up a registered case by name and verifies it.
[[nodiscard]] inline ManufacturedCase make_case(const std::string& name)
{
    ManufacturedCase c = [&] {
        if (name == "paper-3-3") return jump_rectangle_case();
        if (name == "smooth-sine") return smooth_sine_case();
        if (name == "linear-patch") return linear_patch_case();
        std::string known;
        for (const auto& n : case_names()) known += (known.empty() ? "" : ", ") + n;
        throw Error("unknown case '" + name + "' (registered: " + known + ")");
    }();
    verify_case(c);
    return c;
}

} // namespace nitsche
