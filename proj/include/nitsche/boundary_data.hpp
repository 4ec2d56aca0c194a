#pragma once

/**
 * @file boundary_data.hpp
 * @brief Piecewise smooth Dirichlet data, its jumps at the boundary points,
 *        the singular functions that absorb those jumps, and the regularized
 *        data (g_hat, f_hat) of the remaining H^2 problem.
 */

#include "nitsche/error.hpp"
#include "nitsche/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace nitsche {

using ScalarField = std::function<double(Point2)>;
using EdgeFunction = std::function<double(double)>;

/**
 * Dirichlet data restricted to one boundary edge, as a function of the arc
 * length s in [0, length] measured from the edge's start point. The derivative
 * is taken with respect to s, i.e. in counter-clockwise direction.
 */
struct EdgeTrace {
    EdgeFunction value;
    EdgeFunction derivative;
    double length{0.0};
};

/// One-sided limits and jumps of g and g' at boundary point A_i.
struct JumpRecord {
    std::size_t corner{0};
    double g_plus{0.0};
    double g_minus{0.0};
    double jump_g{0.0};
    double gprime_plus{0.0};
    double gprime_minus{0.0};
    double jump_gprime{0.0};
};

/// g_plus is read from edge i at s = 0, g_minus from edge i-1 at its far end.
[[nodiscard]] inline JumpRecord one_sided_limits(std::span<const EdgeTrace> g, std::size_t i)
{
    if (g.empty()) throw BoundaryDataError("no edge traces supplied");
    if (i >= g.size()) throw BoundaryDataError("boundary point index out of range");
    const EdgeTrace& leaving = g[i];
    const EdgeTrace& arriving = g[(i + g.size() - 1) % g.size()];
    JumpRecord j;
    j.corner = i;
    j.g_plus = leaving.value(0.0);
    j.g_minus = arriving.value(arriving.length);
    j.jump_g = j.g_plus - j.g_minus;
    j.gprime_plus = leaving.derivative(0.0);
    j.gprime_minus = arriving.derivative(arriving.length);
    j.jump_gprime = j.gprime_plus - j.gprime_minus;
    return j;
}

/// sigma(r, theta) = r (ln r sin theta + theta cos theta); continuous extension 0 at r = 0.
[[nodiscard]] inline double sigma(double r, double theta) noexcept
{
    if (r == 0.0) return 0.0;
    const double log_r = std::log(std::max(r, 1e-300));
    return r * (log_r * std::sin(theta) + theta * std::cos(theta));
}

/// Closest admissible distance between an evaluation point and A_i.
inline constexpr double singular_point_exclusion = 1e-14;

/**
 * Harmonic function Theta_i attached to boundary point A_i. Its trace
 * reproduces the jump of g at A_i and, at straight points (omega = pi), also
 * the jump of the tangential derivative. For omega < pi the derivative jump is
 * ignored.
 */
struct SingularFunction {
    std::size_t corner{0};
    PolarFrame frame{};
    double omega{std::numbers::pi};
    double g_plus{0.0};
    double jump_g{0.0};
    double jump_gprime{0.0};

    [[nodiscard]] bool straight() const noexcept { return omega == std::numbers::pi; }

    /// Value at local polar coordinates; r = 0 gives the one-sided limit along theta.
    [[nodiscard]] double value_polar(double r, double theta) const noexcept
    {
        if (!straight()) return g_plus - theta / omega * jump_g;
        return g_plus - (theta * jump_g + sigma(r, theta) * jump_gprime) / std::numbers::pi;
    }

    [[nodiscard]] double value(Point2 p) const
    {
        const LocalPolar rp = to_local_polar(frame, p);
        if (rp.r <= singular_point_exclusion)
            throw BoundaryDataError("singular function evaluated at its own singular point");
        return value_polar(rp.r, rp.theta);
    }

    /// Analytic gradient in global coordinates.
    [[nodiscard]] Point2 gradient(Point2 p) const
    {
        const LocalPolar rp = to_local_polar(frame, p);
        if (rp.r <= singular_point_exclusion)
            throw BoundaryDataError("singular function gradient evaluated at its own singular point");
        const double r = rp.r;
        const double th = rp.theta;
        // grad theta = (-sin, cos) / r ; grad sigma = (theta, ln r + 1) in frame axes.
        const Point2 grad_theta{-std::sin(th) / r, std::cos(th) / r};
        Point2 local_grad{0.0, 0.0};
        if (!straight()) {
            local_grad = (-jump_g / omega) * grad_theta;
        } else {
            const Point2 grad_sigma{th, std::log(r) + 1.0};
            local_grad = (-1.0 / std::numbers::pi) * (jump_g * grad_theta + jump_gprime * grad_sigma);
        }
        return frame.to_global_vector(local_grad);
    }
};

[[nodiscard]] inline double eval_singular(const SingularFunction& s, Point2 p) { return s.value(p); }

[[nodiscard]] inline SingularFunction make_singular(const PolygonDomain& domain, const JumpRecord& jr)
{
    SingularFunction s;
    s.corner = jr.corner;
    s.frame = domain.frame(jr.corner);
    s.omega = domain.angle(jr.corner);
    s.g_plus = jr.g_plus;
    s.jump_g = jr.jump_g;
    s.jump_gprime = s.straight() ? jr.jump_gprime : 0.0;
    return s;
}

/**
 * Value of Theta restricted to boundary edge @p edge at arc length @p s.
 * On the two edges meeting at the singular point the angle is set exactly
 * (0 on the leaving edge, omega on the arriving one) so one-sided limits at
 * s = 0 or s = length are well defined.
 */
[[nodiscard]] inline double singular_trace(const SingularFunction& sf, const PolygonDomain& domain, std::size_t edge,
                                           double s)
{
    if (edge == sf.corner) return sf.value_polar(s, 0.0);
    if (edge == domain.prev(sf.corner)) return sf.value_polar(domain.edge_length(edge) - s, sf.omega);
    return sf.value(domain.edge_point(edge, s));
}

/// Counter-clockwise tangential derivative of Theta along boundary edge @p edge.
[[nodiscard]] inline double singular_trace_derivative(const SingularFunction& sf, const PolygonDomain& domain,
                                                      std::size_t edge, double s)
{
    // Along both adjacent edges Theta only varies through sigma; on the leaving
    // edge d sigma / dr vanishes (theta = 0), on the arriving edge it equals
    // -pi and the direction of travel is -r.
    if (edge == sf.corner) return 0.0;
    if (edge == domain.prev(sf.corner)) return sf.straight() ? -sf.jump_gprime : 0.0;
    return dot(sf.gradient(domain.edge_point(edge, s)), domain.tangent(edge));
}

[[nodiscard]] inline double sum_singular(std::span<const SingularFunction> singulars, Point2 p)
{
    double sum = 0.0;
    for (const auto& s : singulars) sum += s.value(p);
    return sum;
}

/**
 * Checks every edge trace against centred finite differences of its value and
 * that the traces match the domain's edge lengths.
 */
inline void validate_traces(const PolygonDomain& domain, std::span<const EdgeTrace> g)
{
    if (g.size() != domain.size())
        throw BoundaryDataError("expected " + std::to_string(domain.size()) + " edge traces, got " +
                                std::to_string(g.size()));
    for (std::size_t i = 0; i < g.size(); ++i) {
        const EdgeTrace& tr = g[i];
        if (!tr.value || !tr.derivative) throw BoundaryDataError("edge trace " + std::to_string(i) + " is empty");
        const double len = domain.edge_length(i);
        if (std::abs(tr.length - len) > 1e-10 * domain.diameter())
            throw BoundaryDataError("edge trace " + std::to_string(i) + " has the wrong length");
        const double step = 1e-6 * len;
        for (const double frac : {0.1, 0.3, 0.5, 0.7, 0.9}) {
            const double s = frac * len;
            const double v = tr.value(s);
            const double d = tr.derivative(s);
            if (!std::isfinite(v) || !std::isfinite(d))
                throw BoundaryDataError("edge trace " + std::to_string(i) + " is not finite");
            const double fd = (tr.value(s + step) - tr.value(s - step)) / (2.0 * step);
            if (std::abs(fd - d) > 1e-5 * (1.0 + std::abs(d)))
                throw BoundaryDataError("edge trace " + std::to_string(i) +
                                        " derivative disagrees with its value (expected counter-clockwise orientation)");
        }
    }
}

/**
 * Builds the singular functions: one per declared discontinuity point.
 * Undeclared partition points (plain polygon corners) must carry continuous
 * data; a jump there is reported rather than silently absorbed.
 */
[[nodiscard]] inline std::vector<SingularFunction> build_singulars(const PolygonDomain& domain,
                                                                   std::span<const EdgeTrace> g,
                                                                   double jump_tol = 1e-10)
{
    std::vector<SingularFunction> out;
    for (std::size_t i = 0; i < domain.size(); ++i) {
        const JumpRecord jr = one_sided_limits(g, i);
        if (domain.is_declared(i)) {
            out.push_back(make_singular(domain, jr));
            continue;
        }
        const double scale = 1.0 + std::max(std::abs(jr.g_plus), std::abs(jr.g_minus));
        if (std::abs(jr.jump_g) > jump_tol * scale)
            throw BoundaryDataError("boundary data jumps at undeclared boundary point " + std::to_string(i));
    }
    return out;
}

/**
 * Regularized boundary data g_hat = g - sum_i Theta_i restricted to the
 * boundary, evaluated edge by edge.
 */
class RegularizedBoundary {
public:
    RegularizedBoundary(PolygonDomain domain, std::vector<EdgeTrace> g, std::vector<SingularFunction> singulars)
        : domain_(std::move(domain)), g_(std::move(g)), singulars_(std::move(singulars))
    {
        if (g_.size() != domain_.size()) throw BoundaryDataError("edge trace count does not match the domain");
    }

    [[nodiscard]] double value(std::size_t edge, double s) const
    {
        double v = g_.at(edge).value(s);
        for (const auto& sf : singulars_) v -= singular_trace(sf, domain_, edge, s);
        return v;
    }

    [[nodiscard]] double derivative(std::size_t edge, double s) const
    {
        double v = g_.at(edge).derivative(s);
        for (const auto& sf : singulars_) v -= singular_trace_derivative(sf, domain_, edge, s);
        return v;
    }

    /// g_hat at a point known to lie on edge @p edge.
    [[nodiscard]] double at(std::size_t edge, Point2 p) const
    {
        return value(edge, distance(p, domain_.edge_start(edge)));
    }

    /// Jump g_hat(A_j+) - g_hat(A_j-).
    [[nodiscard]] double jump(std::size_t j) const
    {
        const std::size_t before = domain_.prev(j);
        return value(j, 0.0) - value(before, domain_.edge_length(before));
    }

    [[nodiscard]] double derivative_jump(std::size_t j) const
    {
        const std::size_t before = domain_.prev(j);
        return derivative(j, 0.0) - derivative(before, domain_.edge_length(before));
    }

    [[nodiscard]] const PolygonDomain& domain() const noexcept { return domain_; }
    [[nodiscard]] const std::vector<SingularFunction>& singulars() const noexcept { return singulars_; }

private:
    PolygonDomain domain_;
    std::vector<EdgeTrace> g_;
    std::vector<SingularFunction> singulars_;
};

[[nodiscard]] inline RegularizedBoundary regularize_g(const PolygonDomain& domain, std::vector<EdgeTrace> g,
                                                      std::vector<SingularFunction> singulars)
{
    return RegularizedBoundary(domain, std::move(g), std::move(singulars));
}

/// f_hat = f - mu * sum_i Theta_i.
[[nodiscard]] inline ScalarField regularize_f(ScalarField f, ScalarField mu, std::vector<SingularFunction> singulars)
{
    if (singulars.empty()) return f;
    return [f = std::move(f), mu = std::move(mu), s = std::move(singulars)](Point2 p) {
        const double m = mu(p);
        return m == 0.0 ? f(p) : f(p) - m * sum_singular(s, p);
    };
}

/// Data of the regularized problem -lap(u_hat) + mu u_hat = f_hat, u_hat = g_hat.
struct RegularizedProblem {
    RegularizedBoundary g_hat;
    ScalarField f_hat;
    ScalarField mu;

    [[nodiscard]] const std::vector<SingularFunction>& singular_parts() const noexcept { return g_hat.singulars(); }
    [[nodiscard]] const PolygonDomain& domain() const noexcept { return g_hat.domain(); }
};

[[nodiscard]] inline RegularizedProblem regularize(const PolygonDomain& domain, std::vector<EdgeTrace> g, ScalarField f,
                                                   ScalarField mu)
{
    validate_traces(domain, g);
    auto singulars = build_singulars(domain, g);
    auto f_hat = regularize_f(std::move(f), mu, singulars);
    return RegularizedProblem{RegularizedBoundary(domain, std::move(g), std::move(singulars)), std::move(f_hat),
                              std::move(mu)};
}

} // namespace nitsche
