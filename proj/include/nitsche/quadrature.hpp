#pragma once

/**
 * @file quadrature.hpp
 * @brief Quadrature rules on the reference edge [-1, 1], the reference triangle
 *        {-1 < x < 1, -1 < y < -x} (area 2) and the reference square (-1, 1)^2.
 */

#include "nitsche/error.hpp"
#include "nitsche/geometry.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace nitsche {

struct LineRule {
    std::vector<double> points;
    std::vector<double> weights;
    int degree{0};
};

struct QuadratureRule {
    std::vector<Point2> points;
    std::vector<double> weights;
    int degree{0};

    [[nodiscard]] std::size_t size() const noexcept { return points.size(); }
};

/// n-point Gauss-Legendre rule on [-1, 1] (Newton iteration on P_n).
[[nodiscard]] inline LineRule gauss_legendre(int n)
{
    if (n < 1) throw Error("Gauss-Legendre rule needs at least one point");
    LineRule rule;
    rule.points.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    rule.degree = 2 * n - 1;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // Recompute the derivative at the converged node for the weight.
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = pk;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.points[static_cast<std::size_t>(i)] = -x;
        rule.points[static_cast<std::size_t>(n - 1 - i)] = x;
        rule.weights[static_cast<std::size_t>(i)] = w;
        rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
    }
    if (n % 2 == 1) rule.points[static_cast<std::size_t>(n / 2)] = 0.0;
    return rule;
}

/// Tensor Gauss rule with n x n points on (-1, 1)^2.
[[nodiscard]] inline QuadratureRule square_rule(int n)
{
    const LineRule g = gauss_legendre(n);
    QuadratureRule rule;
    rule.degree = g.degree;
    for (std::size_t j = 0; j < g.points.size(); ++j) {
        for (std::size_t i = 0; i < g.points.size(); ++i) {
            rule.points.push_back({g.points[i], g.points[j]});
            rule.weights.push_back(g.weights[i] * g.weights[j]);
        }
    }
    return rule;
}

namespace detail {

// Barycentric (l0, l1, l2) -> reference triangle with vertices (-1,-1), (1,-1), (-1,1).
[[nodiscard]] inline Point2 from_barycentric(double l0, double l1, double l2) noexcept
{
    return {-l0 + l1 - l2, -l0 - l1 + l2};
}

} // namespace detail

/// Symmetric 6-point rule, exact for degree 4.
[[nodiscard]] inline QuadratureRule triangle_rule_6()
{
    constexpr double a1 = 0.445948490915965;
    constexpr double w1 = 0.223381589678011;
    constexpr double a2 = 0.091576213509771;
    constexpr double w2 = 0.109951743655322;
    constexpr double area = 2.0;
    QuadratureRule rule;
    rule.degree = 4;
    const auto orbit = [&](double a, double w) {
        const double b = 1.0 - 2.0 * a;
        rule.points.push_back(detail::from_barycentric(b, a, a));
        rule.points.push_back(detail::from_barycentric(a, b, a));
        rule.points.push_back(detail::from_barycentric(a, a, b));
        for (int k = 0; k < 3; ++k) rule.weights.push_back(area * w);
    };
    orbit(a1, w1);
    orbit(a2, w2);
    return rule;
}

/**
 * Collapsed (Duffy) Gauss rule on the reference triangle: an n x n tensor
 * Gauss rule on the square pulled back through the degenerate map. Exact for
 * polynomials of total degree 2n - 2.
 */
[[nodiscard]] inline QuadratureRule triangle_rule_collapsed(int n)
{
    const LineRule g = gauss_legendre(n);
    QuadratureRule rule;
    rule.degree = 2 * n - 2;
    for (std::size_t i = 0; i < g.points.size(); ++i) {
        const double a = g.points[i];
        const double u = 0.5 * (1.0 + a);
        for (std::size_t j = 0; j < g.points.size(); ++j) {
            const double b = g.points[j];
            const double v = 0.25 * (1.0 - a) * (1.0 + b);
            rule.points.push_back({-1.0 + 2.0 * u, -1.0 + 2.0 * v});
            // (1 - a)/8 from the collapse, 4 from the unit triangle -> reference triangle.
            rule.weights.push_back(g.weights[i] * g.weights[j] * 0.5 * (1.0 - a));
        }
    }
    return rule;
}

/// Smallest available triangle rule exact for total degree @p degree.
[[nodiscard]] inline QuadratureRule triangle_rule(int degree)
{
    if (degree < 0) throw Error("negative quadrature degree");
    if (degree <= 4) return triangle_rule_6();
    return triangle_rule_collapsed((degree + 3) / 2);
}

} // namespace nitsche
