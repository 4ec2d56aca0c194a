#pragma once

/**
 * @file reference_cell.hpp
 * @brief Linear (P1) and bilinear (Q1) reference elements and the isoparametric
 *        map onto a physical cell.
 */

#include "nitsche/error.hpp"
#include "nitsche/geometry.hpp"

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string_view>

namespace nitsche {

enum class ElementKind { P1Triangle, Q1Quad };

[[nodiscard]] constexpr std::size_t vertex_count(ElementKind kind) noexcept
{
    return kind == ElementKind::P1Triangle ? 3 : 4;
}

[[nodiscard]] constexpr std::string_view to_string(ElementKind kind) noexcept
{
    return kind == ElementKind::P1Triangle ? "p1" : "q1";
}

template <ElementKind Kind>
struct ReferenceCell;

/// Triangle {(x, y): -1 < x < 1, -1 < y < -x} with vertices (-1,-1), (1,-1), (-1,1).
template <>
struct ReferenceCell<ElementKind::P1Triangle> {
    static constexpr std::size_t n = 3;
    static constexpr double measure = 2.0;
    static constexpr std::array<Point2, 3> vertices{{{-1.0, -1.0}, {1.0, -1.0}, {-1.0, 1.0}}};

    static constexpr std::array<double, 3> shape(Point2 p) noexcept
    {
        return {-0.5 * (p.x + p.y), 0.5 * (1.0 + p.x), 0.5 * (1.0 + p.y)};
    }
    static constexpr std::array<Point2, 3> grad(Point2 /*p*/) noexcept
    {
        return {{{-0.5, -0.5}, {0.5, 0.0}, {0.0, 0.5}}};
    }
};

/// Square (-1, 1)^2 with counter-clockwise vertices starting at (-1,-1).
template <>
struct ReferenceCell<ElementKind::Q1Quad> {
    static constexpr std::size_t n = 4;
    static constexpr double measure = 4.0;
    static constexpr std::array<Point2, 4> vertices{{{-1.0, -1.0}, {1.0, -1.0}, {1.0, 1.0}, {-1.0, 1.0}}};

    static constexpr std::array<double, 4> shape(Point2 p) noexcept
    {
        std::array<double, 4> phi{};
        for (std::size_t a = 0; a < 4; ++a)
            phi[a] = 0.25 * (1.0 + vertices[a].x * p.x) * (1.0 + vertices[a].y * p.y);
        return phi;
    }
    static constexpr std::array<Point2, 4> grad(Point2 p) noexcept
    {
        std::array<Point2, 4> g{};
        for (std::size_t a = 0; a < 4; ++a) {
            g[a] = {0.25 * vertices[a].x * (1.0 + vertices[a].y * p.y),
                    0.25 * vertices[a].y * (1.0 + vertices[a].x * p.x)};
        }
        return g;
    }
};

/// Geometry of a physical cell at one reference point.
template <ElementKind Kind>
struct MappedPoint {
    static constexpr std::size_t n = ReferenceCell<Kind>::n;
    Point2 x{};
    double det_j{0.0};
    std::array<double, n> phi{};
    std::array<Point2, n> grad_phi{}; ///< physical gradients
};

/**
 * Evaluates the isoparametric map of the cell with vertices @p v at reference
 * point @p ref. Throws when the Jacobian is not positive.
 */
template <ElementKind Kind>
[[nodiscard]] MappedPoint<Kind> map_point(std::span<const Point2, ReferenceCell<Kind>::n> v, Point2 ref)
{
    using Ref = ReferenceCell<Kind>;
    MappedPoint<Kind> m;
    m.phi = Ref::shape(ref);
    const auto dref = Ref::grad(ref);
    double j00 = 0.0, j01 = 0.0, j10 = 0.0, j11 = 0.0;
    for (std::size_t a = 0; a < Ref::n; ++a) {
        m.x = m.x + m.phi[a] * v[a];
        j00 += v[a].x * dref[a].x;
        j01 += v[a].x * dref[a].y;
        j10 += v[a].y * dref[a].x;
        j11 += v[a].y * dref[a].y;
    }
    m.det_j = j00 * j11 - j01 * j10;
    if (!(m.det_j > 0.0)) throw MeshError("degenerate or clockwise cell (non-positive Jacobian)");
    const double inv = 1.0 / m.det_j;
    // grad = J^{-T} grad_ref
    for (std::size_t a = 0; a < Ref::n; ++a) {
        const Point2 g = dref[a];
        m.grad_phi[a] = {inv * (j11 * g.x - j10 * g.y), inv * (-j01 * g.x + j00 * g.y)};
    }
    return m;
}

/// Reference coordinates of the point at parameter t in [-1, 1] on local edge @p e (vertex e to e+1).
template <ElementKind Kind>
[[nodiscard]] constexpr Point2 reference_edge_point(std::size_t e, double t) noexcept
{
    using Ref = ReferenceCell<Kind>;
    const Point2 a = Ref::vertices[e % Ref::n];
    const Point2 b = Ref::vertices[(e + 1) % Ref::n];
    return (0.5 * (1.0 - t)) * a + (0.5 * (1.0 + t)) * b;
}

} // namespace nitsche
