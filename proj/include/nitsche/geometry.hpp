#pragma once

/**
 * @file geometry.hpp
 * @brief Convex polygonal domains, their boundary partition at the points A_i
 *        and the local polar frames anchored at those points.
 *
 * Boundary points are numbered counter-clockwise starting at the first polygon
 * vertex. Edge i is the open segment from A_i to A_{i+1}; all index arithmetic
 * is cyclic.
 */

#include "nitsche/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace nitsche {

struct Point2 {
    double x{0.0};
    double y{0.0};

    friend constexpr Point2 operator+(Point2 a, Point2 b) noexcept { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Point2 operator-(Point2 a, Point2 b) noexcept { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Point2 operator*(double s, Point2 a) noexcept { return {s * a.x, s * a.y}; }
    friend constexpr bool operator==(Point2 a, Point2 b) noexcept = default;
};

[[nodiscard]] constexpr double dot(Point2 a, Point2 b) noexcept { return a.x * b.x + a.y * b.y; }
[[nodiscard]] constexpr double cross(Point2 a, Point2 b) noexcept { return a.x * b.y - a.y * b.x; }
[[nodiscard]] inline double norm(Point2 a) noexcept { return std::hypot(a.x, a.y); }
[[nodiscard]] inline double distance(Point2 a, Point2 b) noexcept { return norm(a - b); }

/// Counter-clockwise rotation by a quarter turn.
[[nodiscard]] constexpr Point2 rotate_ccw(Point2 a) noexcept { return {-a.y, a.x}; }

[[nodiscard]] inline Point2 normalized(Point2 a)
{
    const double n = norm(a);
    if (!(n > 0.0)) throw GeometryError("cannot normalize a zero vector");
    return {a.x / n, a.y / n};
}

/// Local polar coordinates (r, theta) relative to a PolarFrame.
struct LocalPolar {
    double r{0.0};
    double theta{0.0};
};

/**
 * Polar frame centred at a boundary point A_i. theta = 0 along the edge
 * leaving A_i (counter-clockwise) and theta = omega along the edge arriving
 * at A_i.
 */
struct PolarFrame {
    Point2 origin{};
    Point2 direction{1.0, 0.0}; ///< unit vector along edge i
    double omega{std::numbers::pi};

    /// Coordinates of @p p in the rotated frame (xi along @c direction).
    [[nodiscard]] Point2 local(Point2 p) const noexcept
    {
        const Point2 d = p - origin;
        return {dot(direction, d), cross(direction, d)};
    }

    /// Rotates a vector given in frame coordinates back to global axes.
    [[nodiscard]] Point2 to_global_vector(Point2 v) const noexcept
    {
        return v.x * direction + v.y * rotate_ccw(direction);
    }
};

/**
 * Converts @p p to (r, theta) in @p frame. The angle is measured
 * counter-clockwise from the frame direction and lies in [0, omega] for points
 * of the closed domain. Angles below -pi/2 are wrapped by 2 pi so that
 * round-off on the arriving edge of a straight (omega = pi) point still maps
 * to pi. At r = 0 the angle is 0 by convention.
 */
[[nodiscard]] inline LocalPolar to_local_polar(const PolarFrame& frame, Point2 p) noexcept
{
    const Point2 q = frame.local(p);
    const double r = std::hypot(q.x, q.y);
    if (r == 0.0) return {0.0, 0.0};
    double theta = std::atan2(q.y, q.x);
    if (theta < -0.5 * std::numbers::pi) theta += 2.0 * std::numbers::pi;
    return {r, theta};
}

[[nodiscard]] inline Point2 from_local_polar(const PolarFrame& frame, LocalPolar rp) noexcept
{
    return frame.origin + frame.to_global_vector({rp.r * std::cos(rp.theta), rp.r * std::sin(rp.theta)});
}

/// Result of locating a point on the boundary: edge index and affine parameter.
struct BoundaryLocation {
    std::size_t edge{0};
    double t{0.0};
};

/**
 * Convex polygon with a counter-clockwise partition of its boundary.
 *
 * The partition points are all polygon vertices plus any declared
 * discontinuity points (which may sit in the middle of a polygon edge).
 */
class PolygonDomain {
public:
    PolygonDomain(std::vector<Point2> vertices, std::vector<Point2> discontinuity_points = {})
        : vertices_(std::move(vertices))
    {
        const std::size_t n = vertices_.size();
        if (n < 3) throw GeometryError("polygon needs at least 3 vertices");
        for (const auto& v : vertices_) {
            if (!std::isfinite(v.x) || !std::isfinite(v.y))
                throw GeometryError("polygon vertex has non-finite coordinates");
        }

        double twice_area = 0.0;
        for (std::size_t k = 0; k < n; ++k) twice_area += cross(vertices_[k], vertices_[(k + 1) % n]);
        if (!(twice_area > 0.0)) throw GeometryError("polygon vertices must be in counter-clockwise order");
        area_ = 0.5 * twice_area;

        diameter_ = 0.0;
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = a + 1; b < n; ++b) diameter_ = std::max(diameter_, distance(vertices_[a], vertices_[b]));
        tol_ = 1e-10 * diameter_;

        Point2 c{};
        for (std::size_t k = 0; k < n; ++k) {
            const Point2 p = vertices_[k];
            const Point2 q = vertices_[(k + 1) % n];
            const double w = cross(p, q);
            c = c + (w / (6.0 * area_)) * (p + q);
        }
        centroid_ = c;

        for (std::size_t k = 0; k < n; ++k) {
            const Point2 prev = vertices_[(k + n - 1) % n];
            const Point2 cur = vertices_[k];
            const Point2 next = vertices_[(k + 1) % n];
            if (distance(cur, next) <= tol_) throw GeometryError("polygon has repeated vertices");
            const double turn = cross(cur - prev, next - cur);
            if (turn < -tol_ * diameter_)
                throw GeometryError("polygon is not convex (reentrant corner at vertex " + std::to_string(k) + ")");
        }

        // Distribute declared points onto polygon edges.
        std::vector<bool> vertex_declared(n, false);
        std::vector<std::vector<std::pair<double, Point2>>> on_edge(n);
        for (const Point2& p : discontinuity_points) {
            bool placed = false;
            for (std::size_t k = 0; k < n && !placed; ++k) {
                if (distance(p, vertices_[k]) <= tol_) {
                    if (vertex_declared[k]) throw GeometryError("duplicate discontinuity point");
                    vertex_declared[k] = true;
                    placed = true;
                }
            }
            for (std::size_t k = 0; k < n && !placed; ++k) {
                const Point2 a = vertices_[k];
                const Point2 b = vertices_[(k + 1) % n];
                const Point2 ab = b - a;
                const double t = dot(p - a, ab) / dot(ab, ab);
                if (t <= 0.0 || t >= 1.0) continue;
                if (distance(p, a + t * ab) <= tol_) {
                    for (const auto& [t_other, q] : on_edge[k]) {
                        if (distance(p, q) <= tol_) throw GeometryError("duplicate discontinuity point");
                    }
                    // Snap onto the segment so the mid-edge angle is exactly pi.
                    on_edge[k].emplace_back(t, a + t * ab);
                    placed = true;
                }
            }
            if (!placed) throw GeometryError("discontinuity point does not lie on the polygon boundary");
        }

        for (std::size_t k = 0; k < n; ++k) {
            points_.push_back(vertices_[k]);
            declared_.push_back(vertex_declared[k]);
            is_vertex_.push_back(true);
            auto& extra = on_edge[k];
            std::sort(extra.begin(), extra.end(), [](const auto& l, const auto& r) { return l.first < r.first; });
            for (const auto& [t, q] : extra) {
                points_.push_back(q);
                declared_.push_back(true);
                is_vertex_.push_back(false);
            }
        }

        const std::size_t m = points_.size();
        angles_.resize(m);
        for (std::size_t i = 0; i < m; ++i) {
            if (!is_vertex_[i]) {
                angles_[i] = std::numbers::pi;
                continue;
            }
            const Point2 to_next = points_[(i + 1) % m] - points_[i];
            const Point2 to_prev = points_[(i + m - 1) % m] - points_[i];
            double w = std::atan2(cross(to_next, to_prev), dot(to_next, to_prev));
            if (w <= 0.0) w += 2.0 * std::numbers::pi;
            if (std::abs(w - std::numbers::pi) <= 1e-12) w = std::numbers::pi;
            if (w > std::numbers::pi) throw GeometryError("interior angle exceeds pi; only convex domains are supported");
            angles_[i] = w;
        }
    }

    /// Number M of boundary points (and of boundary edges).
    [[nodiscard]] std::size_t size() const noexcept { return points_.size(); }

    [[nodiscard]] const std::vector<Point2>& vertices() const noexcept { return vertices_; }
    [[nodiscard]] const std::vector<Point2>& points() const noexcept { return points_; }

    [[nodiscard]] Point2 point(std::size_t i) const { return points_.at(wrap(i)); }
    /// True when the point was declared as a discontinuity point of the data.
    [[nodiscard]] bool is_declared(std::size_t i) const { return declared_.at(wrap(i)); }
    [[nodiscard]] bool is_vertex(std::size_t i) const { return is_vertex_.at(wrap(i)); }

    [[nodiscard]] std::size_t next(std::size_t i) const noexcept { return (i + 1) % size(); }
    [[nodiscard]] std::size_t prev(std::size_t i) const noexcept { return (i + size() - 1) % size(); }

    [[nodiscard]] double angle(std::size_t i) const { return angles_.at(i); }

    [[nodiscard]] Point2 edge_start(std::size_t i) const { return points_.at(i); }
    [[nodiscard]] Point2 edge_end(std::size_t i) const { return points_.at(next(i)); }
    [[nodiscard]] double edge_length(std::size_t i) const { return distance(edge_start(i), edge_end(i)); }
    /// Unit tangent of edge i in counter-clockwise direction.
    [[nodiscard]] Point2 tangent(std::size_t i) const { return normalized(edge_end(i) - edge_start(i)); }
    [[nodiscard]] Point2 outward_normal(std::size_t i) const
    {
        const Point2 t = tangent(i);
        return {t.y, -t.x};
    }
    /// Point on edge i at arc length s from A_i.
    [[nodiscard]] Point2 edge_point(std::size_t i, double s) const { return edge_start(i) + s * tangent(i); }

    [[nodiscard]] PolarFrame frame(std::size_t i) const { return PolarFrame{point(i), tangent(i), angle(i)}; }

    [[nodiscard]] double area() const noexcept { return area_; }
    [[nodiscard]] double diameter() const noexcept { return diameter_; }
    [[nodiscard]] Point2 centroid() const noexcept { return centroid_; }
    /// Default boundary-location tolerance, 1e-10 times the diameter.
    [[nodiscard]] double tolerance() const noexcept { return tol_; }

    /**
     * Finds the boundary edge containing @p p. A point within @p tol of A_i is
     * reported as (i, 0), i.e. ties at shared endpoints go to the edge leaving
     * the point.
     */
    [[nodiscard]] BoundaryLocation locate_on_boundary(Point2 p, std::optional<double> tol = std::nullopt) const
    {
        const double eps = tol.value_or(tol_);
        for (std::size_t i = 0; i < size(); ++i) {
            if (distance(p, points_[i]) <= eps) return {i, 0.0};
        }
        std::optional<BoundaryLocation> best;
        double best_dist = eps;
        for (std::size_t i = 0; i < size(); ++i) {
            const Point2 a = edge_start(i);
            const Point2 ab = edge_end(i) - a;
            const double t = std::clamp(dot(p - a, ab) / dot(ab, ab), 0.0, 1.0);
            const double d = distance(p, a + t * ab);
            if (d <= best_dist) {
                best_dist = d;
                best = BoundaryLocation{i, t};
            }
        }
        if (!best) throw GeometryError("point is not on the domain boundary");
        return *best;
    }

    /// True when @p p is inside or on the polygon up to @p tol.
    [[nodiscard]] bool contains(Point2 p, double tol = 0.0) const noexcept
    {
        const std::size_t n = vertices_.size();
        for (std::size_t k = 0; k < n; ++k) {
            const Point2 a = vertices_[k];
            const Point2 b = vertices_[(k + 1) % n];
            if (cross(b - a, p - a) < -tol * distance(a, b)) return false;
        }
        return true;
    }

private:
    [[nodiscard]] std::size_t wrap(std::size_t i) const noexcept { return i % points_.size(); }

    std::vector<Point2> vertices_;
    std::vector<Point2> points_;
    std::vector<bool> declared_;
    std::vector<bool> is_vertex_;
    std::vector<double> angles_;
    double area_{0.0};
    double diameter_{0.0};
    double tol_{0.0};
    Point2 centroid_{};
};

/// Interior angle omega_i at boundary point A_i, in (0, pi].
[[nodiscard]] inline double interior_angle(const PolygonDomain& domain, std::size_t i)
{
    if (i >= domain.size())
        throw GeometryError("boundary point index " + std::to_string(i) + " out of range (M = " +
                            std::to_string(domain.size()) + ")");
    return domain.angle(i);
}

[[nodiscard]] inline BoundaryLocation locate_on_boundary(const PolygonDomain& domain, Point2 p,
                                                         std::optional<double> tol = std::nullopt)
{
    return domain.locate_on_boundary(p, tol);
}

/// Sum of exterior turning angles at the polygon vertices (2 pi for a closed convex polygon).
[[nodiscard]] inline double total_turning(const PolygonDomain& domain)
{
    const auto& v = domain.vertices();
    const std::size_t n = v.size();
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const Point2 in = v[k] - v[(k + n - 1) % n];
        const Point2 out = v[(k + 1) % n] - v[k];
        sum += std::atan2(cross(in, out), dot(in, out));
    }
    return sum;
}

} // namespace nitsche
