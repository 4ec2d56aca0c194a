#pragma once

/**
 * @file mesh.hpp
 * @brief Conforming triangle / quadrilateral meshes of a polygon with boundary
 *        facets tagged by the boundary edge they lie on.
 */

#include "nitsche/error.hpp"
#include "nitsche/geometry.hpp"
#include "nitsche/reference_cell.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace nitsche {

struct BoundaryFacet {
    std::array<std::size_t, 2> nodes{}; ///< in the parent cell's counter-clockwise order
    std::size_t element{0};
    std::size_t local_edge{0};
    std::size_t boundary_edge{0}; ///< index i of the boundary edge containing the facet
    Point2 normal{};              ///< outward unit normal
};

class Mesh {
public:
    using Cell = std::array<std::size_t, 4>;

    Mesh(PolygonDomain domain, ElementKind kind, std::vector<Point2> nodes, std::vector<Cell> cells)
        : domain_(std::move(domain)), kind_(kind), nodes_(std::move(nodes)), cells_(std::move(cells))
    {
        check_cells();
        build_facets();
        check_partition_points();
        h_ = 0.0;
        for (std::size_t e = 0; e < cells_.size(); ++e) h_ = std::max(h_, diameter(e));
    }

    [[nodiscard]] ElementKind kind() const noexcept { return kind_; }
    [[nodiscard]] std::size_t nodes_per_cell() const noexcept { return vertex_count(kind_); }
    [[nodiscard]] const PolygonDomain& domain() const noexcept { return domain_; }
    [[nodiscard]] const std::vector<Point2>& nodes() const noexcept { return nodes_; }
    [[nodiscard]] std::size_t node_count() const noexcept { return nodes_.size(); }
    [[nodiscard]] std::size_t element_count() const noexcept { return cells_.size(); }
    [[nodiscard]] const std::vector<BoundaryFacet>& boundary_facets() const noexcept { return facets_; }

    [[nodiscard]] std::span<const std::size_t> element(std::size_t e) const
    {
        return std::span<const std::size_t>(cells_.at(e).data(), nodes_per_cell());
    }

    /// Vertex coordinates of cell @p e (unused trailing slot zero for triangles).
    [[nodiscard]] std::array<Point2, 4> element_points(std::size_t e) const
    {
        std::array<Point2, 4> p{};
        const auto idx = element(e);
        for (std::size_t a = 0; a < idx.size(); ++a) p[a] = nodes_[idx[a]];
        return p;
    }

    [[nodiscard]] double diameter(std::size_t e) const
    {
        const auto p = element_points(e);
        const std::size_t n = nodes_per_cell();
        double d = 0.0;
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = a + 1; b < n; ++b) d = std::max(d, distance(p[a], p[b]));
        return d;
    }

    [[nodiscard]] double area(std::size_t e) const
    {
        const auto p = element_points(e);
        const std::size_t n = nodes_per_cell();
        double twice = 0.0;
        for (std::size_t a = 0; a < n; ++a) twice += cross(p[a], p[(a + 1) % n]);
        return 0.5 * twice;
    }

    /// Mesh size h: the largest element diameter.
    [[nodiscard]] double h() const noexcept { return h_; }

    [[nodiscard]] double min_diameter() const
    {
        double d = h_;
        for (std::size_t e = 0; e < cells_.size(); ++e) d = std::min(d, diameter(e));
        return d;
    }

    /// Number of distinct cell edges (interior and boundary).
    [[nodiscard]] std::size_t edge_count() const
    {
        std::map<std::pair<std::size_t, std::size_t>, int> edges;
        for (std::size_t e = 0; e < cells_.size(); ++e) {
            const auto c = element(e);
            for (std::size_t k = 0; k < c.size(); ++k) edges[sorted(c[k], c[(k + 1) % c.size()])] = 1;
        }
        return edges.size();
    }

    [[nodiscard]] const std::vector<Cell>& cells() const noexcept { return cells_; }

private:
    static std::pair<std::size_t, std::size_t> sorted(std::size_t a, std::size_t b) noexcept
    {
        return a < b ? std::pair{a, b} : std::pair{b, a};
    }

    void check_cells() const
    {
        const std::size_t n = nodes_per_cell();
        for (std::size_t e = 0; e < cells_.size(); ++e) {
            for (std::size_t a = 0; a < n; ++a) {
                if (cells_[e][a] >= nodes_.size())
                    throw MeshError("cell " + std::to_string(e) + " references a missing node");
            }
            if (!(area(e) > 0.0)) throw MeshError("cell " + std::to_string(e) + " is not counter-clockwise");
        }
    }

    void build_facets()
    {
        struct Use {
            std::size_t element;
            std::size_t local_edge;
            int count;
        };
        std::map<std::pair<std::size_t, std::size_t>, Use> uses;
        const std::size_t n = nodes_per_cell();
        for (std::size_t e = 0; e < cells_.size(); ++e) {
            for (std::size_t k = 0; k < n; ++k) {
                const auto key = sorted(cells_[e][k], cells_[e][(k + 1) % n]);
                auto [it, inserted] = uses.try_emplace(key, Use{e, k, 0});
                if (++it->second.count > 2) throw MeshError("non-manifold edge in mesh");
            }
        }
        std::vector<std::pair<std::size_t, std::size_t>> boundary;
        for (const auto& [key, use] : uses) {
            if (use.count == 1) boundary.emplace_back(use.element, use.local_edge);
        }
        std::sort(boundary.begin(), boundary.end());

        const double tol = domain_.tolerance();
        for (const auto& [e, k] : boundary) {
            BoundaryFacet f;
            f.element = e;
            f.local_edge = k;
            f.nodes = {cells_[e][k], cells_[e][(k + 1) % n]};
            const Point2 a = nodes_[f.nodes[0]];
            const Point2 b = nodes_[f.nodes[1]];
            const BoundaryLocation loc = domain_.locate_on_boundary(0.5 * (a + b));
            f.boundary_edge = loc.edge;
            // Both endpoints must lie on the closed edge, so no facet straddles a point A_i.
            const Point2 s = domain_.edge_start(loc.edge);
            const Point2 d = domain_.edge_end(loc.edge) - s;
            const double len2 = dot(d, d);
            for (const Point2 q : {a, b}) {
                const double t = dot(q - s, d) / len2;
                if (std::abs(cross(d, q - s)) / std::sqrt(len2) > tol || t < -tol || t > 1.0 + tol)
                    throw MeshError("boundary facet is not contained in a single boundary edge");
            }
            const Point2 ab = b - a;
            const double len = norm(ab);
            f.normal = {ab.y / len, -ab.x / len};
            facets_.push_back(f);
        }
    }

    void check_partition_points() const
    {
        const double tol = domain_.tolerance();
        for (const Point2 p : domain_.points()) {
            const bool found = std::any_of(nodes_.begin(), nodes_.end(),
                                           [&](Point2 q) { return distance(p, q) <= tol; });
            if (!found) throw MeshError("boundary partition point is not a mesh node");
        }
    }

    PolygonDomain domain_;
    ElementKind kind_;
    std::vector<Point2> nodes_;
    std::vector<Cell> cells_;
    std::vector<BoundaryFacet> facets_;
    double h_{0.0};
};

/**
 * Structured coarse mesh of an axis-aligned rectangle with @p n0 cells per
 * unit length. Triangles split each cell along its (+1, +1) diagonal. Every
 * boundary partition point must fall on a grid node.
 */
[[nodiscard]] inline Mesh generate_initial(const PolygonDomain& domain, ElementKind kind, int n0)
{
    if (n0 < 1) throw MeshError("n0 must be at least 1");
    const auto& v = domain.vertices();
    if (v.size() != 4) throw MeshError("unsupported domain: structured generation needs an axis-aligned rectangle");
    const double tol = domain.tolerance();
    for (std::size_t k = 0; k < 4; ++k) {
        const Point2 d = v[(k + 1) % 4] - v[k];
        if (std::abs(d.x) > tol && std::abs(d.y) > tol)
            throw MeshError("unsupported domain: structured generation needs an axis-aligned rectangle");
    }
    double x0 = v[0].x, x1 = v[0].x, y0 = v[0].y, y1 = v[0].y;
    for (const Point2 p : v) {
        x0 = std::min(x0, p.x);
        x1 = std::max(x1, p.x);
        y0 = std::min(y0, p.y);
        y1 = std::max(y1, p.y);
    }
    const auto cells_along = [&](double extent) {
        const double c = extent * n0;
        const double r = std::round(c);
        if (r < 1.0 || std::abs(c - r) > 1e-9 * std::max(1.0, c))
            throw MeshError("rectangle side is not a whole number of cells for n0 = " + std::to_string(n0));
        return static_cast<std::size_t>(r);
    };
    const std::size_t nx = cells_along(x1 - x0);
    const std::size_t ny = cells_along(y1 - y0);

    std::vector<Point2> nodes;
    nodes.reserve((nx + 1) * (ny + 1));
    for (std::size_t j = 0; j <= ny; ++j) {
        for (std::size_t i = 0; i <= nx; ++i) {
            const double x = i == nx ? x1 : x0 + (x1 - x0) * static_cast<double>(i) / static_cast<double>(nx);
            const double y = j == ny ? y1 : y0 + (y1 - y0) * static_cast<double>(j) / static_cast<double>(ny);
            nodes.push_back({x, y});
        }
    }
    const auto id = [nx](std::size_t i, std::size_t j) { return j * (nx + 1) + i; };

    std::vector<Mesh::Cell> cells;
    for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t i = 0; i < nx; ++i) {
            const std::size_t a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
            if (kind == ElementKind::P1Triangle) {
                cells.push_back({a, b, c, 0});
                cells.push_back({a, c, d, 0});
            } else {
                cells.push_back({a, b, c, d});
            }
        }
    }
    return Mesh(domain, kind, std::move(nodes), std::move(cells));
}

/**
 * Uniform red refinement: every cell splits into four children through its
 * edge midpoints (plus the centre for quadrilaterals). Parent nodes keep their
 * indices; new nodes follow in order of first appearance.
 */
[[nodiscard]] inline Mesh refine_uniform(const Mesh& m)
{
    std::vector<Point2> nodes = m.nodes();
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> midpoint;
    const auto mid = [&](std::size_t a, std::size_t b) {
        const auto key = a < b ? std::pair{a, b} : std::pair{b, a};
        auto it = midpoint.find(key);
        if (it != midpoint.end()) return it->second;
        nodes.push_back(0.5 * (nodes[a] + nodes[b]));
        midpoint.emplace(key, nodes.size() - 1);
        return nodes.size() - 1;
    };

    std::vector<Mesh::Cell> cells;
    cells.reserve(4 * m.element_count());
    if (m.kind() == ElementKind::P1Triangle) {
        for (std::size_t e = 0; e < m.element_count(); ++e) {
            const auto c = m.element(e);
            const std::size_t ab = mid(c[0], c[1]), bc = mid(c[1], c[2]), ca = mid(c[2], c[0]);
            cells.push_back({c[0], ab, ca, 0});
            cells.push_back({ab, c[1], bc, 0});
            cells.push_back({ca, bc, c[2], 0});
            cells.push_back({ab, bc, ca, 0});
        }
    } else {
        std::vector<std::array<std::size_t, 4>> mids;
        for (std::size_t e = 0; e < m.element_count(); ++e) {
            const auto c = m.element(e);
            mids.push_back({mid(c[0], c[1]), mid(c[1], c[2]), mid(c[2], c[3]), mid(c[3], c[0])});
        }
        for (std::size_t e = 0; e < m.element_count(); ++e) {
            const auto c = m.element(e);
            const auto p = m.element_points(e);
            nodes.push_back(0.25 * (p[0] + p[1] + p[2] + p[3]));
            const std::size_t ctr = nodes.size() - 1;
            const auto& [ab, bc, cd, da] = mids[e];
            cells.push_back({c[0], ab, ctr, da});
            cells.push_back({ab, c[1], bc, ctr});
            cells.push_back({ctr, bc, c[2], cd});
            cells.push_back({da, ctr, cd, c[3]});
        }
    }
    return Mesh(m.domain(), m.kind(), std::move(nodes), std::move(cells));
}

[[nodiscard]] inline double mesh_size(const Mesh& m) noexcept { return m.h(); }

} // namespace nitsche
