#pragma once

/**
 * @file assembly.hpp
 * @brief Element and boundary-facet kernels of the symmetric Nitsche form
 *
 *   a_h(w, v) = (grad w, grad v) + (mu w, v)
 *             - <v, grad w . n> - <w, grad v . n> + gamma/h <w, v>
 *   l_h(v)    = (f_hat, v) - <g_hat, grad v . n> + gamma/h <g_hat, v>
 *
 * and their scatter into a global sparse system. Angle brackets are integrals
 * over the domain boundary; h is the global mesh size.
 */

#include "nitsche/boundary_data.hpp"
#include "nitsche/error.hpp"
#include "nitsche/geometry.hpp"
#include "nitsche/mesh.hpp"
#include "nitsche/parallel.hpp"
#include "nitsche/quadrature.hpp"
#include "nitsche/reference_cell.hpp"
#include "nitsche/sparse.hpp"

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace nitsche {

template <std::size_t N>
using LocalMatrix = std::array<std::array<double, N>, N>;

template <std::size_t N>
using LocalVector = std::array<double, N>;

template <ElementKind Kind>
using CellPoints = std::array<Point2, ReferenceCell<Kind>::n>;

/// Default volume rule used by assembly: degree 4 on triangles, 3x3 Gauss on quads.
template <ElementKind Kind>
[[nodiscard]] QuadratureRule default_volume_rule()
{
    if constexpr (Kind == ElementKind::P1Triangle) return triangle_rule(4);
    else return square_rule(3);
}

[[nodiscard]] inline LineRule default_facet_rule() { return gauss_legendre(4); }

namespace detail {

template <std::size_t N>
void symmetrize_from_upper(LocalMatrix<N>& m) noexcept
{
    for (std::size_t a = 0; a < N; ++a)
        for (std::size_t b = 0; b < a; ++b) m[a][b] = m[b][a];
}

} // namespace detail

/// Entries int_K mu phi_a phi_b.
template <ElementKind Kind>
[[nodiscard]] LocalMatrix<ReferenceCell<Kind>::n> local_mass(const CellPoints<Kind>& cell, const ScalarField& mu,
                                                             const QuadratureRule& rule)
{
    constexpr std::size_t n = ReferenceCell<Kind>::n;
    LocalMatrix<n> m{};
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const auto mp = map_point<Kind>(cell, rule.points[q]);
        const double w = rule.weights[q] * mp.det_j * mu(mp.x);
        if (w == 0.0) continue;
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = a; b < n; ++b) m[a][b] += w * mp.phi[a] * mp.phi[b];
    }
    detail::symmetrize_from_upper(m);
    return m;
}

/// Entries int_K grad phi_a . grad phi_b.
template <ElementKind Kind>
[[nodiscard]] LocalMatrix<ReferenceCell<Kind>::n> local_stiffness(const CellPoints<Kind>& cell,
                                                                  const QuadratureRule& rule)
{
    constexpr std::size_t n = ReferenceCell<Kind>::n;
    LocalMatrix<n> m{};
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const auto mp = map_point<Kind>(cell, rule.points[q]);
        const double w = rule.weights[q] * mp.det_j;
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = a; b < n; ++b) m[a][b] += w * dot(mp.grad_phi[a], mp.grad_phi[b]);
    }
    detail::symmetrize_from_upper(m);
    return m;
}

/// Geometry of a boundary facet as seen from its parent cell.
struct FacetGeometry {
    std::size_t local_edge{0};
    Point2 normal{};
};

/// Penalty term gamma/h int_F phi_a phi_b for every pair of parent-cell basis functions.
template <ElementKind Kind>
[[nodiscard]] LocalMatrix<ReferenceCell<Kind>::n> local_facet_penalty(const CellPoints<Kind>& cell,
                                                                      const FacetGeometry& facet, double gamma,
                                                                      double h, const LineRule& rule)
{
    constexpr std::size_t n = ReferenceCell<Kind>::n;
    const double half_len = 0.5 * distance(cell[facet.local_edge % n], cell[(facet.local_edge + 1) % n]);
    const double scale = gamma / h;
    LocalMatrix<n> m{};
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
        const auto mp = map_point<Kind>(cell, reference_edge_point<Kind>(facet.local_edge, rule.points[q]));
        const double w = rule.weights[q] * half_len * scale;
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = a; b < n; ++b) m[a][b] += w * mp.phi[a] * mp.phi[b];
    }
    detail::symmetrize_from_upper(m);
    return m;
}

/// Consistency and symmetry terms -int_F phi_a (grad phi_b . n) - int_F phi_b (grad phi_a . n).
template <ElementKind Kind>
[[nodiscard]] LocalMatrix<ReferenceCell<Kind>::n> local_facet_consistency(const CellPoints<Kind>& cell,
                                                                          const FacetGeometry& facet,
                                                                          const LineRule& rule)
{
    constexpr std::size_t n = ReferenceCell<Kind>::n;
    const double half_len = 0.5 * distance(cell[facet.local_edge % n], cell[(facet.local_edge + 1) % n]);
    LocalMatrix<n> m{};
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
        const auto mp = map_point<Kind>(cell, reference_edge_point<Kind>(facet.local_edge, rule.points[q]));
        const double w = rule.weights[q] * half_len;
        std::array<double, n> dn{};
        for (std::size_t a = 0; a < n; ++a) dn[a] = dot(mp.grad_phi[a], facet.normal);
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = a; b < n; ++b) m[a][b] -= w * (mp.phi[a] * dn[b] + mp.phi[b] * dn[a]);
    }
    detail::symmetrize_from_upper(m);
    return m;
}

/// Full Nitsche boundary contribution of one facet.
template <ElementKind Kind>
[[nodiscard]] LocalMatrix<ReferenceCell<Kind>::n> local_nitsche_facet(const CellPoints<Kind>& cell,
                                                                      const FacetGeometry& facet, double gamma,
                                                                      double h, const LineRule& rule)
{
    if (!(gamma > 0.0) || !(h > 0.0)) throw AssemblyError("Nitsche penalty needs gamma > 0 and h > 0");
    auto m = local_facet_consistency<Kind>(cell, facet, rule);
    const auto p = local_facet_penalty<Kind>(cell, facet, gamma, h, rule);
    for (std::size_t a = 0; a < m.size(); ++a)
        for (std::size_t b = 0; b < m.size(); ++b) m[a][b] += p[a][b];
    return m;
}

/// Volume load int_K f_hat phi_a.
template <ElementKind Kind>
[[nodiscard]] LocalVector<ReferenceCell<Kind>::n> local_load(const CellPoints<Kind>& cell, const ScalarField& f_hat,
                                                             const QuadratureRule& rule)
{
    constexpr std::size_t n = ReferenceCell<Kind>::n;
    LocalVector<n> v{};
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const auto mp = map_point<Kind>(cell, rule.points[q]);
        const double w = rule.weights[q] * mp.det_j * f_hat(mp.x);
        for (std::size_t a = 0; a < n; ++a) v[a] += w * mp.phi[a];
    }
    return v;
}

/// Boundary load -int_F g_hat (grad phi_a . n) + gamma/h int_F g_hat phi_a.
template <ElementKind Kind>
[[nodiscard]] LocalVector<ReferenceCell<Kind>::n> local_facet_load(const CellPoints<Kind>& cell,
                                                                   const FacetGeometry& facet,
                                                                   const std::function<double(Point2)>& g_hat,
                                                                   double gamma, double h, const LineRule& rule)
{
    constexpr std::size_t n = ReferenceCell<Kind>::n;
    const double half_len = 0.5 * distance(cell[facet.local_edge % n], cell[(facet.local_edge + 1) % n]);
    const double scale = gamma / h;
    LocalVector<n> v{};
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
        const auto mp = map_point<Kind>(cell, reference_edge_point<Kind>(facet.local_edge, rule.points[q]));
        const double w = rule.weights[q] * half_len * g_hat(mp.x);
        for (std::size_t a = 0; a < n; ++a) v[a] += w * (scale * mp.phi[a] - dot(mp.grad_phi[a], facet.normal));
    }
    return v;
}

struct SparseSystem {
    CsrMatrix matrix;
    std::vector<double> rhs;

    [[nodiscard]] std::size_t size() const noexcept { return rhs.size(); }
};

namespace detail {

template <ElementKind Kind>
SparseSystem assemble_impl(const Mesh& mesh, const RegularizedProblem& problem, double gamma)
{
    constexpr std::size_t n = ReferenceCell<Kind>::n;
    const QuadratureRule volume = default_volume_rule<Kind>();
    const LineRule edge_rule = default_facet_rule();
    const double h = mesh.h();
    const std::size_t m_count = problem.domain().size();

    // Facets are ordered by parent element; record each element's range.
    const auto& facets = mesh.boundary_facets();
    std::vector<std::size_t> facet_begin(mesh.element_count() + 1, 0);
    for (const auto& f : facets) {
        if (f.boundary_edge >= m_count)
            throw AssemblyError("boundary facet (" + std::to_string(f.nodes[0]) + ", " + std::to_string(f.nodes[1]) +
                                ") has no valid boundary edge tag");
        ++facet_begin[f.element + 1];
    }
    for (std::size_t e = 0; e < mesh.element_count(); ++e) facet_begin[e + 1] += facet_begin[e];

    std::vector<LocalMatrix<n>> mats(mesh.element_count());
    std::vector<LocalVector<n>> vecs(mesh.element_count());
    parallel_for(mesh.element_count(), [&](std::size_t e) {
        const auto all = mesh.element_points(e);
        CellPoints<Kind> cell{};
        std::copy_n(all.begin(), n, cell.begin());

        auto k = local_stiffness<Kind>(cell, volume);
        const auto mass = local_mass<Kind>(cell, problem.mu, volume);
        auto load = local_load<Kind>(cell, problem.f_hat, volume);
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b) k[a][b] += mass[a][b];

        for (std::size_t fi = facet_begin[e]; fi < facet_begin[e + 1]; ++fi) {
            const BoundaryFacet& f = facets[fi];
            const FacetGeometry geo{f.local_edge, f.normal};
            const auto fm = local_nitsche_facet<Kind>(cell, geo, gamma, h, edge_rule);
            const auto g_on_edge = [&](Point2 p) { return problem.g_hat.at(f.boundary_edge, p); };
            const auto fl = local_facet_load<Kind>(cell, geo, g_on_edge, gamma, h, edge_rule);
            for (std::size_t a = 0; a < n; ++a) {
                load[a] += fl[a];
                for (std::size_t b = 0; b < n; ++b) k[a][b] += fm[a][b];
            }
        }
        mats[e] = k;
        vecs[e] = load;
    });

    TripletBuilder builder(mesh.node_count());
    std::vector<double> rhs(mesh.node_count(), 0.0);
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
        const auto idx = mesh.element(e);
        for (std::size_t a = 0; a < n; ++a) {
            rhs[idx[a]] += vecs[e][a];
            for (std::size_t b = 0; b < n; ++b) builder.add(idx[a], idx[b], mats[e][a][b]);
        }
    }
    return SparseSystem{builder.finalize(), std::move(rhs)};
}

} // namespace detail

/**
 * Assembles the Nitsche system of the regularized problem on @p mesh. Element
 * kernels run in parallel; the scatter is sequential in element order so the
 * result is bitwise independent of the worker count.
 */
[[nodiscard]] inline SparseSystem assemble(const Mesh& mesh, const RegularizedProblem& problem, double gamma)
{
    if (!(gamma > 0.0)) throw AssemblyError("penalty parameter gamma must be positive");
    if (mesh.domain().size() != problem.domain().size())
        throw AssemblyError("mesh and regularized problem use different boundary partitions");
    if (mesh.kind() == ElementKind::P1Triangle) return detail::assemble_impl<ElementKind::P1Triangle>(mesh, problem, gamma);
    return detail::assemble_impl<ElementKind::Q1Quad>(mesh, problem, gamma);
}

} // namespace nitsche
