#pragma once

/**
 * @file analysis.hpp
 * @brief The discrete solution u_h = u_hat_h + sum_i Theta_i, point evaluation,
 *        L2 errors and convergence studies.
 */

#include "nitsche/assembly.hpp"
#include "nitsche/boundary_data.hpp"
#include "nitsche/cases.hpp"
#include "nitsche/error.hpp"
#include "nitsche/geometry.hpp"
#include "nitsche/mesh.hpp"
#include "nitsche/parallel.hpp"
#include "nitsche/quadrature.hpp"
#include "nitsche/reference_cell.hpp"
#include "nitsche/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace nitsche {

/// Inverse isoparametric map by Newton iteration (one step for affine cells).
template <ElementKind Kind>
[[nodiscard]] Point2 reference_coordinates(const CellPoints<Kind>& cell, Point2 p)
{
    using Ref = ReferenceCell<Kind>;
    Point2 xi = Kind == ElementKind::P1Triangle ? Point2{-1.0 / 3.0, -1.0 / 3.0} : Point2{0.0, 0.0};
    for (int it = 0; it < 30; ++it) {
        const auto phi = Ref::shape(xi);
        const auto dref = Ref::grad(xi);
        Point2 x{};
        double j00 = 0.0, j01 = 0.0, j10 = 0.0, j11 = 0.0;
        for (std::size_t a = 0; a < Ref::n; ++a) {
            x = x + phi[a] * cell[a];
            j00 += cell[a].x * dref[a].x;
            j01 += cell[a].x * dref[a].y;
            j10 += cell[a].y * dref[a].x;
            j11 += cell[a].y * dref[a].y;
        }
        const Point2 res = x - p;
        const double det = j00 * j11 - j01 * j10;
        const Point2 step{(j11 * res.x - j01 * res.y) / det, (-j10 * res.x + j00 * res.y) / det};
        xi = xi - step;
        if (std::abs(step.x) + std::abs(step.y) < 1e-15) break;
    }
    return xi;
}

template <ElementKind Kind>
[[nodiscard]] bool inside_reference(Point2 xi, double tol) noexcept
{
    if constexpr (Kind == ElementKind::P1Triangle) return xi.x >= -1.0 - tol && xi.y >= -1.0 - tol && xi.x + xi.y <= tol;
    else return std::abs(xi.x) <= 1.0 + tol && std::abs(xi.y) <= 1.0 + tol;
}

/// Element containing a point together with the point's reference coordinates.
struct CellHit {
    std::size_t element{0};
    Point2 reference{};
};

/**
 * Point location over a uniform bin grid of element bounding boxes, with a
 * linear scan as fallback.
 */
class PointLocator {
public:
    explicit PointLocator(const Mesh& mesh, double inside_tol = 1e-12) : mesh_(&mesh), tol_(inside_tol)
    {
        const auto& nodes = mesh.nodes();
        lo_ = hi_ = nodes.front();
        for (const Point2 p : nodes) {
            lo_ = {std::min(lo_.x, p.x), std::min(lo_.y, p.y)};
            hi_ = {std::max(hi_.x, p.x), std::max(hi_.y, p.y)};
        }
        bins_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(mesh.element_count()))));
        cells_.resize(bins_ * bins_);
        for (std::size_t e = 0; e < mesh.element_count(); ++e) {
            const auto pts = mesh.element_points(e);
            Point2 a = pts[0], b = pts[0];
            for (std::size_t k = 1; k < mesh.nodes_per_cell(); ++k) {
                a = {std::min(a.x, pts[k].x), std::min(a.y, pts[k].y)};
                b = {std::max(b.x, pts[k].x), std::max(b.y, pts[k].y)};
            }
            const auto [i0, j0] = bin_of(a);
            const auto [i1, j1] = bin_of(b);
            for (std::size_t j = j0; j <= j1; ++j)
                for (std::size_t i = i0; i <= i1; ++i) cells_[j * bins_ + i].push_back(e);
        }
    }

    [[nodiscard]] std::optional<CellHit> locate(Point2 p) const
    {
        const auto [i, j] = bin_of(p);
        for (const std::size_t e : cells_[j * bins_ + i]) {
            if (auto hit = try_cell(e, p)) return hit;
        }
        for (std::size_t e = 0; e < mesh_->element_count(); ++e) {
            if (auto hit = try_cell(e, p)) return hit;
        }
        return std::nullopt;
    }

private:
    [[nodiscard]] std::pair<std::size_t, std::size_t> bin_of(Point2 p) const noexcept
    {
        const auto coord = [&](double v, double lo, double hi) {
            const double t = hi > lo ? (v - lo) / (hi - lo) : 0.0;
            const double k = std::floor(t * static_cast<double>(bins_));
            return static_cast<std::size_t>(std::clamp(k, 0.0, static_cast<double>(bins_ - 1)));
        };
        return {coord(p.x, lo_.x, hi_.x), coord(p.y, lo_.y, hi_.y)};
    }

    [[nodiscard]] std::optional<CellHit> try_cell(std::size_t e, Point2 p) const
    {
        const auto pts = mesh_->element_points(e);
        if (mesh_->kind() == ElementKind::P1Triangle) {
            const CellPoints<ElementKind::P1Triangle> c{pts[0], pts[1], pts[2]};
            const Point2 xi = reference_coordinates<ElementKind::P1Triangle>(c, p);
            if (inside_reference<ElementKind::P1Triangle>(xi, tol_)) return CellHit{e, xi};
        } else {
            const Point2 xi = reference_coordinates<ElementKind::Q1Quad>(pts, p);
            if (inside_reference<ElementKind::Q1Quad>(xi, tol_)) return CellHit{e, xi};
        }
        return std::nullopt;
    }

    const Mesh* mesh_;
    double tol_;
    Point2 lo_{}, hi_{};
    std::size_t bins_{1};
    std::vector<std::vector<std::size_t>> cells_;
};

/// Finite element coefficients of u_hat_h together with the singular parts.
class DiscreteSolution {
public:
    DiscreteSolution(Mesh mesh, std::vector<double> coefficients, std::vector<SingularFunction> singular_parts)
        : mesh_(std::make_shared<const Mesh>(std::move(mesh))),
          coefficients_(std::move(coefficients)),
          singular_parts_(std::move(singular_parts))
    {
        if (coefficients_.size() != mesh_->node_count())
            throw AnalysisError("coefficient vector length does not match the node count");
        locator_ = std::make_shared<const PointLocator>(*mesh_);
    }

    [[nodiscard]] const Mesh& mesh() const noexcept { return *mesh_; }
    [[nodiscard]] const std::vector<double>& coefficients() const noexcept { return coefficients_; }
    [[nodiscard]] const std::vector<SingularFunction>& singular_parts() const noexcept { return singular_parts_; }
    [[nodiscard]] const PointLocator& locator() const noexcept { return *locator_; }

    /// u_hat_h inside element @p e at reference point @p xi.
    [[nodiscard]] double fe_value_reference(std::size_t e, Point2 xi) const
    {
        const auto idx = mesh_->element(e);
        double v = 0.0;
        if (mesh_->kind() == ElementKind::P1Triangle) {
            const auto phi = ReferenceCell<ElementKind::P1Triangle>::shape(xi);
            for (std::size_t a = 0; a < 3; ++a) v += coefficients_[idx[a]] * phi[a];
        } else {
            const auto phi = ReferenceCell<ElementKind::Q1Quad>::shape(xi);
            for (std::size_t a = 0; a < 4; ++a) v += coefficients_[idx[a]] * phi[a];
        }
        return v;
    }

    /// u_hat_h at a physical point, evaluated in a given element.
    [[nodiscard]] double fe_value_in(std::size_t e, Point2 p) const
    {
        const auto pts = mesh_->element_points(e);
        if (mesh_->kind() == ElementKind::P1Triangle)
            return fe_value_reference(e, reference_coordinates<ElementKind::P1Triangle>({pts[0], pts[1], pts[2]}, p));
        return fe_value_reference(e, reference_coordinates<ElementKind::Q1Quad>(pts, p));
    }

private:
    std::shared_ptr<const Mesh> mesh_;
    std::vector<double> coefficients_;
    std::vector<SingularFunction> singular_parts_;
    std::shared_ptr<const PointLocator> locator_;
};

/// u_hat_h(p): interpolation of the nodal coefficients.
[[nodiscard]] inline double eval_fe(const DiscreteSolution& sol, Point2 p)
{
    const auto hit = sol.locator().locate(p);
    if (!hit) throw AnalysisError("evaluation point lies outside the mesh");
    return sol.fe_value_reference(hit->element, hit->reference);
}

/// u_h(p) = u_hat_h(p) + sum_i Theta_i(p).
[[nodiscard]] inline double eval_full(const DiscreteSolution& sol, Point2 p)
{
    return eval_fe(sol, p) + sum_singular(sol.singular_parts(), p);
}

/// Nodal interpolant of a field on the mesh.
[[nodiscard]] inline std::vector<double> interpolate(const Mesh& mesh, const ScalarField& u)
{
    std::vector<double> c(mesh.node_count());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = u(mesh.nodes()[i]);
    return c;
}

/// Default error quadrature: degree 7 on triangles, 4x4 Gauss on quadrilaterals.
[[nodiscard]] inline QuadratureRule error_rule(ElementKind kind)
{
    return kind == ElementKind::P1Triangle ? triangle_rule(7) : square_rule(4);
}

/**
 * ||u - u_h||_{0, Omega} with u_h the full discrete solution (finite element
 * part plus singular parts). Per-element contributions are summed in element
 * order.
 */
[[nodiscard]] inline double l2_error(const DiscreteSolution& sol, const ScalarField& exact)
{
    const Mesh& mesh = sol.mesh();
    const QuadratureRule rule = error_rule(mesh.kind());
    std::vector<double> local(mesh.element_count(), 0.0);
    parallel_for(mesh.element_count(), [&](std::size_t e) {
        const auto pts = mesh.element_points(e);
        double s = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q) {
            Point2 x{};
            double det = 0.0;
            if (mesh.kind() == ElementKind::P1Triangle) {
                const auto mp = map_point<ElementKind::P1Triangle>(
                    CellPoints<ElementKind::P1Triangle>{pts[0], pts[1], pts[2]}, rule.points[q]);
                x = mp.x;
                det = mp.det_j;
            } else {
                const auto mp = map_point<ElementKind::Q1Quad>(pts, rule.points[q]);
                x = mp.x;
                det = mp.det_j;
            }
            const double uh = sol.fe_value_reference(e, rule.points[q]) + sum_singular(sol.singular_parts(), x);
            const double diff = exact(x) - uh;
            s += rule.weights[q] * det * diff * diff;
        }
        local[e] = s;
    });
    double total = 0.0;
    for (const double v : local) total += v;
    return std::sqrt(total);
}

struct ConvergenceRecord {
    std::size_t level{0};
    double h{0.0};
    std::size_t elements{0};
    std::size_t dofs{0};
    double l2_error{0.0};
    std::optional<double> eoc; ///< empty at the first level or when undefined
};

/**
 * Fills in log(e_{k-1}/e_k) / log(h_{k-1}/h_k). A zero error makes the rate
 * undefined, which is reported as an empty value.
 */
[[nodiscard]] inline std::vector<ConvergenceRecord> eoc(std::vector<ConvergenceRecord> records)
{
    for (std::size_t k = 0; k < records.size(); ++k) {
        records[k].eoc.reset();
        if (k == 0) continue;
        const auto& prev = records[k - 1];
        auto& cur = records[k];
        if (!(cur.h < prev.h)) throw AnalysisError("mesh sizes must decrease strictly between levels");
        if (cur.l2_error <= 0.0 || prev.l2_error <= 0.0) continue;
        cur.eoc = std::log(prev.l2_error / cur.l2_error) / std::log(prev.h / cur.h);
    }
    return records;
}

struct ConvergenceTable {
    std::string case_name;
    ElementKind kind{ElementKind::P1Triangle};
    double gamma{10.0};
    std::vector<ConvergenceRecord> records;
    std::optional<std::string> failure; ///< set when a level aborted the study
};

/// Everything produced for one refinement level.
struct LevelResult {
    SparseSystem system;
    SolveReport report;
    DiscreteSolution solution;
    double l2_error{0.0};
};

[[nodiscard]] inline RegularizedProblem regularize(const ManufacturedCase& c)
{
    return regularize(c.domain, c.traces, c.source, c.mu);
}

/// Regularize, assemble, solve and measure on one mesh.
[[nodiscard]] inline LevelResult solve_level(const ManufacturedCase& c, const RegularizedProblem& problem,
                                             const Mesh& mesh, double gamma, SolverOptions solver = {})
{
    SparseSystem system = assemble(mesh, problem, gamma);
    SolveReport report = solve_spd(system, solver);
    DiscreteSolution sol(mesh, report.solution, problem.singular_parts());
    const double err = l2_error(sol, c.exact);
    return LevelResult{std::move(system), std::move(report), std::move(sol), err};
}

struct StudyResult {
    ConvergenceTable table;
    std::optional<LevelResult> last; ///< finest completed level
};

/**
 * Uniform refinement study over @p levels meshes starting from the case's
 * coarse grid. A failing level stops the study; the completed rows are kept
 * and the failure is recorded in the table.
 */
[[nodiscard]] inline StudyResult run_convergence_study(const ManufacturedCase& c, ElementKind kind, int levels,
                                                       double gamma, SolverOptions solver = {})
{
    if (levels < 1) throw AnalysisError("a convergence study needs at least one level");
    StudyResult out;
    out.table.case_name = c.name;
    out.table.kind = kind;
    out.table.gamma = gamma;
    const RegularizedProblem problem = regularize(c);
    std::optional<Mesh> mesh;
    for (int level = 0; level < levels; ++level) {
        try {
            mesh = level == 0 ? generate_initial(c.domain, kind, c.coarse_subdivisions) : refine_uniform(*mesh);
            LevelResult res = solve_level(c, problem, *mesh, gamma, solver);
            out.table.records.push_back(ConvergenceRecord{static_cast<std::size_t>(level), mesh->h(),
                                                          mesh->element_count(), mesh->node_count(), res.l2_error,
                                                          std::nullopt});
            out.last.emplace(std::move(res));
        } catch (const Error& e) {
            out.table.failure = "level " + std::to_string(level) + ": " + e.what();
            break;
        }
    }
    out.table.records = eoc(std::move(out.table.records));
    return out;
}

} // namespace nitsche
