#include "nitsche/analysis.hpp"
#include "nitsche/io.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>

using namespace nitsche;
using std::numbers::pi;

namespace {

Mesh refined(const PolygonDomain& d, ElementKind kind, int times)
{
    Mesh m = generate_initial(d, kind, 1);
    for (int k = 0; k < times; ++k) m = refine_uniform(m);
    return m;
}

ConvergenceRecord row(std::size_t level, double h, double e)
{
    return ConvergenceRecord{level, h, 0, 0, e, std::nullopt};
}

class ThreadsEnv {
public:
    explicit ThreadsEnv(const char* value)
    {
        if (const char* old = std::getenv("NITSCHE_FEM_THREADS")) saved_ = old;
        setenv("NITSCHE_FEM_THREADS", value, 1);
    }
    ~ThreadsEnv()
    {
        if (saved_) setenv("NITSCHE_FEM_THREADS", saved_->c_str(), 1);
        else unsetenv("NITSCHE_FEM_THREADS");
    }

private:
    std::optional<std::string> saved_;
};

} // namespace

class EvaluationByKind : public ::testing::TestWithParam<ElementKind> {};

TEST_P(EvaluationByKind, LinearFieldsAreReproduced)
{
    const ManufacturedCase c = jump_rectangle_case();
    const Mesh m = refined(c.domain, GetParam(), 2);
    const auto lin = [](Point2 p) { return 2.0 - 3.0 * p.x + 0.5 * p.y; };
    const DiscreteSolution ones(m, std::vector<double>(m.node_count(), 1.0), {});
    const DiscreteSolution sol(m, interpolate(m, lin), {});
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> ux(-1, 1), uy(0, 1);
    for (int k = 0; k < 200; ++k) {
        const Point2 p{ux(rng), uy(rng)};
        EXPECT_NEAR(eval_fe(ones, p), 1.0, 1e-14);
        EXPECT_NEAR(eval_fe(sol, p), lin(p), 1e-13);
    }
}

TEST_P(EvaluationByKind, ValuesAgreeAcrossInterfaces)
{
    const ManufacturedCase c = jump_rectangle_case();
    const Mesh m = refined(c.domain, GetParam(), 1);
    std::vector<double> coeff(m.node_count());
    for (std::size_t i = 0; i < coeff.size(); ++i) coeff[i] = std::cos(3.0 * static_cast<double>(i));
    const DiscreteSolution sol(m, coeff, {});
    // Points on shared edges, evaluated from both neighbouring cells.
    for (std::size_t e = 0; e < m.element_count(); ++e) {
        const auto ie = m.element(e);
        for (std::size_t f = e + 1; f < m.element_count(); ++f) {
            const auto jf = m.element(f);
            std::vector<std::size_t> shared;
            for (const std::size_t a : ie)
                for (const std::size_t b : jf)
                    if (a == b) shared.push_back(a);
            if (shared.size() != 2) continue;
            for (const double t : {0.25, 0.5, 0.8}) {
                const Point2 p = (1.0 - t) * m.nodes()[shared[0]] + t * m.nodes()[shared[1]];
                EXPECT_NEAR(sol.fe_value_in(e, p), sol.fe_value_in(f, p), 1e-14);
            }
        }
    }
}

INSTANTIATE_TEST_SUITE_P(Kinds, EvaluationByKind, ::testing::Values(ElementKind::P1Triangle, ElementKind::Q1Quad),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(Analysis, FullEvaluationAddsSingularParts)
{
    const ManufacturedCase c = jump_rectangle_case();
    const RegularizedProblem prob = regularize(c);
    const Mesh m = refined(c.domain, ElementKind::P1Triangle, 1);
    std::vector<double> coeff(m.node_count(), 0.25);
    const DiscreteSolution sol(m, coeff, prob.singular_parts());
    for (const Point2 p : {Point2{0.3, 0.4}, Point2{-0.5, 0.1}, Point2{0.0, 0.7}})
        EXPECT_NEAR(eval_full(sol, p) - eval_fe(sol, p), std::atan2(p.y, p.x), 1e-14);
    EXPECT_THROW((void)eval_fe(sol, {2.0, 0.5}), AnalysisError);
    EXPECT_THROW(DiscreteSolution(m, {1.0}, {}), AnalysisError);
}

TEST(Analysis, L2ErrorExamples)
{
    const PolygonDomain sq({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
    for (const ElementKind kind : {ElementKind::P1Triangle, ElementKind::Q1Quad}) {
        const Mesh m = refined(sq, kind, 1);
        const DiscreteSolution zero(m, std::vector<double>(m.node_count(), 0.0), {});
        EXPECT_NEAR(l2_error(zero, [](Point2) { return 1.0; }), 1.0, 1e-14);
        // int_0^1 int_0^1 (xy)^2 = 1/9.
        EXPECT_NEAR(l2_error(zero, [](Point2 p) { return p.x * p.y; }), 1.0 / 3.0, 1e-14);
    }
}

TEST(Analysis, InterpolantConvergesAtSecondOrder)
{
    const ManufacturedCase c = smooth_sine_case();
    std::vector<ConvergenceRecord> rows;
    Mesh m = generate_initial(c.domain, ElementKind::P1Triangle, 4);
    for (std::size_t level = 0; level < 4; ++level) {
        const DiscreteSolution s(m, interpolate(m, c.exact), {});
        rows.push_back(row(level, m.h(), l2_error(s, c.exact)));
        m = refine_uniform(m);
    }
    rows = eoc(rows);
    EXPECT_NEAR(*rows.back().eoc, 2.0, 0.05);
}

TEST(Analysis, EocExamples)
{
    auto r = eoc({row(0, 0.5, 0.04), row(1, 0.25, 0.01)});
    EXPECT_FALSE(r[0].eoc.has_value());
    EXPECT_DOUBLE_EQ(*r[1].eoc, 2.0);
    r = eoc({row(0, 0.5, 0.01), row(1, 0.25, 0.01)});
    EXPECT_DOUBLE_EQ(*r[1].eoc, 0.0);
    r = eoc({row(0, 1.0, 8.0), row(1, 0.5, 1.0)});
    EXPECT_DOUBLE_EQ(*r[1].eoc, 3.0);
    r = eoc({row(0, 0.5, 0.01), row(1, 0.25, 0.0)});
    EXPECT_FALSE(r[1].eoc.has_value());
    EXPECT_THROW((void)eoc({row(0, 0.5, 0.01), row(1, 0.5, 0.001)}), AnalysisError);
}

// u - u_h and u_hat - u_hat_h are the same function.
TEST(Analysis, CancellationIdentity)
{
    const ManufacturedCase c = jump_rectangle_case();
    const RegularizedProblem prob = regularize(c);
    const Mesh m = refined(c.domain, ElementKind::P1Triangle, 3);
    const LevelResult res = solve_level(c, prob, m, 10.0);
    const auto& singular = prob.singular_parts();
    const DiscreteSolution fe_only(m, res.report.solution, {});
    const double regular = l2_error(fe_only, [&](Point2 p) { return c.exact(p) - sum_singular(singular, p); });
    EXPECT_NEAR(res.l2_error, regular, 1e-10);
}

TEST(Analysis, ErrorIsIndependentOfNodeOrdering)
{
    const ManufacturedCase c = jump_rectangle_case();
    const Mesh m = refined(c.domain, ElementKind::P1Triangle, 2);
    const std::size_t n = m.node_count();
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = (7 * i + 3) % n; // gcd(7, n) = 1 for n = 45
    ASSERT_EQ(n, 45u);
    std::vector<Point2> nodes(n);
    for (std::size_t i = 0; i < n; ++i) nodes[perm[i]] = m.nodes()[i];
    std::vector<Mesh::Cell> cells = m.cells();
    for (auto& cell : cells)
        for (std::size_t k = 0; k < 3; ++k) cell[k] = perm[cell[k]];
    const Mesh permuted(m.domain(), m.kind(), nodes, cells);

    const RegularizedProblem prob = regularize(c);
    const double e1 = solve_level(c, prob, m, 10.0).l2_error;
    const double e2 = solve_level(c, prob, permuted, 10.0).l2_error;
    EXPECT_NEAR(e1, e2, 1e-12 * e1);
}

TEST(Analysis, StudyIsBitwiseReproducibleAcrossThreadCounts)
{
    const ManufacturedCase c = jump_rectangle_case();
    std::string serial, threaded, again;
    {
        ThreadsEnv env("1");
        serial = convergence_csv(run_convergence_study(c, ElementKind::P1Triangle, 4, 10.0).table);
    }
    {
        ThreadsEnv env("4");
        threaded = convergence_csv(run_convergence_study(c, ElementKind::P1Triangle, 4, 10.0).table);
        again = convergence_csv(run_convergence_study(c, ElementKind::P1Triangle, 4, 10.0).table);
    }
    EXPECT_EQ(serial, threaded);
    EXPECT_EQ(threaded, again);
}

TEST(Analysis, FailedLevelKeepsCompletedRows)
{
    const StudyResult r = run_convergence_study(jump_rectangle_case(), ElementKind::P1Triangle, 3, 1.0);
    ASSERT_TRUE(r.table.failure.has_value());
    EXPECT_NE(r.table.failure->find("level 0"), std::string::npos);
    EXPECT_TRUE(r.table.records.empty());
    EXPECT_THROW((void)run_convergence_study(jump_rectangle_case(), ElementKind::P1Triangle, 0, 10.0), AnalysisError);
}

TEST(Analysis, LinearPatchIsExactForBothElements)
{
    for (const ElementKind kind : {ElementKind::P1Triangle, ElementKind::Q1Quad}) {
        const StudyResult r = run_convergence_study(linear_patch_case(), kind, 4, 10.0);
        ASSERT_FALSE(r.table.failure.has_value());
        for (const auto& rec : r.table.records) EXPECT_LE(rec.l2_error, 1e-8);
    }
}

TEST(Analysis, Q1ConvergesAtSecondOrder)
{
    const StudyResult r = run_convergence_study(jump_rectangle_case(), ElementKind::Q1Quad, 5, 10.0);
    ASSERT_FALSE(r.table.failure.has_value());
    EXPECT_NEAR(*r.table.records.back().eoc, 2.0, 0.2);
}
