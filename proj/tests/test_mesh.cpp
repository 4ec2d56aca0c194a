#include "nitsche/cases.hpp"
#include "nitsche/mesh.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace nitsche;

namespace {

PolygonDomain jump_rectangle()
{
    return PolygonDomain({{-1.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {-1.0, 1.0}}, {{0.0, 0.0}});
}

PolygonDomain unit_square() { return PolygonDomain({{0, 0}, {1, 0}, {1, 1}, {0, 1}}); }

Mesh refine(Mesh m, int times)
{
    for (int k = 0; k < times; ++k) m = refine_uniform(m);
    return m;
}

} // namespace

TEST(Mesh, CoarseJumpRectangleMesh)
{
    const Mesh m = generate_initial(jump_rectangle(), ElementKind::P1Triangle, 1);
    EXPECT_EQ(m.element_count(), 4u);
    EXPECT_EQ(m.node_count(), 6u);
    EXPECT_EQ(m.boundary_facets().size(), 6u);
    EXPECT_DOUBLE_EQ(m.h(), std::sqrt(2.0));
}

TEST(Mesh, UnitSquareSingleQuad)
{
    const Mesh m = generate_initial(unit_square(), ElementKind::Q1Quad, 1);
    EXPECT_EQ(m.element_count(), 1u);
    EXPECT_EQ(m.node_count(), 4u);
    EXPECT_EQ(m.boundary_facets().size(), 4u);
    EXPECT_DOUBLE_EQ(mesh_size(m), std::sqrt(2.0));
}

TEST(Mesh, FourRefinementsGive1024Elements)
{
    const Mesh m = refine(generate_initial(jump_rectangle(), ElementKind::P1Triangle, 1), 4);
    EXPECT_EQ(m.element_count(), 1024u);
    EXPECT_EQ(m.node_count(), 33u * 17u);
    EXPECT_DOUBLE_EQ(m.h(), std::sqrt(2.0) / 16.0);
}

class RefinementProperties : public ::testing::TestWithParam<ElementKind> {};

TEST_P(RefinementProperties, CountsSizesAndTopology)
{
    const ElementKind kind = GetParam();
    Mesh m = generate_initial(jump_rectangle(), kind, 1);
    for (int level = 0; level <= 4; ++level) {
        const std::size_t nx = 2u << level, ny = 1u << level;
        EXPECT_EQ(m.node_count(), (nx + 1) * (ny + 1));
        EXPECT_EQ(m.element_count(), (kind == ElementKind::P1Triangle ? 2 : 1) * nx * ny);
        // Euler characteristic of a disc.
        EXPECT_EQ(static_cast<long>(m.node_count()) - static_cast<long>(m.edge_count()) +
                      static_cast<long>(m.element_count()),
                  1);
        EXPECT_EQ(m.boundary_facets().size(), 2 * (nx + ny));
        double area = 0.0;
        for (std::size_t e = 0; e < m.element_count(); ++e) area += m.area(e);
        EXPECT_NEAR(area, 2.0, 1e-13);
        EXPECT_LE(m.h() / m.min_diameter(), 8.0);

        const Mesh next = refine_uniform(m);
        EXPECT_NEAR(next.h(), 0.5 * m.h(), 1e-15);
        // Parent nodes keep their indices.
        for (std::size_t i = 0; i < m.node_count(); ++i) EXPECT_EQ(next.nodes()[i], m.nodes()[i]);
        m = next;
    }
}

TEST_P(RefinementProperties, BoundaryFacetsPointOutward)
{
    const Mesh m = refine(generate_initial(jump_rectangle(), GetParam(), 1), 2);
    for (const auto& f : m.boundary_facets()) {
        const Point2 a = m.nodes()[f.nodes[0]], b = m.nodes()[f.nodes[1]];
        const auto pts = m.element_points(f.element);
        Point2 ctr{};
        for (std::size_t k = 0; k < m.nodes_per_cell(); ++k) ctr = ctr + (1.0 / m.nodes_per_cell()) * pts[k];
        EXPECT_GT(dot(f.normal, 0.5 * (a + b) - ctr), 0.0);
        EXPECT_NEAR(norm(f.normal), 1.0, 1e-15);
        const Point2 dn = f.normal - m.domain().outward_normal(f.boundary_edge);
        EXPECT_NEAR(norm(dn), 0.0, 1e-15);
        // Both endpoints lie on the tagged edge.
        for (const Point2 p : {a, b}) {
            const Point2 q = p - m.domain().edge_start(f.boundary_edge);
            EXPECT_NEAR(cross(m.domain().tangent(f.boundary_edge), q), 0.0, 1e-14);
        }
    }
}

TEST_P(RefinementProperties, PartitionPointsAreNodes)
{
    const Mesh m = refine(generate_initial(jump_rectangle(), GetParam(), 1), 3);
    for (const Point2 a : m.domain().points()) {
        bool found = false;
        for (const Point2 p : m.nodes()) found = found || p == a;
        EXPECT_TRUE(found);
    }
}

TEST_P(RefinementProperties, RefinementIsDeterministic)
{
    const Mesh a = refine(generate_initial(jump_rectangle(), GetParam(), 1), 2);
    const Mesh b = refine(generate_initial(jump_rectangle(), GetParam(), 1), 2);
    ASSERT_EQ(a.node_count(), b.node_count());
    for (std::size_t i = 0; i < a.node_count(); ++i) EXPECT_EQ(a.nodes()[i], b.nodes()[i]);
    for (std::size_t e = 0; e < a.element_count(); ++e)
        for (std::size_t k = 0; k < a.nodes_per_cell(); ++k) EXPECT_EQ(a.element(e)[k], b.element(e)[k]);
}

INSTANTIATE_TEST_SUITE_P(Kinds, RefinementProperties,
                         ::testing::Values(ElementKind::P1Triangle, ElementKind::Q1Quad),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(Mesh, GenerationErrors)
{
    const PolygonDomain tri({{0, 0}, {1, 0}, {0, 1}});
    EXPECT_THROW((void)generate_initial(tri, ElementKind::P1Triangle, 1), MeshError);
    EXPECT_THROW((void)generate_initial(unit_square(), ElementKind::P1Triangle, 0), MeshError);
    const PolygonDomain odd({{0, 0}, {1.5, 0}, {1.5, 1}, {0, 1}});
    EXPECT_THROW((void)generate_initial(odd, ElementKind::P1Triangle, 1), MeshError);
    // A declared point that is not a grid node.
    const PolygonDomain off({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{0.3, 0.0}});
    EXPECT_THROW((void)generate_initial(off, ElementKind::P1Triangle, 1), MeshError);
}

TEST(Mesh, ConstructorRejectsClockwiseCells)
{
    EXPECT_THROW(Mesh(unit_square(), ElementKind::P1Triangle, {{0, 0}, {1, 0}, {1, 1}, {0, 1}},
                      {{0, 2, 1, 0}, {0, 3, 2, 0}}),
                 MeshError);
}

TEST(Mesh, RegisteredCasesMesh)
{
    for (const auto& name : case_names()) {
        const ManufacturedCase c = make_case(name);
        for (const ElementKind kind : {ElementKind::P1Triangle, ElementKind::Q1Quad}) {
            const Mesh m = generate_initial(c.domain, kind, c.coarse_subdivisions);
            EXPECT_GT(m.element_count(), 0u);
        }
    }
}
