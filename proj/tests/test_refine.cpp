#include "pinto/mesh_gen.hpp"
#include "pinto/refine.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace pinto;

TEST(Refine, ExampleTriangle)
{
    const Refinement r = refine_congruent(gen::example_triangle());
    const LayeredMesh& f = r.fine;
    ASSERT_EQ(f.node_count(), 6);
    ASSERT_EQ(f.element_count(), 4);
    const std::vector<std::array<int, 3>> expected{{0, 3, 4}, {3, 1, 5}, {3, 5, 4}, {4, 5, 2}};
    for (int e = 0; e < 4; ++e) EXPECT_EQ(f.elements()[e].nodes, expected[e]) << "element " << e + 1;
    EXPECT_EQ(f.bottom()[3], -603.0);
    EXPECT_EQ(f.bottom()[4], -646.5);
    EXPECT_EQ(f.bottom()[5], -577.5);
    EXPECT_EQ(f.level_count(), 48);
    EXPECT_TRUE(f.axis() == gen::example_triangle().axis());
}

TEST(Refine, NearestBottomPicksCloserEndpoint)
{
    const Refinement r = refine_congruent(gen::example_triangle(), BottomMethod::nearest);
    // exact midpoints are equidistant; ties go to the lower node id
    EXPECT_EQ(r.fine.bottom()[3], -672.0);
    EXPECT_EQ(r.fine.bottom()[4], -672.0);
    EXPECT_EQ(r.fine.bottom()[5], -534.0);
}

TEST(Refine, MapIsConsistent)
{
    const LayeredMesh c = gen::random_mesh(11, 6);
    const Refinement r = refine_congruent(c);
    const auto& map = r.map;
    EXPECT_EQ(map.coarse_node_count(), c.node_count());
    EXPECT_EQ(map.midpoint_count(), static_cast<int>(c.edges().edges.size()));
    for (int i = 0; i < c.node_count(); ++i) EXPECT_EQ(r.fine.nodes()[map.shared_nodes[i]].pos, c.nodes()[i].pos);
    for (int t = 0; t < c.element_count(); ++t)
        for (int ch : map.children[t]) EXPECT_EQ(map.parent[ch], t);
    // every midpoint node lies on its coarse edge in the chart
    for (int m = 0; m < map.midpoint_count(); ++m) {
        const auto [a, b] = map.midpoint_edges[m];
        const LonLat p = r.fine.nodes()[map.edge_midpoint_nodes[m]].pos;
        EXPECT_NEAR(p.lon, 0.5 * (c.nodes()[a].pos.lon + c.nodes()[b].pos.lon), 1e-12);
        EXPECT_NEAR(p.lat, 0.5 * (c.nodes()[a].pos.lat + c.nodes()[b].pos.lat), 1e-12);
    }
}

TEST(Refine, MidpointBoundaryFlags)
{
    const LayeredMesh c = gen::box_mesh({.nx = 3, .ny = 3});
    const Refinement r = refine_congruent(c);
    int boundary = 0;
    for (const auto& n : r.fine.nodes()) boundary += n.boundary;
    // 8 rim nodes on the coarse mesh plus 8 rim midpoints
    EXPECT_EQ(boundary, 16);
}

TEST(Refine, CountingLawOnRandomMeshes)
{
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const LayeredMesh c = gen::random_mesh(seed, 4 + static_cast<int>(seed % 6));
        const Refinement r = refine_congruent(c);
        EXPECT_EQ(r.fine.node_count(), c.node_count() + static_cast<int>(c.edges().edges.size()));
        EXPECT_EQ(r.fine.element_count(), 4 * c.element_count());
        for (int t = 0; t < c.element_count(); ++t) {
            const Triangle p = c.corners(t);
            const double s = skewness(p[0], p[1], p[2]);
            for (int ch : r.map.children[t]) {
                const Triangle q = r.fine.corners(ch);
                EXPECT_NEAR(skewness(q[0], q[1], q[2]), s, 1e-12);
            }
        }
    }
}

TEST(Refine, SphericalChildrenTileTheParent)
{
    const LayeredMesh c = gen::random_mesh(4, 6, Geometry::spherical);
    const Refinement r = refine_congruent(c);
    for (int t = 0; t < c.element_count(); ++t) {
        double sum = 0.0;
        for (int ch : r.map.children[t]) sum += r.fine.area(ch);
        EXPECT_NEAR(sum, c.area(t), 1e-12 * c.area(t));
    }
}

TEST(Refine, SeamTrianglesStayLocal)
{
    const LayeredMesh c = gen::band_mesh(8, 3, -20.0, 20.0);
    const Refinement r = refine_congruent(c);
    for (int e = 0; e < r.fine.element_count(); ++e) {
        const Triangle t = r.fine.corners(e);
        const double spread = std::max({t[0].lon, t[1].lon, t[2].lon}) - std::min({t[0].lon, t[1].lon, t[2].lon});
        EXPECT_LT(spread, 60.0);
        EXPECT_GT(r.fine.area(e), 0.0);
    }
    for (Geometry g : {Geometry::planar, Geometry::spherical}) {
        const LonLat m = edge_midpoint({359.0, 0.0}, {1.0, 0.0}, g);
        EXPECT_NEAR(std::min(m.lon, 360.0 - m.lon), 0.0, 1e-12);
    }
}

TEST(Refine, PoleMidpointStaysOnTheSphere)
{
    const LonLat m = edge_midpoint({0.0, 88.0}, {180.0, 88.0}, Geometry::spherical);
    EXPECT_NEAR(m.lat, 90.0, 1e-9);
    // lon/lat averaging would put it at 88N instead
    EXPECT_NEAR(edge_midpoint({0.0, 88.0}, {180.0, 88.0}, Geometry::planar).lat, 88.0, 1e-12);
}

TEST(Refine, RefmapRoundTrip)
{
    const Refinement r = refine_congruent(gen::random_mesh(9, 5));
    std::stringstream s;
    write_refmap(s, r.map);
    const RefinementMap back = read_refmap(s);
    EXPECT_EQ(back.shared_nodes, r.map.shared_nodes);
    EXPECT_EQ(back.midpoint_edges, r.map.midpoint_edges);
    EXPECT_EQ(back.edge_midpoint_nodes, r.map.edge_midpoint_nodes);
    EXPECT_EQ(back.children, r.map.children);
    EXPECT_EQ(back.parent, r.map.parent);
}

TEST(Refine, RefmapRejectsGarbage)
{
    std::istringstream in("S 1 1\nX 2 2\n");
    EXPECT_THROW(read_refmap(in), Error);
    EXPECT_THROW(parse_bottom_method("cubic"), Error);
}
