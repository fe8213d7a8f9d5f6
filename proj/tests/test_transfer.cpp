#include "pinto/mesh_gen.hpp"
#include "pinto/transfer.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace pinto;

namespace {

struct Pair {
    LayeredMesh coarse;
    Refinement r;
    std::unique_ptr<TransferPair> pair;

    Pair(LayeredMesh c, NodeRestriction mode = NodeRestriction::injection, BottomMethod bm = BottomMethod::linear)
        : coarse(std::move(c)), r(refine_congruent(coarse, bm))
    {
        pair = std::make_unique<TransferPair>(coarse, r.fine, r.map, mode);
    }
};

}  // namespace

TEST(Transfer, NodeRestrictOfLiftIsIdentity)
{
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const Geometry g = seed % 2 ? Geometry::planar : Geometry::spherical;
        Pair p(gen::random_mesh(seed, 6, g));
        const OceanState s = oracle::random_state(p.coarse, seed);
        const OceanState back = p.pair->restrict(p.pair->lift(s));
        EXPECT_EQ(back.temperature, s.temperature);
        EXPECT_EQ(back.salinity, s.salinity);
        EXPECT_EQ(back.w, s.w);
        const auto norms = interp_error_norms(s, *p.pair, RoundTrip::cfc);
        for (Field f : {Field::temperature, Field::salinity, Field::w})
            for (const auto& n : norms[f]) EXPECT_EQ(n.max_error, 0.0);
    }
}

TEST(Transfer, ElementRestrictOfLiftIsIdentity)
{
    Pair p(gen::random_mesh(3, 7, Geometry::spherical));
    const OceanState s = oracle::random_state(p.coarse, 99);
    const OceanState back = p.pair->restrict(p.pair->lift(s));
    for (int k = 0; k < p.coarse.layer_count(); ++k)
        for (int t : p.coarse.masks().elements[k]) {
            const std::size_t at = static_cast<std::size_t>(k) * p.coarse.element_count() + t;
            EXPECT_NEAR(back.u[at], s.u[at], 1e-15);
            EXPECT_NEAR(back.v[at], s.v[at], 1e-15);
        }
}

TEST(Transfer, LiftFillsEveryFineActiveEntry)
{
    Pair p(gen::random_mesh(5, 8, Geometry::spherical));
    EXPECT_TRUE(p.pair->mask_mismatches().empty());
    const OceanState s = oracle::random_state(p.coarse, 5, 1.0, 2.0);
    const OceanState f = p.pair->lift(s);
    const LayeredMesh& fine = p.r.fine;
    for (int k = 0; k < fine.layer_count(); ++k) {
        for (int i = 0; i < fine.node_count(); ++i) {
            const double t = f.temperature[static_cast<std::size_t>(k) * fine.node_count() + i];
            if (fine.node_active(i, k))
                EXPECT_TRUE(t >= 1.0 && t <= 2.0) << "node " << i << " layer " << k;
            else
                EXPECT_EQ(t, 0.0);
        }
        for (int e = 0; e < fine.element_count(); ++e) {
            const double u = f.u[static_cast<std::size_t>(k) * fine.element_count() + e];
            if (fine.element_active(e, k))
                EXPECT_TRUE(u >= 1.0 && u <= 2.0) << "element " << e << " layer " << k;
            else
                EXPECT_EQ(u, 0.0);
        }
    }
}

TEST(Transfer, MidpointIsEdgeMean)
{
    Pair p(gen::example_triangle());
    std::vector<double> c{1.0, 3.0, 7.0};
    const auto f = p.pair->lift_node_field(c, 0);
    EXPECT_EQ(f[3], 2.0);
    EXPECT_EQ(f[4], 4.0);
    EXPECT_EQ(f[5], 5.0);
}

TEST(Transfer, ElementLiftAndRestrictConserveAreaIntegral)
{
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        const Geometry g = seed % 2 ? Geometry::planar : Geometry::spherical;
        Pair p(gen::random_mesh(seed, 7, g));
        const OceanState cs = oracle::random_state(p.coarse, seed);
        const OceanState fs = oracle::random_state(p.r.fine, seed + 100);
        const OceanState lifted = p.pair->lift(cs);
        const OceanState restricted = p.pair->restrict(fs);
        for (Field f : {Field::u, Field::v})
            for (int k = 0; k < p.coarse.layer_count(); ++k) {
                const auto a = oracle::element_conservation(*p.pair, cs.slab(f, k), lifted.slab(f, k), k);
                EXPECT_LE(a.worst_parent, 1e-12);
                EXPECT_LE(a.global, 1e-12);
                const auto b = oracle::element_conservation(*p.pair, restricted.slab(f, k), fs.slab(f, k), k);
                EXPECT_LE(b.worst_parent, 1e-12);
                EXPECT_LE(b.global, 1e-12);
            }
    }
}

TEST(Transfer, ChildWeightsSumToOne)
{
    Pair p(gen::random_mesh(8, 5, Geometry::spherical));
    for (const auto& kids : p.r.map.children) {
        double s = 0.0;
        for (int c : kids) s += p.pair->child_weight(c);
        EXPECT_NEAR(s, 1.0, 1e-15);
    }
}

TEST(Transfer, ConservativeNodeRestrictionKeepsConstants)
{
    Pair p(gen::random_mesh(2, 6), NodeRestriction::conservative);
    OceanState s = OceanState::zeros(p.coarse);
    for (int k = 0; k < p.coarse.layer_count(); ++k)
        for (int i : p.coarse.masks().nodes[k]) s.temperature[static_cast<std::size_t>(k) * p.coarse.node_count() + i] = 4.25;
    const OceanState back = p.pair->restrict(p.pair->lift(s));
    EXPECT_EQ(back.temperature, s.temperature);
}

TEST(Transfer, ConservativeRestrictionAveragesNeighbours)
{
    Pair p(gen::example_triangle(), NodeRestriction::conservative);
    std::vector<double> fine(6, 0.0);
    fine[0] = 1.0;
    fine[3] = 3.0;
    fine[4] = 3.0;
    const auto c = p.pair->restrict_node_field(fine, 0);
    const double a0 = p.r.fine.dual_area(0), a3 = 0.5 * p.r.fine.dual_area(3), a4 = 0.5 * p.r.fine.dual_area(4);
    EXPECT_NEAR(c[0], (a0 * 1.0 + a3 * 3.0 + a4 * 3.0) / (a0 + a3 + a4), 1e-14);
}

TEST(Transfer, SerialAndParallelAgree)
{
    Pair p(gen::random_mesh(6, 9, Geometry::spherical));
    const OceanState cs = oracle::random_state(p.coarse, 6);
    const OceanState fs = oracle::random_state(p.r.fine, 7);
    EXPECT_EQ(p.pair->lift(cs, Exec::serial), p.pair->lift(cs, Exec::parallel));
    EXPECT_EQ(p.pair->restrict(fs, Exec::serial), p.pair->restrict(fs, Exec::parallel));
}

TEST(Transfer, ClockTravelsWithTheState)
{
    Pair p(gen::random_mesh(1, 4));
    OceanState s = OceanState::zeros(p.coarse);
    s.clock = 86400.0 * 3;
    EXPECT_EQ(p.pair->lift(s).clock, s.clock);
}

TEST(Transfer, RejectsMismatchedInput)
{
    Pair p(gen::random_mesh(1, 4));
    EXPECT_THROW(p.pair->lift(OceanState::zeros(p.r.fine)), Error);
    EXPECT_THROW(p.pair->lift_node_field(std::vector<double>(3), 0), Error);
    EXPECT_THROW(p.pair->lift_node_field(std::vector<double>(p.coarse.node_count()), 99), Error);
    const LayeredMesh other = gen::random_mesh(2, 4);
    EXPECT_THROW(TransferPair(other, p.r.fine, p.r.map), Error);
}

TEST(Transfer, FineCorrectionRoundTrip)
{
    // L(R(f)) reproduces a lifted field exactly
    Pair p(gen::random_mesh(4, 6, Geometry::spherical));
    const OceanState f = p.pair->lift(oracle::random_state(p.coarse, 4));
    const auto norms = interp_error_norms(f, *p.pair, RoundTrip::fcf);
    for (Field fld : {Field::temperature, Field::salinity, Field::w})
        for (const auto& n : norms[fld]) EXPECT_EQ(n.max_error, 0.0);
}
