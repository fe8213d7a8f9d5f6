#include "pinto/experiment.hpp"
#include "pinto/ocean_parareal.hpp"
#include "pinto/restart.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

using namespace pinto;

namespace {

ExperimentConfig small_config()
{
    ExperimentConfig c;
    c.toy.nx = c.toy.ny = 6;
    c.toy.depths = {0.0, 50.0, 150.0, 300.0};
    c.toy.bottom = 300.0;
    c.slices = 4;
    c.slice_days = 1.0;
    c.coarse_spd = 24.0;
    c.fine_spd = 48.0;
    c.model.box_lon0 = c.toy.lon0;
    c.model.box_lon1 = c.toy.lon1;
    c.model.box_lat0 = c.toy.lat0;
    c.model.box_lat1 = c.toy.lat1;
    c.model.damping = 1.0 / seconds_per_day;
    c.parareal.max_iterations = 4;
    c.parareal.epsilon = 0.0;
    c.out.clear();
    c.seed = 3;
    c.noise = 0.2;
    return c;
}

std::vector<std::string> lines_of(const std::filesystem::path& p)
{
    std::ifstream in(p);
    std::vector<std::string> out;
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

}  // namespace

TEST(OceanParareal, ReferencesAgreeWithoutClamping)
{
    auto ex = make_experiment(small_config());
    const OceanState u0 = ex->initial_state(3, 0.2);
    const References refs = ex->references(u0);
    ASSERT_EQ(refs.uninterrupted.size(), 5u);
    for (int n = 0; n <= 4; ++n) EXPECT_EQ(refs.uninterrupted[n], refs.restarted[n]) << "slice " << n;
    EXPECT_DOUBLE_EQ(refs.uninterrupted[4].clock, 4 * seconds_per_day);
}

TEST(OceanParareal, FiniteTerminationIsExact)
{
    auto ex = make_experiment(small_config());
    const OceanState u0 = ex->initial_state(3, 0.2);
    const References refs = ex->references(u0);
    const auto result = ex->run(u0, &refs, true);
    const auto& run = result.run;
    EXPECT_EQ(run.outcome, parareal::Outcome::finite_termination);
    ASSERT_EQ(run.history.size(), 5u);
    for (int k = 1; k <= 4; ++k)
        for (int n = 1; n <= k; ++n) {
            EXPECT_LE(max_abs_difference(run.history[k].U[n], refs.uninterrupted[n]), 1e-12) << "k " << k << " n " << n;
            EXPECT_LE(max_abs_difference(run.history[k].U[n], refs.restarted[n]), 1e-12);
        }
    // error points cover every iteration and slice
    EXPECT_EQ(result.errors.size(), 5u * 4u);
    EXPECT_EQ(result.tables.front().diagnostic, "max_error");
}

TEST(OceanParareal, ClassicalModeTerminates)
{
    ExperimentConfig c = small_config();
    c.parareal.mode = parareal::Mode::classical;
    auto ex = make_experiment(c);
    EXPECT_EQ(&ex->coarse_model().mesh(), &ex->fine());
    const OceanState u0 = ex->initial_state(3, 0.2);
    const References refs = ex->references(u0);
    const auto result = ex->run(u0, &refs, true);
    for (int n = 1; n <= 4; ++n) EXPECT_LE(max_abs_difference(result.run.U[n], refs.uninterrupted[n]), 1e-12);
}

TEST(OceanParareal, SkipUpdateOnInjectedBlowUp)
{
    ExperimentConfig c = small_config();
    c.parareal.failure = parareal::FailurePolicy::skip_update;
    c.inject_fine = {{2, 3}};
    auto ex = make_experiment(c);
    const OceanState u0 = ex->initial_state(3, 0.2);
    const auto result = ex->run(u0, nullptr, true);
    const auto& h = result.run.history;
    EXPECT_EQ(h[2].U[3], h[1].U[3]);
    EXPECT_EQ(result.run.iterations[2].status[2], parareal::SliceStatus::fine_failed);
    EXPECT_NE(h[2].U[4], h[1].U[4]);
    // slice 2 becomes exact as usual
    auto clean = make_experiment(small_config());
    const auto reference = clean->run(u0, nullptr, true);
    EXPECT_EQ(h[2].U[2], reference.run.history[2].U[2]);
    EXPECT_EQ(h[1].U, reference.run.history[1].U);
}

TEST(OceanParareal, AbortOnInjectedBlowUp)
{
    ExperimentConfig c = small_config();
    c.inject_fine = {{1, 2}};
    auto ex = make_experiment(c);
    try {
        ex->run(ex->initial_state(3, 0.2));
        FAIL() << "expected an abort";
    } catch (const parareal::Failure& f) {
        EXPECT_EQ(f.iteration(), 1);
        EXPECT_EQ(f.slice(), 2);
    }
}

TEST(OceanParareal, RunDirectoryLayout)
{
    ExperimentConfig c = small_config();
    c.out = oracle::scratch_dir("ocean_run");
    c.parareal.max_iterations = 2;
    c.diagnostics = diag::Selection::parse("sst,amoc");
    c.diagnostics.amoc_lat = 35.0;
    c.run_id = "t";
    auto ex = make_experiment(c);
    const OceanState u0 = ex->initial_state(3, 0.2);
    const References refs = ex->references(u0, c.out / "restarted");
    ex->run(u0, &refs);
    for (const char* f : {"U", "G", "F"}) EXPECT_TRUE(std::filesystem::exists(c.out / "iter1" / "slice2" / (std::string(f) + ".restart")));
    EXPECT_FALSE(std::filesystem::exists(c.out / "iter0" / "slice2" / "F.restart"));
    EXPECT_TRUE(std::filesystem::exists(c.out / "iter2" / "slice4" / "clock.txt"));
    EXPECT_TRUE(std::filesystem::exists(c.out / "restarted" / "slice4" / "U.restart"));
    const OceanState back = read_restart(c.out / "iter2" / "slice1" / "U.restart", ex->fine());
    EXPECT_EQ(back, refs.uninterrupted[1]);
    for (const char* csv : {"max_error__t.csv", "sst__t.csv", "amoc__t.csv", "layer_error__t.csv"})
        EXPECT_TRUE(std::filesystem::exists(c.out / csv)) << csv;

    const auto log = lines_of(c.out / "run.log");
    ASSERT_FALSE(log.empty());
    EXPECT_EQ(log.front()[0], '#');
    EXPECT_NE(log.back().find("outcome 0 max_iterations"), std::string::npos);
    int fine_lines = 0;
    for (const auto& l : log)
        if (l.find(" fine ") != std::string::npos) ++fine_lines;
    // iteration 1 propagates slices 1-4, iteration 2 slices 2-4
    EXPECT_EQ(fine_lines, 7);
    EXPECT_GT(measured_ratio(c.out / "run.log"), 0.0);
}

TEST(OceanParareal, MeasuredRatio)
{
    const auto dir = oracle::scratch_dir("ratio");
    {
        std::ofstream log(dir / "run.log");
        log << "# header\n0 1 coarse 1.000000 ok\n0 2 coarse 3.000000 ok\n1 1 fine 8.000000 ok\n"
               "1 2 fine 1.000000 fine_failed\n1 0 increment 0.5 ok\n";
    }
    EXPECT_DOUBLE_EQ(measured_ratio(dir / "run.log"), 4.0);
    {
        std::ofstream log(dir / "bad.log");
        log << "garbage\n";
    }
    EXPECT_THROW(measured_ratio(dir / "bad.log"), Error);
}

TEST(OceanParareal, ClampAfterUpdateHoldsBounds)
{
    ExperimentConfig c = small_config();
    c.model.bounds.temp_min = 5.0;
    c.parareal.clamp = parareal::ClampPolicy::after_update;
    c.parareal.max_iterations = 2;
    auto ex = make_experiment(c);
    const auto result = ex->run(ex->initial_state(3, 0.2));
    const LayeredMesh& m = ex->fine();
    for (int n = 1; n <= 4; ++n)
        for (int k = 0; k < m.layer_count(); ++k)
            for (int i : m.masks().nodes[k])
                EXPECT_GE(result.run.U[n].temperature[static_cast<std::size_t>(k) * m.node_count() + i], 5.0);
}
