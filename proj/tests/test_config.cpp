#include "pinto/config.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace pinto;

namespace {

ExperimentConfig parse(const std::string& text)
{
    std::istringstream in(text);
    return parse_config(in);
}

std::string error_of(const std::string& text)
{
    try {
        parse(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST(Config, Defaults)
{
    const ExperimentConfig c = parse("");
    EXPECT_EQ(c.slices, 10);
    EXPECT_EQ(c.slice_days, 5.0);
    EXPECT_EQ(c.coarse_spd, 36.0);
    EXPECT_EQ(c.fine_model().dt, 2400.0);
    EXPECT_EQ(c.parareal.mode, parareal::Mode::micro_macro);
    EXPECT_EQ(c.parareal.epsilon, 1e-2);
    EXPECT_DOUBLE_EQ(c.model.damping, 1.0 / seconds_per_day);
    EXPECT_EQ(c.model.box_lon1, c.toy.lon1);
    const auto g = c.grid();
    EXPECT_EQ(g.slices, 10);
    EXPECT_EQ(g.slice_length, 5.0 * seconds_per_day);
}

TEST(Config, ParsesEveryGroup)
{
    const ExperimentConfig c = parse(
        "# comment\n"
        "mesh.geometry = planar\n"
        "mesh.bottom_method=nearest\n"
        "toy.levels=0,10,30\n"
        "toy.bottom=30  # trailing comment\n"
        "grid.Nt=4\n"
        "grid.slice_days=2\n"
        "model.coarse_spd=24\n"
        "model.fine_spd=48\n"
        "model.relax_days=0\n"
        "bounds.temp_min=-2.0\n"
        "parareal.mode=classical\n"
        "parareal.K_max=3\n"
        "parareal.clamp=after_update\n"
        "parareal.failure=skip_update\n"
        "parareal.node_restriction=conservative\n"
        "inject.fine=1:2, 2:3\n"
        "diagnostics.select=sst, temp@0-10, amoc\n"
        "diagnostics.amoc_reduction=extremum\n"
        "diagnostics.region=0,20\n"
        "run.workers=2\n"
        "run.id=abc\n"
        "run.restarts=false\n");
    EXPECT_EQ(c.geometry, Geometry::planar);
    EXPECT_EQ(c.bottom_method, BottomMethod::nearest);
    EXPECT_EQ(c.toy.depths, (std::vector<double>{0, 10, 30}));
    EXPECT_EQ(c.slices, 4);
    EXPECT_EQ(c.coarse_model().dt, 3600.0);
    EXPECT_EQ(c.fine_model().dt, 1800.0);
    EXPECT_EQ(c.model.relax_rate, 0.0);
    EXPECT_EQ(*c.model.bounds.temp_min, -2.0);
    EXPECT_EQ(c.parareal.mode, parareal::Mode::classical);
    EXPECT_EQ(c.parareal.max_iterations, 3);
    EXPECT_EQ(c.parareal.clamp, parareal::ClampPolicy::after_update);
    EXPECT_EQ(c.parareal.failure, parareal::FailurePolicy::skip_update);
    EXPECT_EQ(c.node_restriction, NodeRestriction::conservative);
    EXPECT_EQ(c.inject_fine.size(), 2u);
    EXPECT_TRUE(c.inject_fine.count({2, 3}));
    EXPECT_EQ(c.diagnostics.names, (std::vector<std::string>{"sst", "temp@0-10", "amoc"}));
    EXPECT_EQ(c.diagnostics.amoc_reduction, diag::Reduction::extremum);
    ASSERT_TRUE(c.region_lon);
    EXPECT_EQ(c.region_lon->second, 20.0);
    EXPECT_EQ(c.parareal.workers, 2);
    EXPECT_EQ(c.run_id, "abc");
    EXPECT_FALSE(c.write_restarts);
}

TEST(Config, ErrorsNameTheLine)
{
    EXPECT_NE(error_of("grid.Nt=4\nbogus.key=1\n").find("<config>:2: unknown key"), std::string::npos);
    EXPECT_NE(error_of("grid.Nt=4\ngrid.Nt=5\n").find(":2: duplicate key"), std::string::npos);
    EXPECT_NE(error_of("no equals sign\n").find(":1: expected key=value"), std::string::npos);
    EXPECT_NE(error_of("grid.Nt=four\n").find("expected an integer"), std::string::npos);
    EXPECT_NE(error_of("parareal.mode=fast\n").find("unknown value 'fast'"), std::string::npos);
    EXPECT_NE(error_of("diagnostics.select=sst,vorticity\n").find("unknown diagnostic"), std::string::npos);
}

TEST(Config, SemanticChecks)
{
    EXPECT_FALSE(error_of("parareal.K_max=11\n").empty());
    EXPECT_FALSE(error_of("model.fine_spd=7\n").empty());      // 86400/7 is not whole
    EXPECT_FALSE(error_of("grid.slice_days=0.01\n").empty());  // not a whole number of steps
    EXPECT_FALSE(error_of("inject.fine=1:11\n").empty());
    EXPECT_FALSE(error_of("inject.fine=1-2\n").empty());
    EXPECT_FALSE(error_of("toy.levels=0,10,5\n").empty());
    EXPECT_FALSE(error_of("toy.bottom=9000\n").empty());
    EXPECT_FALSE(error_of("bounds.temp_min=3\nbounds.temp_max=1\n").empty());
    EXPECT_FALSE(error_of("mesh.coarse=/nonexistent/dir\n").empty());
    EXPECT_FALSE(error_of("run.id=a b\n").empty());
}

TEST(Config, RenderRoundTrips)
{
    const ExperimentConfig c = parse("grid.Nt=6\nparareal.K_max=4\nmodel.damping_days=2.5\ninject.fine=1:3\n"
                                     "diagnostics.select=sss,temp@50\nbounds.salt_max=40\nrun.noise=0.25\n");
    const std::string text = render_config(c);
    const ExperimentConfig back = parse(text);
    EXPECT_EQ(render_config(back), text);
    EXPECT_EQ(back.slices, 6);
    EXPECT_EQ(back.parareal.max_iterations, 4);
    EXPECT_DOUBLE_EQ(back.model.damping, c.model.damping);
    EXPECT_EQ(back.inject_fine, c.inject_fine);
    EXPECT_EQ(back.diagnostics.names, c.diagnostics.names);
    EXPECT_EQ(back.noise, 0.25);
}

TEST(Config, ShippedToyConfigLoads)
{
    const ExperimentConfig c = load_config(std::filesystem::path(PINTO_SOURCE_DIR) / "configs" / "toy.cfg");
    EXPECT_EQ(c.slices, 10);
    EXPECT_EQ(c.toy.nx, 16);
    EXPECT_EQ(c.parareal.max_iterations, 10);
    EXPECT_EQ(c.diagnostics.amoc_reduction, diag::Reduction::extremum);
    EXPECT_THROW(load_config("/nonexistent.cfg"), ConfigError);
}
