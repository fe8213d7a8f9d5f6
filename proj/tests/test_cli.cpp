#include "pinto/mesh_io.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Result {
    int code = -1;
    std::string out;
};

Result cli(const std::string& args, const fs::path& scratch)
{
    const fs::path capture = scratch / "stdout.txt";
    const std::string cmd = std::string(PINTO_CLI) + " " + args + " > " + capture.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    Result r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(capture);
    std::stringstream s;
    s << in.rdbuf();
    r.out = s.str();
    return r;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path small_config(const fs::path& dir, const std::string& extra = {})
{
    const fs::path p = dir / "small.cfg";
    std::ofstream out(p);
    out << "toy.nx=5\ntoy.ny=5\ntoy.levels=0,50,150\ntoy.bottom=150\n"
           "grid.slice_days=1\ngrid.Nt=3\nmodel.coarse_spd=24\nmodel.fine_spd=24\n"
           "parareal.K_max=3\nparareal.epsilon=0\n"
           "diagnostics.select=sst,temp@0-150,amoc\ndiagnostics.amoc_lat=35\ndiagnostics.amoc_reduction=extremum\n"
           "run.out=out\nrun.id=cli\n"
        << extra;
    return p;
}

}  // namespace

TEST(Cli, SpeedupTable)
{
    const auto dir = oracle::scratch_dir("cli_speedup");
    const Result r = cli("speedup --m 3.6 -K 3", dir);
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("1 1.8\n"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("2 1.2\n"), std::string::npos);
    EXPECT_NE(r.out.find("3 0.9\n"), std::string::npos);
    EXPECT_EQ(cli("speedup", dir).code, 2);
}

TEST(Cli, UsageErrors)
{
    const auto dir = oracle::scratch_dir("cli_usage");
    EXPECT_EQ(cli("", dir).code, 2);
    EXPECT_EQ(cli("frobnicate", dir).code, 2);
    EXPECT_EQ(cli("run parareal", dir).code, 2);
    EXPECT_EQ(cli("run parareal --config " + (dir / "missing.cfg").string(), dir).code, 2);
    std::ofstream(dir / "bad.cfg") << "grid.Nt=3\nwhat=1\n";
    const Result r = cli("run serial --config " + (dir / "bad.cfg").string(), dir);
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.out.find("bad.cfg:2"), std::string::npos) << r.out;
    EXPECT_EQ(cli("--help", dir).code, 0);
}

TEST(Cli, MeshRefineAndStats)
{
    const auto dir = oracle::scratch_dir("cli_mesh");
    ASSERT_EQ(cli("mesh generate --kind triangle --out " + (dir / "tri").string(), dir).code, 0);
    const Result r = cli("mesh refine " + (dir / "tri").string() + " " + (dir / "fine").string(), dir);
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_EQ(slurp(dir / "fine" / "elem2d.out"), "4\n1 4 5\n4 2 6\n4 6 5\n5 6 3\n");
    const std::string aux = slurp(dir / "fine" / "aux3d.out");
    EXPECT_NE(aux.find("-672\n-534\n-621\n-603\n-646.5\n-577.5\n"), std::string::npos);
    EXPECT_TRUE(fs::exists(dir / "fine" / "refmap.txt"));
    EXPECT_TRUE(fs::exists(dir / "fine" / "gridfile.txt"));

    const Result s = cli("mesh stats " + (dir / "fine").string(), dir);
    EXPECT_EQ(s.code, 0);
    EXPECT_NE(s.out.find("nodes 6\n"), std::string::npos) << s.out;
    EXPECT_NE(s.out.find("elements 4\n"), std::string::npos);
    EXPECT_EQ(cli("mesh stats " + (dir / "nowhere").string(), dir).code, 1);
}

TEST(Cli, RefinedMeshFromDiskDrivesARun)
{
    const auto dir = oracle::scratch_dir("cli_disk_mesh");
    const fs::path cfg = small_config(dir);
    ASSERT_EQ(cli("mesh generate --kind config --config " + cfg.string() + " --out " + (dir / "coarse").string(), dir).code, 0);
    ASSERT_EQ(cli("mesh refine " + (dir / "coarse").string() + " " + (dir / "fine").string(), dir).code, 0);
    std::ofstream(cfg, std::ios::app) << "mesh.coarse=coarse\nmesh.fine=fine\n";
    const Result r = cli("run parareal --config " + cfg.string(), dir);
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("outcome finite_termination"), std::string::npos) << r.out;
}

TEST(Cli, ParallelRunSerialReferenceAndDiagnose)
{
    const auto dir = oracle::scratch_dir("cli_run");
    const fs::path cfg = small_config(dir);
    const Result serial = cli("run serial --config " + cfg.string(), dir);
    ASSERT_EQ(serial.code, 0) << serial.out;
    EXPECT_NE(serial.out.find("max gap uninterrupted vs restarted: 0"), std::string::npos) << serial.out;

    const Result para = cli("run parareal --config " + cfg.string() + " --workers 2", dir);
    ASSERT_EQ(para.code, 0) << para.out;
    EXPECT_TRUE(fs::exists(dir / "out" / "config.txt"));
    EXPECT_TRUE(fs::exists(dir / "out" / "sst__cli.csv"));
    const std::string first = slurp(dir / "out" / "temp_0-150__cli.csv");

    // diagnose rebuilds the tables from the restart files
    const Result d = cli("diagnose --config " + cfg.string(), dir);
    ASSERT_EQ(d.code, 0) << d.out;
    EXPECT_EQ(slurp(dir / "out" / "temp_0-150__cli.csv"), first);
    EXPECT_EQ(cli("diagnose --config " + cfg.string() + " --select sst,ssh", dir).code, 2);
    EXPECT_EQ(cli("diagnose --config " + cfg.string() + " --select sss", dir).code, 0);
    EXPECT_TRUE(fs::exists(dir / "out" / "sss__cli.csv"));

    const Result sp = cli("speedup --log " + (dir / "out" / "run.log").string() + " -K 2 --Nt 3", dir);
    EXPECT_EQ(sp.code, 0) << sp.out;
    EXPECT_NE(sp.out.find("m "), std::string::npos);
}

TEST(Cli, ExitCodes)
{
    const auto dir = oracle::scratch_dir("cli_exit");
    const Result limited = cli("run parareal --config " + small_config(dir, "").string(), dir);
    EXPECT_EQ(limited.code, 0);

    const auto dir2 = oracle::scratch_dir("cli_exit_k");
    std::string text = slurp(small_config(dir2));
    text.replace(text.find("parareal.K_max=3"), 16, "parareal.K_max=1");
    std::ofstream(dir2 / "k1.cfg") << text;
    EXPECT_EQ(cli("run parareal --config " + (dir2 / "k1.cfg").string(), dir2).code, 4);

    const auto dir3 = oracle::scratch_dir("cli_exit_abort");
    EXPECT_EQ(cli("run parareal --config " + small_config(dir3, "inject.fine=1:2\n").string(), dir3).code, 3);
    const auto dir4 = oracle::scratch_dir("cli_exit_skip");
    EXPECT_EQ(cli("run parareal --config " +
                      small_config(dir4, "inject.fine=1:2\nparareal.failure=skip_update\n").string(),
                  dir4)
                  .code,
              0);
}
