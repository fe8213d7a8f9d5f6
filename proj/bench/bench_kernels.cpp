// Serial reference against OpenMP kernels: transfers and the fine sweep.

#include "pinto/experiment.hpp"
#include "pinto/mesh_gen.hpp"
#include "pinto/transfer.hpp"

#include <benchmark/benchmark.h>

#include <map>
#include <memory>
#include <random>

using namespace pinto;

namespace {

struct TransferFixture {
    LayeredMesh coarse;
    Refinement r;
    std::unique_ptr<TransferPair> pair;
    OceanState coarse_state;
    OceanState fine_state;

    explicit TransferFixture(int n)
        : coarse(gen::random_mesh(1, n, Geometry::spherical, {0.0, -50.0, -150.0, -300.0, -500.0, -800.0})),
          r(refine_congruent(coarse))
    {
        pair = std::make_unique<TransferPair>(coarse, r.fine, r.map);
        coarse_state = OceanState::zeros(coarse);
        std::mt19937_64 rng(1);
        std::uniform_real_distribution<double> d(-1.0, 1.0);
        for (Field f : all_fields)
            for (double& x : coarse_state.field(f)) x = d(rng);
        fine_state = pair->lift(coarse_state, Exec::serial);
    }
};

const TransferFixture& transfer_fixture(int n)
{
    static std::map<int, std::unique_ptr<TransferFixture>> cache;
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<TransferFixture>(n);
    return *slot;
}

void BM_Lift(benchmark::State& state)
{
    const auto& fx = transfer_fixture(static_cast<int>(state.range(0)));
    const Exec exec = state.range(1) ? Exec::parallel : Exec::serial;
    for (auto _ : state) benchmark::DoNotOptimize(fx.pair->lift(fx.coarse_state, exec));
    state.SetLabel(exec == Exec::parallel ? "parallel" : "serial");
}

void BM_Restrict(benchmark::State& state)
{
    const auto& fx = transfer_fixture(static_cast<int>(state.range(0)));
    const Exec exec = state.range(1) ? Exec::parallel : Exec::serial;
    for (auto _ : state) benchmark::DoNotOptimize(fx.pair->restrict(fx.fine_state, exec));
    state.SetLabel(exec == Exec::parallel ? "parallel" : "serial");
}

// One Parareal iteration's fine sweep over all slices; workers = 0 means the
// serial loop.
void BM_FineSweep(benchmark::State& state)
{
    ExperimentConfig cfg;
    cfg.toy.nx = cfg.toy.ny = 8;
    cfg.slices = 4;
    cfg.slice_days = 0.5;
    cfg.out.clear();
    auto ex = make_experiment(cfg);
    const OceanState u0 = ex->initial_state(1, 0.1);
    int iteration = 1;
    const auto problem = ex->problem(&iteration);
    std::vector<OceanState> U(cfg.slices + 1, u0);
    parareal::Config pc = cfg.parareal;
    pc.workers = static_cast<int>(state.range(0));
    pc.parallel = pc.workers > 0;
    std::vector<std::string> errors;
    std::vector<double> seconds;
    for (auto _ : state) benchmark::DoNotOptimize(parareal::fine_parallel_sweep(U, 1, problem, pc, errors, seconds));
    state.SetLabel(pc.parallel ? "workers " + std::to_string(pc.workers) : "serial");
}

}  // namespace

BENCHMARK(BM_Lift)->ArgsProduct({{16, 32}, {0, 1}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Restrict)->ArgsProduct({{16, 32}, {0, 1}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_FineSweep)->Arg(0)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
