#include <benchmark/benchmark.h>

#include "mlht/lo_solver.hpp"
#include "mlht/mc_engine.hpp"
#include "mlht/sn_reference.hpp"

using namespace mlht;

namespace {

SlabProblem scattering_slab()
{
    SlabProblem p;
    p.length = 1.0;
    p.regions.push_back({0.0, 1.0, 1.0, 0.9, 1.0});
    return p;
}

} // namespace

static void BM_HistoryTracking(benchmark::State& state)
{
    const SlabProblem p = scattering_slab();
    const GridHierarchy h = build_hierarchy(p, static_cast<int>(state.range(0)), 2, 0);
    TallySet tally(h.coarsest());
    std::uint64_t k = 0;
    for (auto _ : state) {
        RngStream rng(17, 0, 1, ++k);
        simulate_history(p, tally, rng);
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_HistoryTracking)->Arg(16)->Arg(32)->Arg(64)->Arg(128);

static void BM_HybridRealization(benchmark::State& state)
{
    const SlabProblem p = scattering_slab();
    const GridHierarchy h = build_hierarchy(p, 16, 2, 3);
    RealizationOptions opts;
    opts.with_coarse = true;
    std::uint64_t n = 0;
    for (auto _ : state) {
        auto pair = hybrid_realization(p, h, static_cast<int>(state.range(0)), Method::hqd,
                                       1000, {23, static_cast<std::uint64_t>(state.range(0)), ++n},
                                       opts);
        benchmark::DoNotOptimize(pair.fine.phi.data());
    }
}
BENCHMARK(BM_HybridRealization)->Arg(1)->Arg(2)->Arg(3);

static void BM_BandedSolve(benchmark::State& state)
{
    const SlabProblem p = scattering_slab();
    const GridHierarchy h = build_hierarchy(p, static_cast<int>(state.range(0)), 2, 0);
    const LinearSystem sys =
        assemble_loqd(p, h.coarsest(), QDClosures::diffusion(h.coarsest().cells()));
    for (auto _ : state) {
        auto r = solve_banded(sys);
        benchmark::DoNotOptimize(r.phi.data());
    }
}
BENCHMARK(BM_BandedSolve)->Arg(16)->Arg(128)->Arg(1024);

static void BM_TransportSweepSolve(benchmark::State& state)
{
    const SlabProblem p = scattering_slab();
    const GridHierarchy h = build_hierarchy(p, static_cast<int>(state.range(0)), 2, 0);
    for (auto _ : state) {
        auto af = sn_solve(p, h.coarsest(), 16, 1e-8);
        benchmark::DoNotOptimize(af.psi_avg.data());
    }
}
BENCHMARK(BM_TransportSweepSolve)->Arg(64)->Arg(256);

BENCHMARK_MAIN();
