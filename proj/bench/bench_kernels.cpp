#include <benchmark/benchmark.h>

#include "bestcell/interference.hpp"
#include "bestcell/iopr.hpp"
#include "bestcell/montecarlo.hpp"

namespace {

bestcell::NetworkConfig config() {
    bestcell::NetworkConfig cfg;
    cfg.eta = 3.0;
    cfg.sigma_db = 8.0;
    cfg.rc = 1000.0;
    return cfg;
}

bestcell::montecarlo::SimSpec sim_spec(std::int64_t samples) {
    bestcell::montecarlo::SimSpec spec;
    spec.cfg = config();
    spec.samples = static_cast<std::uint64_t>(samples);
    return spec;
}

void BM_SimulateSerial(benchmark::State& state) {
    const auto spec = sim_spec(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(bestcell::montecarlo::simulate_serial(spec));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SimulateParallel(benchmark::State& state) {
    const auto spec = sim_spec(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(bestcell::montecarlo::simulate(spec));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_OcifCurve(benchmark::State& state, bestcell::ExecPolicy policy) {
    const auto cfg = config();
    const auto points = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            bestcell::interference::ocif_spatial_distribution(cfg, bestcell::interference::kInfiniteNetwork, points, {},
                                                              policy));
    }
}

void BM_IoprCurve(benchmark::State& state, bestcell::ExecPolicy policy) {
    const auto cfg = config();
    const auto points = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            bestcell::iopr::iopr_spatial_stats(cfg, bestcell::interference::kInfiniteNetwork, points, policy));
    }
}

}  // namespace

BENCHMARK(BM_SimulateSerial)->Arg(1 << 16)->Arg(1 << 18)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SimulateParallel)->Arg(1 << 16)->Arg(1 << 18)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_OcifCurve, serial, bestcell::ExecPolicy::serial())->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_OcifCurve, parallel, bestcell::ExecPolicy{})->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_IoprCurve, serial, bestcell::ExecPolicy::serial())->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_IoprCurve, parallel, bestcell::ExecPolicy{})->Arg(100)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
