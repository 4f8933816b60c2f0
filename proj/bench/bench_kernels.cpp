// Parallel kernels against their serial counterparts and the straight-loop references.

#include <benchmark/benchmark.h>

#include "sublab/adaptive.hpp"
#include "sublab/generators.hpp"
#include "sublab/harness.hpp"

using namespace sublab;

namespace {

const CategoricalRaster& landscape() {
    static const CategoricalRaster r = generate_smoothed_binary({990, 990, 30, 0.5, 1});
    return r;
}

ExperimentConfig point_config() {
    ExperimentConfig c;
    c.legends = {Legend::binary({1}, 0.5), Legend::majority()};
    for (int n : {4, 25, 144}) c.designs.push_back(PointBased{n});
    c.realizations = 36;
    c.shifts = {0};
    return c;
}

ExperimentConfig partition_config() {
    ExperimentConfig c;
    c.legends = {Legend::binary({1}, 0.5), Legend::majority()};
    for (int k : {2, 5, 12}) {
        for (Protocol p : {Protocol::TTM, Protocol::MTT, Protocol::TwoStageMajority}) c.designs.push_back(PartitionBased{k, p});
    }
    return c;
}

Execution exec_of(const benchmark::State& state) { return state.range(0) ? Execution::Parallel : Execution::Serial; }

void BM_Mosaic(benchmark::State& state) {
    MosaicParams p{990, 990, 4, 5.0, {1, 1, 1, 1}, 3};
    for (auto _ : state) benchmark::DoNotOptimize(generate_patch_mosaic(p, exec_of(state)));
}

void BM_Smoothed(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(generate_smoothed_binary({990, 990, 30, 0.5, 1}, exec_of(state)));
}

void BM_PointExperiment(benchmark::State& state) {
    const auto cfg = point_config();
    for (auto _ : state) benchmark::DoNotOptimize(run_point_experiment(landscape(), cfg, exec_of(state)));
}

void BM_PointExperimentReference(benchmark::State& state) {
    const auto cfg = point_config();
    for (auto _ : state) benchmark::DoNotOptimize(reference::run_point_experiment(landscape(), cfg));
}

void BM_PartitionExperiment(benchmark::State& state) {
    const auto cfg = partition_config();
    for (auto _ : state) benchmark::DoNotOptimize(run_partition_experiment(landscape(), cfg, exec_of(state)));
}

void BM_PartitionExperimentReference(benchmark::State& state) {
    const auto cfg = partition_config();
    for (auto _ : state) benchmark::DoNotOptimize(reference::run_partition_experiment(landscape(), cfg));
}

void BM_Scalogram(benchmark::State& state) {
    const std::vector<int> sides{30, 60, 90, 180};
    for (auto _ : state) benchmark::DoNotOptimize(purity_scalogram(landscape(), sides, exec_of(state)));
}

void BM_ScalogramReference(benchmark::State& state) {
    const std::vector<int> sides{30, 60, 90, 180};
    for (auto _ : state) benchmark::DoNotOptimize(reference::purity_scalogram(landscape(), sides));
}

void BM_Optimization(benchmark::State& state) {
    OptimizationSpec spec;
    spec.repetitions = 10;
    for (auto _ : state) benchmark::DoNotOptimize(optimization_experiment(landscape(), spec, exec_of(state)));
}

}  // namespace

// Arg 0 = serial, 1 = parallel.
BENCHMARK(BM_Mosaic)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Smoothed)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PointExperiment)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PointExperimentReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PartitionExperiment)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PartitionExperimentReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Scalogram)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScalogramReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Optimization)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
