// Fast (differential image + integration) vs brute (direct splat) scatter,
// over aperture size and worker count.
//
//   ./dpsim_bench --benchmark_filter=Fast

#include <benchmark/benchmark.h>

#include "dpsim/parallel.hpp"
#include "dpsim/simulator.hpp"
#include "test_support.hpp"

namespace {

using namespace dpsim;

const RgbdImage& scene() {
    static const RgbdImage s{testing::random_image(512, 512, 3, 1), testing::random_depth(512, 512, 150.0, 400.0, 2)};
    return s;
}

void BM_SimulateFast(benchmark::State& state) {
    const CameraConfig cfg(100.0, 105.0, static_cast<double>(state.range(0)));
    ScopedWorkers workers(static_cast<int>(state.range(1)));
    for (auto _ : state) benchmark::DoNotOptimize(simulate_fast(scene(), cfg));
    state.SetItemsProcessed(state.iterations() * 512 * 512);
}

void BM_SimulateBrute(benchmark::State& state) {
    const CameraConfig cfg(100.0, 105.0, static_cast<double>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(simulate_brute(scene(), cfg));
    state.SetItemsProcessed(state.iterations() * 512 * 512);
}

void BM_Integrate(benchmark::State& state) {
    const Image diff = testing::random_image(512, 512, 3, 3);
    ScopedWorkers workers(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(integrate(diff));
}

}  // namespace

BENCHMARK(BM_SimulateFast)
    ->ArgsProduct({{10, 20, 40, 80}, {1, 2, 4, 8}})
    ->ArgNames({"aperture", "workers"})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();
BENCHMARK(BM_SimulateBrute)->Arg(10)->Arg(20)->Arg(40)->Arg(80)->ArgName("aperture")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Integrate)->Arg(1)->Arg(4)->ArgName("workers")->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
