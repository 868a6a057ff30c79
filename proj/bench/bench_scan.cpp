// Serial reference vs SIMD vs OpenMP scan kernels.
#include <benchmark/benchmark.h>

#include <vector>

#include "episcan/innovations.hpp"
#include "episcan/scan.hpp"

namespace {

std::vector<double> gaussian(std::size_t n) {
    return episcan::sample_innovations(episcan::Gaussian{1.0}, n, episcan::derive_stream(7, n, episcan::StreamRole::Auxiliary));
}

template <episcan::Execution Exec>
void BM_ScaleProfile(benchmark::State& state) {
    const auto x = gaussian(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        auto profile = episcan::ScaleProfile::exact(x, 0, Exec);
        benchmark::DoNotOptimize(profile.maxima().data());
    }
    const double n = static_cast<double>(state.range(0));
    state.counters["windows/s"] = benchmark::Counter(n * (n + 1) / 2, benchmark::Counter::kIsIterationInvariantRate);
}

void BM_Restricted(benchmark::State& state) {
    const auto x = gaussian(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        auto r = episcan::scan_statistic_restricted(x, 0.4, 1.25, 0, episcan::Execution::Vectorized);
        benchmark::DoNotOptimize(r.value);
    }
}

void BM_HolderOracle(benchmark::State& state) {
    const auto x = gaussian(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(episcan::holder_norm_polygonal(x, 0.25));
}

}  // namespace

BENCHMARK(BM_ScaleProfile<episcan::Execution::Reference>)->Arg(512)->Arg(2048)->Arg(8192);
BENCHMARK(BM_ScaleProfile<episcan::Execution::Vectorized>)->Arg(512)->Arg(2048)->Arg(8192);
BENCHMARK(BM_ScaleProfile<episcan::Execution::Parallel>)->Arg(512)->Arg(2048)->Arg(8192);
BENCHMARK(BM_Restricted)->Arg(100000);
BENCHMARK(BM_HolderOracle)->Arg(512);

BENCHMARK_MAIN();
