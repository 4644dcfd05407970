// Fast-path kernel: OpenMP channel-parallel vs the serial reference.

#include <benchmark/benchmark.h>

#include <vector>

#include "cryodaq/fast_kernel.hpp"

namespace {

using namespace cryodaq;

acquire::FastKernel make_kernel(int channels) {
    std::vector<acquire::FastChannelSpec> specs;
    for (int c = 0; c < channels; ++c) {
        acquire::FastChannelSpec s;
        s.id = static_cast<ChannelId>(c);
        s.scenario.noise_amp_V = 0.01;
        s.scenario.seed = simsrc::channel_seed(7, s.id);
        specs.push_back(s);
    }
    return acquire::FastKernel(acquire::FastKernelParams{}, std::move(specs));
}

template <bool Parallel>
void BM_FastKernel(benchmark::State& state) {
    const int channels = static_cast<int>(state.range(0));
    const std::int64_t block = state.range(1);
    const auto kernel = make_kernel(channels);
    std::vector<acquire::FastChannelState> st(channels);
    std::vector<std::vector<Sample>> out(channels);
    std::int64_t k = 0;
    for (auto _ : state) {
        auto trig = Parallel ? kernel.run_parallel(k, k + block, st, out) : kernel.run_serial(k, k + block, st, out);
        benchmark::DoNotOptimize(trig);
        benchmark::DoNotOptimize(out.data());
        k += block;
    }
    state.SetItemsProcessed(state.iterations() * channels * block);
}

}  // namespace

BENCHMARK(BM_FastKernel<true>)->Name("fast_kernel/parallel")->Args({64, 1000})->Args({8, 10000});
BENCHMARK(BM_FastKernel<false>)->Name("fast_kernel/serial")->Args({64, 1000})->Args({8, 10000});

BENCHMARK_MAIN();
