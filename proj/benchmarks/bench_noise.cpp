#include <benchmark/benchmark.h>

#include "tdtw/noise.hpp"

namespace {

using namespace tdtw;

void BM_NoisePair(benchmark::State& state) {
    NoiseSource noise{12345, true};
    std::uint64_t step = 0;
    std::complex<double> sink{0, 0};
    for (auto _ : state) {
        const auto [a, b] = noise.standard_pair(step++, 17);
        sink += a + b;
    }
    benchmark::DoNotOptimize(sink);
    state.SetItemsProcessed(state.iterations() * 2);
}
BENCHMARK(BM_NoisePair);

void BM_PhiloxBlock(benchmark::State& state) {
    std::uint32_t sink = 0;
    std::uint32_t i = 0;
    for (auto _ : state) {
        const auto w = detail::Philox4x32::block(42, {i++, 0, 7, 0});
        sink ^= w[0] ^ w[3];
    }
    benchmark::DoNotOptimize(sink);
}
BENCHMARK(BM_PhiloxBlock);

} // namespace
