#include <benchmark/benchmark.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "tdtw/observables.hpp"

namespace {

using namespace tdtw;

void BM_Spectrum(benchmark::State& state) {
    DeviceParams params;
    TraceRecord trace;
    trace.sample_dt = 1e-13;
    const int n = 1 << 15;
    for (int i = 0; i < n; ++i) {
        const double t = i * trace.sample_dt;
        trace.t.push_back(t);
        trace.r_facet.push_back(
            std::exp(std::complex<double>(0.0, 2.0 * std::numbers::pi * 4e11 * t)));
        trace.s_facet.push_back({0.0, 0.0});
    }
    for (auto _ : state) {
        auto spec = compute_spectrum(trace, 0.0, trace.t.back(), params);
        benchmark::DoNotOptimize(spec.peaks);
    }
}
BENCHMARK(BM_Spectrum);

} // namespace
