#include <benchmark/benchmark.h>

#include "tdtw/engine.hpp"

namespace {

using namespace tdtw;

Engine make_engine(std::size_t m, bool noise, int workers) {
    DeviceParams params;
    const SimGrid grid = SimGrid::make(params, m);
    auto profile = build_profile(params, 1.0, 2.7098, grid);
    Engine engine(params, grid, std::move(profile), NoiseSource{42, noise}, workers);
    LaserState st = LaserState::zeros(m);
    std::fill(st.carriers.begin(), st.carriers.end(), 2e24);
    std::fill(st.r_fwd.begin(), st.r_fwd.end(), std::complex<double>{1e10, 0.0});
    std::fill(st.s_bwd.begin(), st.s_bwd.end(), std::complex<double>{0.0, 1e10});
    engine.set_state(std::move(st));
    return engine;
}

void BM_StepFields(benchmark::State& state) {
    auto engine = make_engine(1000, state.range(0) != 0, static_cast<int>(state.range(1)));
    for (auto _ : state) {
        engine.step_fields();
        if (engine.step_index() % 10 == 0) engine.step_carriers(0.05);
    }
    state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_StepFields)
    ->Args({0, 1})
    ->Args({1, 1})
    ->Args({1, 2})
    ->ArgNames({"noise", "workers"});

void BM_CarrierStep(benchmark::State& state) {
    auto engine = make_engine(1000, false, 1);
    for (auto _ : state) engine.step_carriers(0.05);
    state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_CarrierStep);

} // namespace

BENCHMARK_MAIN();
