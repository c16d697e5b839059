#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "tdtw/device.hpp"
#include "tdtw/observables.hpp"
#include "tdtw/run_config.hpp"
#include "tdtw/trace.hpp"

namespace tdtw {

// Shared knobs for the canned scenarios.
struct ScenarioOptions {
    std::size_t n_sections = 1000;
    std::uint64_t seed = 1;
    int workers = 1;
    double t1 = 3e-9;               // first spectrum instant
    double t2 = 10e-9;              // second spectrum instant
    double spectrum_window = 2e-9;  // window length ending at each instant
    double snapshot_interval = 25e-12;
};

// Both structures driven at 20 mA for 10 ns from zero initial conditions.
struct Fig2Result {
    TraceRecord conventional;
    TraceRecord gdcc;
    RunConfig cfg_conventional;
    RunConfig cfg_gdcc;
};
Fig2Result scenario_fig2(const DeviceParams& params, const ScenarioOptions& opt);

// L-I sweeps for both structures over the given currents (sorted internally;
// per-point runs are independent).
struct Fig3Result {
    std::vector<LiPoint> conventional;
    std::vector<LiPoint> gdcc;
    std::optional<ThresholdFit> fit_conventional;
    std::optional<ThresholdFit> fit_gdcc;
    SweepConfig sweep_conventional;
    SweepConfig sweep_gdcc;
};
Fig3Result scenario_fig3(const DeviceParams& params, std::vector<double> currents,
                         const ScenarioOptions& opt, double settle_time = 8e-9);

// 100 mA transients with spectra at t1/t2 and hole-burning statistics over
// [t1, t2] for both structures.
struct Fig456Result {
    TraceRecord conventional;
    TraceRecord gdcc;
    Spectrum conv_t1, conv_t2;
    Spectrum gdcc_t1, gdcc_t2;
    HoleBurningReport hb_conventional;
    HoleBurningReport hb_gdcc;
    RunConfig cfg_conventional;
    RunConfig cfg_gdcc;
};
Fig456Result scenario_fig456(const DeviceParams& params, const ScenarioOptions& opt);

// Relative variance (var/mean^2) of the emitted photon density over the
// final `fraction` of the run; the mode-beating proxy.
double tail_relative_variance(const TraceRecord& trace, double fraction = 0.2);

} // namespace tdtw
