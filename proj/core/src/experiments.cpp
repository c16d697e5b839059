#include "tdtw/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <future>

#include "tdtw/engine.hpp"
#include "tdtw/errors.hpp"

namespace tdtw {

namespace {

RunConfig scenario_run(const StructureSpec& structure, double current, double duration,
                       const ScenarioOptions& opt) {
    RunConfig cfg;
    cfg.structure = structure;
    cfg.current = current;
    cfg.duration = duration;
    cfg.n_sections = opt.n_sections;
    cfg.seed = opt.seed;
    cfg.workers = opt.workers;
    cfg.snapshot_interval = opt.snapshot_interval;
    return cfg;
}

// The two structures are independent runs; with a worker budget they execute
// concurrently, each on a single-threaded engine.
std::pair<TraceRecord, TraceRecord> run_pair(const DeviceParams& params, RunConfig& conv,
                                             RunConfig& gdcc) {
    if (std::max(conv.workers, gdcc.workers) > 1) {
        conv.workers = std::max(1, conv.workers / 2);
        gdcc.workers = std::max(1, gdcc.workers / 2);
        auto fut = std::async(std::launch::async,
                              [&] { return run_transient(params, gdcc); });
        TraceRecord first = run_transient(params, conv);
        return {std::move(first), fut.get()};
    }
    return {run_transient(params, conv), run_transient(params, gdcc)};
}

} // namespace

Fig2Result scenario_fig2(const DeviceParams& params, const ScenarioOptions& opt) {
    Fig2Result r;
    r.cfg_conventional = scenario_run(StructureSpec::conventional_qws(), 20e-3, 10e-9, opt);
    r.cfg_gdcc = scenario_run(StructureSpec::gdcc_qws(), 20e-3, 10e-9, opt);
    auto [conv, gdcc] = run_pair(params, r.cfg_conventional, r.cfg_gdcc);
    r.conventional = std::move(conv);
    r.gdcc = std::move(gdcc);
    return r;
}

Fig3Result scenario_fig3(const DeviceParams& params, std::vector<double> currents,
                         const ScenarioOptions& opt, double settle_time) {
    if (currents.empty()) throw SimError("scenario_fig3: empty current list");
    std::sort(currents.begin(), currents.end());

    Fig3Result r;
    for (int which = 0; which < 2; ++which) {
        SweepConfig sweep;
        sweep.base = scenario_run(which == 0 ? StructureSpec::conventional_qws()
                                             : StructureSpec::gdcc_qws(),
                                  0.0, settle_time, opt);
        sweep.base.snapshot_interval = 0.0;
        sweep.currents = currents;
        sweep.settle_time = settle_time;
        auto curve = li_sweep(params, sweep);
        std::optional<ThresholdFit> fit;
        if (curve.size() >= 6) {
            try {
                fit = extract_threshold(curve);
            } catch (const SimError&) {
                fit = std::nullopt; // all-below-threshold sweeps have no knee
            }
        }
        if (which == 0) {
            r.conventional = std::move(curve);
            r.fit_conventional = fit;
            r.sweep_conventional = sweep;
        } else {
            r.gdcc = std::move(curve);
            r.fit_gdcc = fit;
            r.sweep_gdcc = sweep;
        }
    }
    return r;
}

Fig456Result scenario_fig456(const DeviceParams& params, const ScenarioOptions& opt) {
    Fig456Result r;
    r.cfg_conventional = scenario_run(StructureSpec::conventional_qws(), 100e-3, opt.t2, opt);
    r.cfg_gdcc = scenario_run(StructureSpec::gdcc_qws(), 100e-3, opt.t2, opt);
    r.cfg_conventional.snapshot_times = {opt.t1, opt.t2};
    r.cfg_gdcc.snapshot_times = {opt.t1, opt.t2};

    auto [conv, gdcc] = run_pair(params, r.cfg_conventional, r.cfg_gdcc);
    r.conventional = std::move(conv);
    r.gdcc = std::move(gdcc);

    r.conv_t1 = compute_spectrum(r.conventional, opt.t1 - opt.spectrum_window, opt.t1, params);
    r.conv_t2 = compute_spectrum(r.conventional, opt.t2 - opt.spectrum_window, opt.t2, params);
    r.gdcc_t1 = compute_spectrum(r.gdcc, opt.t1 - opt.spectrum_window, opt.t1, params);
    r.gdcc_t2 = compute_spectrum(r.gdcc, opt.t2 - opt.spectrum_window, opt.t2, params);

    r.hb_conventional = carrier_std(r.conventional, opt.t1, opt.t2, params);
    r.hb_gdcc = carrier_std(r.gdcc, opt.t1, opt.t2, params);
    return r;
}

double tail_relative_variance(const TraceRecord& trace, double fraction) {
    const auto p = trace.photon_out();
    if (p.size() < 16) throw SimError("tail_relative_variance: trace too short");
    const double t_from = trace.t.back() * (1.0 - fraction);
    std::size_t first = 0;
    while (first < trace.t.size() && trace.t[first] < t_from) ++first;
    const std::size_t count = p.size() - first;
    if (count < 8) throw SimError("tail_relative_variance: tail too short");

    double mean = 0.0;
    for (std::size_t i = first; i < p.size(); ++i) mean += p[i];
    mean /= static_cast<double>(count);
    if (!(mean > 0.0)) return 0.0;
    double var = 0.0;
    for (std::size_t i = first; i < p.size(); ++i) {
        const double d = p[i] - mean;
        var += d * d;
    }
    var /= static_cast<double>(count);
    return var / (mean * mean);
}

} // namespace tdtw
