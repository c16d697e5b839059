// dfbsim - time-domain traveling-wave simulator for quarter-wave-shifted DFB
// lasers with uniform or Gaussian-apodized coupling profiles.

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "selftest.hpp"
#include "tdtw/config.hpp"
#include "tdtw/engine.hpp"
#include "tdtw/errors.hpp"
#include "tdtw/experiments.hpp"
#include "tdtw/observables.hpp"
#include "tdtw/version.hpp"

namespace {

using namespace tdtw;
namespace fs = std::filesystem;
using nlohmann::json;

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    std::string structure;
    std::string seed, grid, workers, current, duration;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_drive) {
    cmd->add_option("--config", args.config_path, "key = value configuration file");
    cmd->add_option("--out", args.out_dir,
                    "output directory (default $TDTW_OUTPUT_ROOT or ./runs)");
    cmd->add_option("--structure", args.structure, "conventional|gdcc|custom");
    cmd->add_option("--seed", args.seed, "noise stream seed");
    cmd->add_option("--grid", args.grid, "number of longitudinal sections M");
    cmd->add_option("--workers", args.workers, "worker thread count");
    if (with_drive) {
        cmd->add_option("--current", args.current, "drive current, e.g. 100mA");
        cmd->add_option("--duration", args.duration, "run duration, e.g. 10ns");
    }
}

SimulationSetup load_setup(const CommonArgs& args, bool require_structure) {
    SimulationSetup setup;
    const bool structure_flag = !args.structure.empty();
    if (!args.config_path.empty())
        setup = parse_config(args.config_path, require_structure && !structure_flag);
    else
        setup = default_setup();
    if (structure_flag) apply_key(setup, "structure", args.structure);
    if (!args.seed.empty()) apply_key(setup, "seed", args.seed);
    if (!args.grid.empty()) apply_key(setup, "sections", args.grid);
    if (!args.workers.empty()) apply_key(setup, "workers", args.workers);
    if (!args.current.empty()) apply_key(setup, "current", args.current);
    if (!args.duration.empty()) apply_key(setup, "duration", args.duration);
    if (require_structure && !setup.structure_set)
        throw ConfigError("structure must be given explicitly (config key or --structure)");
    return setup;
}

fs::path output_root(const CommonArgs& args) {
    if (!args.out_dir.empty()) return args.out_dir;
    if (const char* env = std::getenv("TDTW_OUTPUT_ROOT"); env && *env) return env;
    return "runs";
}

json run_meta(const TraceRecord& trace) {
    return json{{"steps", trace.steps},
                {"clamp_events", trace.clamp_events},
                {"runtime_s", trace.wall_seconds},
                {"steps_per_s", trace.wall_seconds > 0.0
                                    ? static_cast<double>(trace.steps) / trace.wall_seconds
                                    : 0.0}};
}

json peaks_json(const Spectrum& spec) {
    json out = json::array();
    for (const auto& p : spec.peaks)
        out.push_back({{"lambda_m", p.wavelength},
                       {"power_rel", p.power},
                       {"prominence_db", p.prominence_db}});
    return out;
}

int cmd_run(const CommonArgs& args) {
    SimulationSetup setup = load_setup(args, true);
    const fs::path dir = output_root(args) / "run" / setup.run.structure.name;
    auto bundle = OutputBundle::create(dir, make_manifest(setup, "run"));

    const TraceRecord trace = run_transient(setup.params, setup.run);
    bundle.write_timeseries(trace);
    if (!trace.snapshots.empty()) {
        const SimGrid grid = SimGrid::make(setup.params, setup.run.n_sections,
                                           setup.run.carrier_subcycle);
        const auto profile = build_profile(setup.params, setup.run.structure.g_shape,
                                           setup.run.structure.kappa0L, grid);
        std::vector<double> at;
        for (const auto& s : trace.snapshots) at.push_back(s.t);
        bundle.write_profiles(trace, profile, setup.params, at);
    }
    json summary = run_meta(trace);
    summary["completed"] = true;
    const auto p = trace.photon_out();
    summary["final_P_L_m^-3"] = p.empty() ? 0.0 : p.back();
    summary["final_power_W"] =
        p.empty() ? 0.0 : output_power_from_density(p.back(), setup.params);
    bundle.finish(summary);
    std::printf("run written to %s\n", dir.string().c_str());
    return 0;
}

int cmd_li(const CommonArgs& args, const std::string& from, const std::string& to,
           unsigned points, const std::string& settle) {
    SimulationSetup setup = load_setup(args, true);
    SweepConfig sweep;
    sweep.base = setup.run;
    sweep.base.snapshot_interval = 0.0;
    if (!settle.empty()) {
        SimulationSetup tmp = setup;
        apply_key(tmp, "duration", settle);
        sweep.settle_time = tmp.run.duration;
    }
    SimulationSetup lo = setup, hi = setup;
    apply_key(lo, "current", from.empty() ? "5mA" : from);
    apply_key(hi, "current", to.empty() ? "40mA" : to);
    if (points < 6) throw ConfigError("li needs --points >= 6");
    for (unsigned i = 0; i < points; ++i)
        sweep.currents.push_back(lo.run.current +
                                 (hi.run.current - lo.run.current) * i /
                                     static_cast<double>(points - 1));

    const fs::path dir = output_root(args) / "li" / setup.run.structure.name;
    auto bundle = OutputBundle::create(dir, make_manifest(setup, "li"));
    const auto curve = li_sweep(setup.params, sweep);
    bundle.write_li(curve);

    json summary{{"completed", true}, {"points", curve.size()}};
    try {
        const auto fit = extract_threshold(curve);
        summary["threshold_A"] = fit.threshold;
        summary["fit_residual"] = fit.residual;
        summary["slope_above_W_per_A"] = fit.slope_above;
    } catch (const SimError& e) {
        summary["threshold_A"] = nullptr;
        summary["threshold_error"] = e.what();
    }
    bundle.finish(summary);
    std::printf("li sweep written to %s\n", dir.string().c_str());
    return 0;
}

int cmd_spectrum(const CommonArgs& args, const std::string& window_end,
                 const std::string& window_len) {
    SimulationSetup setup = load_setup(args, true);
    if (!window_len.empty()) apply_key(setup, "spectrum_window", window_len);
    double t_end = setup.run.duration;
    if (!window_end.empty()) {
        SimulationSetup tmp = setup;
        apply_key(tmp, "duration", window_end);
        t_end = tmp.run.duration;
    }

    const fs::path dir = output_root(args) / "spectrum" / setup.run.structure.name;
    auto bundle = OutputBundle::create(dir, make_manifest(setup, "spectrum"));
    const TraceRecord trace = run_transient(setup.params, setup.run);
    bundle.write_timeseries(trace);
    const auto spec = compute_spectrum(trace, t_end - setup.spectrum_window, t_end,
                                       setup.params);
    bundle.write_spectrum(spec);
    const auto ratio = smsr(spec);

    json summary = run_meta(trace);
    summary["completed"] = true;
    summary["smsr_db"] = ratio.db;
    summary["smsr_floor_limited"] = ratio.floor_limited;
    summary["peaks"] = peaks_json(spec);
    bundle.finish(summary);
    std::printf("spectrum written to %s (SMSR %s%.2f dB)\n", dir.string().c_str(),
                ratio.floor_limited ? "> " : "", ratio.db);
    return 0;
}

ScenarioOptions scenario_options(const SimulationSetup& setup) {
    ScenarioOptions opt;
    opt.n_sections = setup.run.n_sections;
    opt.seed = setup.run.seed;
    opt.workers = setup.run.workers;
    opt.t1 = setup.t1;
    opt.t2 = setup.t2;
    opt.spectrum_window = setup.spectrum_window;
    return opt;
}

int cmd_fig2(const CommonArgs& args) {
    SimulationSetup setup = load_setup(args, false);
    const auto opt = scenario_options(setup);
    const auto result = scenario_fig2(setup.params, opt);

    for (int which = 0; which < 2; ++which) {
        const auto& trace = which == 0 ? result.conventional : result.gdcc;
        const auto& cfg = which == 0 ? result.cfg_conventional : result.cfg_gdcc;
        SimulationSetup sub = setup;
        sub.run = cfg;
        sub.structure_set = true;
        const fs::path dir = output_root(args) / "fig2" / cfg.structure.name;
        auto bundle = OutputBundle::create(dir, make_manifest(sub, "fig2"));
        bundle.write_timeseries(trace);
        json summary = run_meta(trace);
        summary["completed"] = true;
        summary["mean_tail_P_W"] = output_power_from_density(
            [&] {
                const auto p = trace.photon_out();
                double s = 0.0;
                std::size_t n = 0;
                for (std::size_t i = p.size() * 4 / 5; i < p.size(); ++i, ++n) s += p[i];
                return n ? s / static_cast<double>(n) : 0.0;
            }(),
            setup.params);
        bundle.finish(summary);
    }
    std::printf("fig2 written to %s\n", (output_root(args) / "fig2").string().c_str());
    return 0;
}

int cmd_fig3(const CommonArgs& args, const std::string& from, const std::string& to,
             unsigned points) {
    SimulationSetup setup = load_setup(args, false);
    SimulationSetup lo = setup, hi = setup;
    apply_key(lo, "current", from.empty() ? "5mA" : from);
    apply_key(hi, "current", to.empty() ? "40mA" : to);
    std::vector<double> currents;
    for (unsigned i = 0; i < points; ++i)
        currents.push_back(lo.run.current + (hi.run.current - lo.run.current) * i /
                                                static_cast<double>(points - 1));
    const auto opt = scenario_options(setup);
    const auto result = scenario_fig3(setup.params, currents, opt);

    for (int which = 0; which < 2; ++which) {
        const auto& curve = which == 0 ? result.conventional : result.gdcc;
        const auto& fit = which == 0 ? result.fit_conventional : result.fit_gdcc;
        const auto& sweep = which == 0 ? result.sweep_conventional : result.sweep_gdcc;
        SimulationSetup sub = setup;
        sub.run = sweep.base;
        sub.structure_set = true;
        const fs::path dir = output_root(args) / "fig3" / sweep.base.structure.name;
        auto bundle = OutputBundle::create(dir, make_manifest(sub, "fig3"));
        bundle.write_li(curve);
        json summary{{"completed", true}};
        if (fit) {
            summary["threshold_A"] = fit->threshold;
            summary["fit_residual"] = fit->residual;
        } else {
            summary["threshold_A"] = nullptr;
        }
        bundle.finish(summary);
        std::printf("%s threshold: %s\n", sweep.base.structure.name.c_str(),
                    fit ? (std::to_string(fit->threshold * 1e3) + " mA").c_str()
                        : "no knee detected");
    }
    return 0;
}

int cmd_fig456(const CommonArgs& args) {
    SimulationSetup setup = load_setup(args, false);
    const auto opt = scenario_options(setup);
    const auto result = scenario_fig456(setup.params, opt);

    for (int which = 0; which < 2; ++which) {
        const auto& trace = which == 0 ? result.conventional : result.gdcc;
        const auto& cfg = which == 0 ? result.cfg_conventional : result.cfg_gdcc;
        const auto& s1 = which == 0 ? result.conv_t1 : result.gdcc_t1;
        const auto& s2 = which == 0 ? result.conv_t2 : result.gdcc_t2;
        const auto& hb = which == 0 ? result.hb_conventional : result.hb_gdcc;
        SimulationSetup sub = setup;
        sub.run = cfg;
        sub.structure_set = true;
        const fs::path dir = output_root(args) / "fig456" / cfg.structure.name;
        auto bundle = OutputBundle::create(dir, make_manifest(sub, "fig456"));
        bundle.write_timeseries(trace);
        bundle.write_spectrum(s1, "spectrum_t1.csv");
        bundle.write_spectrum(s2, "spectrum_t2.csv");
        bundle.write_holeburning(hb, trace.grid.dz);
        const SimGrid grid = SimGrid::make(setup.params, cfg.n_sections,
                                           cfg.carrier_subcycle);
        const auto profile = build_profile(setup.params, cfg.structure.g_shape,
                                           cfg.structure.kappa0L, grid);
        bundle.write_profiles(trace, profile, setup.params, {opt.t1, opt.t2});

        const auto r1 = smsr(s1);
        const auto r2 = smsr(s2);
        json summary = run_meta(trace);
        summary["completed"] = true;
        summary["smsr_t1_db"] = r1.db;
        summary["smsr_t2_db"] = r2.db;
        summary["smsr_floor_limited"] = {r1.floor_limited, r2.floor_limited};
        summary["peaks_t1"] = peaks_json(s1);
        summary["peaks_t2"] = peaks_json(s2);
        summary["facet_sigma_N_m^-3"] = hb.facet_sigma_mean();
        summary["tail_rel_variance"] = tail_relative_variance(trace);
        bundle.finish(summary);
        std::printf("%s: SMSR(t1)=%.1f dB SMSR(t2)=%.1f dB peak(t2)=%.2f nm\n",
                    cfg.structure.name.c_str(), r1.db, r2.db,
                    s2.peaks.empty() ? 0.0 : s2.peaks[0].wavelength * 1e9);
    }
    std::printf("fig456 written to %s\n", (output_root(args) / "fig456").string().c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"time-domain traveling-wave DFB laser simulator"};
    app.set_version_flag("--version", tdtw::kVersion);
    app.require_subcommand(1);

    CommonArgs run_args, li_args, spec_args, fig2_args, fig3_args, fig456_args, self_args;
    std::string li_from, li_to, li_settle, fig3_from, fig3_to;
    unsigned li_points = 15, fig3_points = 15;
    std::string window_end, window_len;

    auto* run = app.add_subcommand("run", "single transient run");
    add_common(run, run_args, true);
    auto* li = app.add_subcommand("li", "L-I sweep with threshold extraction");
    add_common(li, li_args, false);
    li->add_option("--from", li_from, "lowest current (default 5mA)");
    li->add_option("--to", li_to, "highest current (default 40mA)");
    li->add_option("--points", li_points, "number of currents (default 15)");
    li->add_option("--settle", li_settle, "settling time per point (default 8ns)");
    auto* spectrum = app.add_subcommand("spectrum", "transient + emission spectrum");
    add_common(spectrum, spec_args, true);
    spectrum->add_option("--window-end", window_end, "window end (default run end)");
    spectrum->add_option("--window", window_len, "window length (default 2ns)");
    auto* fig2 = app.add_subcommand("fig2", "both structures at 20 mA for 10 ns");
    add_common(fig2, fig2_args, false);
    auto* fig3 = app.add_subcommand("fig3", "L-I curves for both structures");
    add_common(fig3, fig3_args, false);
    fig3->add_option("--from", fig3_from, "lowest current (default 5mA)");
    fig3->add_option("--to", fig3_to, "highest current (default 40mA)");
    fig3->add_option("--points", fig3_points, "number of currents (default 15)");
    auto* fig456 = app.add_subcommand(
        "fig456", "100 mA transients, spectra at t1/t2, hole-burning profiles");
    add_common(fig456, fig456_args, false);
    auto* selftest = app.add_subcommand("selftest", "quick invariant suite");
    add_common(selftest, self_args, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help / --version
        std::fprintf(stderr, "%s\n\n%s", e.what(), app.help().c_str());
        return 2;
    }

    try {
        if (run->parsed()) return cmd_run(run_args);
        if (li->parsed()) return cmd_li(li_args, li_from, li_to, li_points, li_settle);
        if (spectrum->parsed()) return cmd_spectrum(spec_args, window_end, window_len);
        if (fig2->parsed()) return cmd_fig2(fig2_args);
        if (fig3->parsed()) return cmd_fig3(fig3_args, fig3_from, fig3_to, fig3_points);
        if (fig456->parsed()) return cmd_fig456(fig456_args);
        if (selftest->parsed()) {
            std::size_t m = 200;
            if (!self_args.grid.empty()) m = std::stoul(self_args.grid);
            return run_selftest(m) == 0 ? 0 : 1;
        }
    } catch (const tdtw::DivergenceError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
