// Acceptance suite: one pass/fail line per numbered criterion.
// Usage: tdtw_acceptance [1|2|3|45|6|7|8|9|all]

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "support/threshold_oracle.hpp"
#include "tdtw/config.hpp"
#include "tdtw/constants.hpp"
#include "tdtw/engine.hpp"
#include "tdtw/experiments.hpp"
#include "tdtw/medium.hpp"
#include "tdtw/noise.hpp"
#include "tdtw/observables.hpp"

namespace {

using namespace tdtw;
using std::numbers::pi;

int g_failures = 0;

void report(int criterion, bool ok, const std::string& what) {
    std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", criterion, what.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

double wall_time(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string mA(double ampere) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.3f mA", ampere * 1e3);
    return buf;
}

// --- criterion 1: coupling normalization -----------------------------------
void criterion_1() {
    const auto t0 = std::chrono::steady_clock::now();
    const double k0L = kappa0_for_mean(1.0, 2.50);
    const double dt = wall_time(t0);
    const bool ok = std::abs(k0L - 2.7098) <= 0.001 && dt < 1.0;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "coupling normalization: kappa0_L(G=1, mean 2.50) = %.5f "
                  "(want 2.7098 +- 0.001), %.3f s",
                  k0L, dt);
    report(1, ok, buf);
}

// --- criterion 2: transparency current -------------------------------------
void criterion_2() {
    const auto t0 = std::chrono::steady_clock::now();
    DeviceParams params;
    const double n0 = params.n_transparency;

    // scalar arithmetic oracle
    const double oracle = constants::q_electron * params.active_volume *
                          (n0 / params.tau_carrier + params.b_radiative * n0 * n0 +
                           params.c_auger * n0 * n0 * n0);

    // steady-state solver: bisect the drive current until the engine's Euler
    // update leaves N0 stationary (P = 0)
    const std::size_t m = 16;
    const SimGrid grid = SimGrid::make(params, m);
    GratingProfile flat;
    flat.kappa.assign(m, 1.0);
    flat.corrugation_phase.assign(m, 0.0);
    double lo = 0.0, hi = 50e-3;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        Engine engine(params, grid, flat, NoiseSource{0, false});
        LaserState st = LaserState::zeros(m);
        std::fill(st.carriers.begin(), st.carriers.end(), n0);
        engine.set_state(std::move(st));
        engine.step_carriers(mid);
        (engine.state().carriers[0] < n0 ? lo : hi) = mid;
    }
    const double solved = 0.5 * (lo + hi);
    const double dt = wall_time(t0);

    const bool ok = std::abs(solved - oracle) <= 1e-4 * oracle &&
                    std::abs(solved - 10.1e-3) <= 0.1e-3 && dt < 1.0;
    report(2, ok,
           "transparency current: solver " + mA(solved) + ", oracle " + mA(oracle) +
               " (want 10.1 +- 0.1 mA), " + std::to_string(dt) + " s");
}

// --- criterion 3: L-I thresholds --------------------------------------------
void criterion_3() {
    DeviceParams params;
    ScenarioOptions opt;
    opt.n_sections = 1000;
    opt.seed = 7;
    opt.workers = 2;
    std::vector<double> currents;
    for (int i = 0; i < 15; ++i)
        currents.push_back(5e-3 + (40e-3 - 5e-3) * i / 14.0);

    const auto result = scenario_fig3(params, currents, opt, 8e-9);

    bool ok = true;
    std::string detail;
    if (!result.fit_gdcc) {
        ok = false;
        detail = "gdcc: no knee detected";
    } else {
        const double th_gdcc = result.fit_gdcc->threshold;
        ok = ok && std::abs(th_gdcc - 19.75e-3) <= 1.5e-3;
        detail = "gdcc threshold " + mA(th_gdcc) + " (want 19.75 +- 1.5 mA)";
        if (result.fit_conventional) {
            const double th_conv = result.fit_conventional->threshold;
            ok = ok && th_conv > 20e-3 && th_conv > th_gdcc;
            detail += ", conventional " + mA(th_conv) + " (want > 20 mA and > gdcc)";
        } else {
            // no knee inside 5-40 mA means the conventional knee is beyond
            // the scan: treat as > 20 mA only if its powers stay low
            double p_max = 0.0;
            for (const auto& pt : result.conventional) p_max = std::max(p_max, pt.power);
            ok = ok && p_max < 1e-4;
            detail += ", conventional: no knee in sweep (max " +
                      std::to_string(p_max * 1e3) + " mW)";
        }
    }
    report(3, ok, "L-I thresholds: " + detail);
}

// --- criteria 4 and 5: 100 mA mode selectivity and hole burning -------------
void criteria_45() {
    DeviceParams params;
    ScenarioOptions opt;
    opt.n_sections = 1000;
    opt.seed = 7;
    opt.workers = 2;
    const auto result = scenario_fig456(params, opt);

    const auto gdcc_t1 = smsr(result.gdcc_t1);
    const auto gdcc_t2 = smsr(result.gdcc_t2);
    const auto conv_t2 = smsr(result.conv_t2);
    const double peak_t2 =
        result.gdcc_t2.peaks.empty() ? 0.0 : result.gdcc_t2.peaks[0].wavelength;

    {
        const bool ok = gdcc_t1.db >= 25.0 && gdcc_t2.db >= 25.0 && !conv_t2.floor_limited &&
                        conv_t2.db < 25.0 && std::abs(peak_t2 - 1546.90e-9) <= 1e-9;
        char buf[240];
        std::snprintf(buf, sizeof(buf),
                      "mode selectivity at 100 mA: gdcc SMSR t1 %.1f dB, t2 %.1f dB "
                      "(want >= 25); conventional t2 %.1f dB (want < 25); gdcc peak "
                      "%.2f nm (want 1546.90 +- 1)",
                      gdcc_t1.db, gdcc_t2.db, conv_t2.db, peak_t2 * 1e9);
        report(4, ok, buf);
    }
    {
        const double sig_conv = result.hb_conventional.facet_sigma_mean();
        const double sig_gdcc = result.hb_gdcc.facet_sigma_mean();
        const double var_conv = tail_relative_variance(result.conventional);
        const double var_gdcc = tail_relative_variance(result.gdcc);
        const double ratio = var_gdcc > 0.0 ? var_conv / var_gdcc : 1e300;
        const bool ok = sig_conv > sig_gdcc && ratio > 5.0;
        char buf[240];
        std::snprintf(buf, sizeof(buf),
                      "hole-burning ordering: facet sigma(N) conventional %.3e vs gdcc "
                      "%.3e (want >); output variance ratio %.1f (want > 5)",
                      sig_conv, sig_gdcc, ratio);
        report(5, ok, buf);
    }

    // criterion 4/5 runs double as the no-clamp gate
    if (result.conventional.clamp_events != 0 || result.gdcc.clamp_events != 0)
        report(5, false,
               "carrier clamps during acceptance scenarios: conv " +
                   std::to_string(result.conventional.clamp_events) + ", gdcc " +
                   std::to_string(result.gdcc.clamp_events));
}

// --- criterion 6: numerical scheme suite ------------------------------------
void criterion_6() {
    DeviceParams params;
    bool all_ok = true;
    std::string detail;

    { // kappa = 0 closed-form amplification
        DeviceParams p0 = params;
        p0.eps_compression = 0.0;
        const std::size_t m = 400;
        const SimGrid grid = SimGrid::make(p0, m);
        GratingProfile zero;
        zero.kappa.assign(m, 0.0);
        zero.corrugation_phase.assign(m, 0.0);
        Engine engine(p0, grid, zero, NoiseSource{0, false});
        LaserState st = LaserState::zeros(m);
        std::fill(st.carriers.begin(), st.carriers.end(), 2.5e24);
        std::fill(st.r_fwd.begin(), st.r_fwd.end(), std::complex<double>{1.0, 0.0});
        engine.set_state(std::move(st));
        for (int i = 0; i < 300; ++i) engine.step_fields();
        const double g = material_gain(2.5e24, p0.lambda_ref, p0);
        const double expected =
            std::exp(0.5 * (p0.confinement * g - p0.alpha_loss) * 300 * grid.dz);
        const double rel = std::abs(std::abs(engine.state().r_fwd[m - 1]) - expected) /
                           expected;
        all_ok = all_ok && rel < 1e-6;
        detail += "amplification rel err " + std::to_string(rel);
    }

    { // pulse advection
        DeviceParams p0 = params;
        p0.lambda_ref = p0.lambda_peak_transparency;
        p0.dn_dN = 0.0;
        p0.alpha_loss = 0.0;
        p0.eps_compression = 0.0;
        const std::size_t m = 96;
        const SimGrid grid = SimGrid::make(p0, m);
        GratingProfile zero;
        zero.kappa.assign(m, 0.0);
        zero.corrugation_phase.assign(m, 0.0);
        Engine engine(p0, grid, zero, NoiseSource{0, false});
        LaserState st = LaserState::zeros(m);
        std::fill(st.carriers.begin(), st.carriers.end(), p0.n_transparency);
        st.r_fwd[3] = {1.0, 0.0};
        engine.set_state(std::move(st));
        for (int i = 0; i < 50; ++i) engine.step_fields();
        bool ok = std::abs(std::abs(engine.state().r_fwd[53]) - 1.0) < 1e-12;
        for (std::size_t j = 0; j < m; ++j)
            if (j != 53) ok = ok && engine.state().r_fwd[j] == std::complex<double>{0, 0};
        all_ok = all_ok && ok;
        detail += ok ? "; advection exact" : "; advection FAILED";
    }

    { // carrier fixed point and decay
        const double n0 = params.n_transparency;
        const double i_tr = constants::q_electron * params.active_volume *
                            (n0 / params.tau_carrier + params.b_radiative * n0 * n0 +
                             params.c_auger * n0 * n0 * n0);
        const std::size_t m = 64;
        const SimGrid grid = SimGrid::make(params, m);
        GratingProfile zero;
        zero.kappa.assign(m, 0.0);
        zero.corrugation_phase.assign(m, 0.0);
        Engine engine(params, grid, zero, NoiseSource{0, false});
        LaserState st = LaserState::zeros(m);
        std::fill(st.carriers.begin(), st.carriers.end(), n0);
        engine.set_state(std::move(st));
        engine.step_carriers(i_tr);
        bool ok = std::abs(engine.state().carriers[0] - n0) / n0 < 1e-12;

        LaserState st2 = LaserState::zeros(m);
        std::fill(st2.carriers.begin(), st2.carriers.end(), 1e20);
        engine.set_state(std::move(st2));
        const double dt_n = grid.dt * static_cast<double>(grid.carrier_subcycle);
        const auto steps = static_cast<int>(std::llround(1e-9 / dt_n));
        for (int i = 0; i < steps; ++i) engine.step_carriers(0.0);
        const double tau_eff = -(static_cast<double>(steps) * dt_n) /
                               std::log(engine.state().carriers[0] / 1e20);
        ok = ok && std::abs(tau_eff - params.tau_carrier) / params.tau_carrier < 0.01;
        all_ok = all_ok && ok;
        detail += ok ? "; carrier ODE ok" : "; carrier ODE FAILED";
    }

    auto steady_power = [&](std::size_t m, std::size_t subcycle) {
        RunConfig cfg;
        cfg.structure = StructureSpec::gdcc_qws();
        cfg.current = 30e-3;
        cfg.duration = 10e-9;
        cfg.n_sections = m;
        cfg.carrier_subcycle = subcycle;
        cfg.noise_on = false;
        cfg.initial_field = 1e8;
        cfg.workers = 2;
        const auto trace = run_transient(params, cfg);
        const auto p = trace.photon_out();
        double mean = 0.0;
        std::size_t count = 0;
        for (std::size_t i = p.size() * 4 / 5; i < p.size(); ++i, ++count) mean += p[i];
        return mean / static_cast<double>(count);
    };

    { // grid convergence M=500 vs 1000
        const double p500 = steady_power(500, 10);
        const double p1000 = steady_power(1000, 10);
        const double rel = std::abs(p500 - p1000) / p1000;
        all_ok = all_ok && rel < 0.01;
        detail += "; grid 500->1000 rel diff " + std::to_string(rel);
    }
    { // carrier subcycle 1 vs 10
        const double p1 = steady_power(500, 1);
        const double p10 = steady_power(500, 10);
        const double rel = std::abs(p1 - p10) / p10;
        all_ok = all_ok && rel < 0.005;
        detail += "; subcycle 1 vs 10 rel diff " + std::to_string(rel);
    }
    report(6, all_ok, "numerical scheme suite: " + detail);
}

// --- criterion 7: noise statistics ------------------------------------------
void criterion_7() {
    DeviceParams params;
    const SimGrid grid = SimGrid::make(params, 1000);
    NoiseSource noise{2026, true};
    const double n_local = 2e24;
    const double sigma = NoiseSource::sigma(n_local, grid, params);
    const double sigma2 = sigma * sigma;

    const int n = 1'000'000;
    std::complex<double> mean{0, 0}, second{0, 0};
    double abs2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto xi = noise.draw(static_cast<std::uint32_t>(i & 511),
                                   static_cast<std::uint64_t>(i >> 9),
                                   (i & 1) ? Direction::backward : Direction::forward,
                                   n_local, grid, params);
        mean += xi;
        second += xi * xi;
        abs2 += std::norm(xi);
    }
    mean /= n;
    second /= n;
    abs2 /= n;

    const double mean_bound = 4.0 * sigma / std::sqrt(static_cast<double>(n));
    const double second_bound = 4.0 * sigma2 / std::sqrt(static_cast<double>(n));
    const bool ok = std::abs(mean) < mean_bound &&
                    std::abs(abs2 - sigma2) <= 0.01 * sigma2 &&
                    std::abs(second) < second_bound;
    char buf[240];
    std::snprintf(buf, sizeof(buf),
                  "noise statistics over 1e6 draws: |mean|/bound %.2f, <xi xi*>/sigma^2 "
                  "= %.4f (want 1 +- 0.01), |<xi xi>|/bound %.2f",
                  std::abs(mean) / mean_bound, abs2 / sigma2,
                  std::abs(second) / second_bound);
    report(7, ok, buf);
}

// --- criterion 8: determinism ------------------------------------------------
void criterion_8() {
    DeviceParams params;
    RunConfig cfg;
    cfg.structure = StructureSpec::gdcc_qws();
    cfg.current = 25e-3;
    cfg.duration = 1.5e-9;
    cfg.n_sections = 400;
    cfg.seed = 13;
    cfg.snapshot_interval = 100e-12;

    auto csv_bytes = [&](const TraceRecord& trace) {
        const auto dir = std::filesystem::temp_directory_path() / "tdtw_acc_c8";
        std::filesystem::create_directories(dir);
        OutputBundle bundle{dir};
        bundle.write_timeseries(trace);
        std::ifstream in(dir / "timeseries.csv", std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };

    const auto base = run_transient(params, cfg);
    const auto base_bytes = csv_bytes(base);
    bool ok = true;
    for (int workers : {1, 2, 8}) {
        cfg.workers = workers;
        const auto other = run_transient(params, cfg);
        bool same = other.r_facet.size() == base.r_facet.size() &&
                    other.snapshots.size() == base.snapshots.size();
        for (std::size_t i = 0; same && i < base.r_facet.size(); ++i)
            same = base.r_facet[i] == other.r_facet[i] &&
                   base.s_facet[i] == other.s_facet[i];
        for (std::size_t s = 0; same && s < base.snapshots.size(); ++s)
            same = base.snapshots[s].carriers == other.snapshots[s].carriers;
        same = same && csv_bytes(other) == base_bytes;
        if (!same) ok = false;
    }
    report(8, ok, ok ? "bit-identical traces and CSV bytes across reruns and 1/2/8 workers"
                     : "determinism violated");
}

// --- criterion 9: threshold solver cross-check -------------------------------
void criterion_9() {
    DeviceParams params;
    const std::size_t m = 1000;
    const SimGrid grid = SimGrid::make(params, m);
    const auto profile = build_profile(params, 0.0, 2.50, grid);

    const auto oracle = test_support::qws_mode(profile, params.cavity_length);
    const double gamma_oracle_l = oracle.gamma * params.cavity_length;
    const double delta_oracle_l = oracle.delta * params.cavity_length;

    RunConfig cfg;
    cfg.structure = StructureSpec::conventional_qws();
    cfg.current = 22e-3;
    cfg.duration = 12e-9;
    cfg.n_sections = m;
    cfg.noise_on = false;
    cfg.initial_field = 1e8;
    cfg.workers = 2;
    const auto trace = run_transient(params, cfg);

    // clamped steady-state net gain and detuning, spatial means
    double gamma_sum = 0.0, delta_sum = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        const double n = trace.final_state.carriers[j];
        const double p_local = std::norm(trace.final_state.r_fwd[j]) +
                               std::norm(trace.final_state.s_bwd[j]);
        const auto medium = local_medium(n, p_local, params);
        gamma_sum += 0.5 * (params.confinement * medium.gain * medium.compression_factor -
                            params.alpha_loss);
        delta_sum += medium.detuning;
    }
    const double gamma_tdtw_l = (gamma_sum / static_cast<double>(m)) * params.cavity_length;
    const double delta_mean = delta_sum / static_cast<double>(m);

    // envelope rotation from the facet phase slope over the last 2 ns
    double omega_sum = 0.0;
    std::size_t omega_count = 0;
    for (std::size_t i = trace.r_facet.size() - 1; i > 0; --i) {
        if (trace.t[i - 1] < trace.t.back() - 2e-9) break;
        const auto ratio = trace.r_facet[i] / trace.r_facet[i - 1];
        omega_sum += std::arg(ratio);
        ++omega_count;
    }
    // R ~ e^{-i omega t}: arg slope is -omega
    const double omega = -(omega_sum / static_cast<double>(omega_count)) / trace.sample_dt;
    const double delta_eff_l =
        (delta_mean - omega / params.group_velocity()) * params.cavity_length;

    const double gain_rel = std::abs(gamma_tdtw_l - gamma_oracle_l) / gamma_oracle_l;
    const double delta_tol = 0.05 * 2.50; // 5% of kappa0*L as the detuning scale
    const bool ok = gain_rel <= 0.05 &&
                    std::abs(delta_eff_l - delta_oracle_l) <= delta_tol;
    char buf[240];
    std::snprintf(buf, sizeof(buf),
                  "threshold cross-check: gamma*L tdtw %.4f vs oracle %.4f (rel %.3f, "
                  "want <= 0.05); delta_eff*L %.4f vs oracle %.4f (tol %.3f)",
                  gamma_tdtw_l, gamma_oracle_l, gain_rel, delta_eff_l, delta_oracle_l,
                  delta_tol);
    report(9, ok, buf);
}

} // namespace

int main(int argc, char** argv) {
    const std::string which = argc > 1 ? argv[1] : "all";
    const bool all = which == "all";
    if (all || which == "1") criterion_1();
    if (all || which == "2") criterion_2();
    if (all || which == "3") criterion_3();
    if (all || which == "45" || which == "4" || which == "5") criteria_45();
    if (all || which == "6") criterion_6();
    if (all || which == "7") criterion_7();
    if (all || which == "8") criterion_8();
    if (all || which == "9") criterion_9();
    if (g_failures > 0) {
        std::printf("%d criterion check(s) FAILED\n", g_failures);
        return 1;
    }
    return 0;
}
