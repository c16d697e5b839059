#include "selftest.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "tdtw/constants.hpp"
#include "tdtw/engine.hpp"
#include "tdtw/medium.hpp"
#include "tdtw/noise.hpp"
#include "tdtw/observables.hpp"

namespace {

using namespace tdtw;
using std::numbers::pi;

bool check(const char* name, bool ok, const std::string& detail = "") {
    std::printf("[%s] %s%s%s\n", ok ? "PASS" : "FAIL", name,
                detail.empty() ? "" : ": ", detail.c_str());
    return ok;
}

GratingProfile zero_coupling_profile(std::size_t m) {
    GratingProfile p;
    p.kappa.assign(m, 0.0);
    p.corrugation_phase.assign(m, 0.0);
    return p;
}

bool test_profile_normalization() {
    DeviceParams params;
    const double k0L = kappa0_for_mean(1.0, 2.50);
    const SimGrid grid = SimGrid::make(params, 2000);
    const auto profile = build_profile(params, 1.0, k0L, grid);
    double mean = 0.0;
    for (double k : profile.kappa) mean += k;
    mean *= params.cavity_length / static_cast<double>(grid.n_sections);
    bool ok = std::abs(k0L - 2.7098) < 1e-3 && std::abs(mean - 2.50) < 2.5e-3;
    for (std::size_t j = 0; j < grid.n_sections; ++j)
        ok = ok && profile.kappa[j] == profile.kappa[grid.n_sections - 1 - j];
    return check("profile normalization and symmetry", ok,
                 "kappa0_L=" + std::to_string(k0L));
}

bool test_amplification() {
    DeviceParams params;
    params.eps_compression = 0.0;
    const std::size_t m = 200;
    const SimGrid grid = SimGrid::make(params, m);
    Engine engine(params, grid, zero_coupling_profile(m), NoiseSource{0, false});

    const double n_star = 2.5e24;
    LaserState st = LaserState::zeros(m);
    std::fill(st.carriers.begin(), st.carriers.end(), n_star);
    std::fill(st.r_fwd.begin(), st.r_fwd.end(), std::complex<double>{1.0, 0.0});
    engine.set_state(std::move(st));

    const int k = 150;
    for (int i = 0; i < k; ++i) engine.step_fields();
    const double g = material_gain(n_star, params.lambda_ref, params);
    const double expected =
        std::exp(0.5 * (params.confinement * g - params.alpha_loss) * k * grid.dz);
    const double got = std::abs(engine.state().r_fwd[m - 1]);
    const double rel = std::abs(got - expected) / expected;
    return check("kappa=0 analytic amplification", rel < 1e-6,
                 "rel err " + std::to_string(rel));
}

bool test_pulse_advection() {
    DeviceParams params;
    params.lambda_ref = params.lambda_peak_transparency; // g(N0) = 0
    params.dn_dN = 0.0;
    params.alpha_loss = 0.0;
    params.eps_compression = 0.0;
    const std::size_t m = 64;
    const SimGrid grid = SimGrid::make(params, m);
    Engine engine(params, grid, zero_coupling_profile(m), NoiseSource{0, false});

    LaserState st = LaserState::zeros(m);
    std::fill(st.carriers.begin(), st.carriers.end(), params.n_transparency);
    st.r_fwd[5] = {1.0, 0.0};
    engine.set_state(std::move(st));
    const int k = 40;
    for (int i = 0; i < k; ++i) engine.step_fields();

    bool ok = std::abs(std::abs(engine.state().r_fwd[5 + k]) - 1.0) < 1e-12;
    for (std::size_t j = 0; j < m; ++j)
        if (j != 5 + static_cast<std::size_t>(k))
            ok = ok && engine.state().r_fwd[j] == std::complex<double>{0.0, 0.0};
    return check("pulse advection, zero diffusion", ok);
}

bool test_carrier_fixed_point() {
    DeviceParams params;
    const double n0 = params.n_transparency;
    const double i_tr = constants::q_electron * params.active_volume *
                        (n0 / params.tau_carrier + params.b_radiative * n0 * n0 +
                         params.c_auger * n0 * n0 * n0);
    const std::size_t m = 100;
    const SimGrid grid = SimGrid::make(params, m);
    Engine engine(params, grid, zero_coupling_profile(m), NoiseSource{0, false});
    LaserState st = LaserState::zeros(m);
    std::fill(st.carriers.begin(), st.carriers.end(), n0);
    engine.set_state(std::move(st));
    engine.step_carriers(i_tr);
    const double rel = std::abs(engine.state().carriers[m / 2] - n0) / n0;
    return check("transparency current is a carrier fixed point", rel < 1e-12,
                 "I_tr=" + std::to_string(i_tr * 1e3) + " mA");
}

bool test_carrier_decay() {
    DeviceParams params;
    const std::size_t m = 200;
    const SimGrid grid = SimGrid::make(params, m, 10);
    Engine engine(params, grid, zero_coupling_profile(m), NoiseSource{0, false});
    LaserState st = LaserState::zeros(m);
    std::fill(st.carriers.begin(), st.carriers.end(), 1e20);
    engine.set_state(std::move(st));
    const double dt_n = grid.dt * static_cast<double>(grid.carrier_subcycle);
    const auto steps = static_cast<int>(std::llround(1e-9 / dt_n));
    for (int i = 0; i < steps; ++i) engine.step_carriers(0.0);
    const double t = steps * dt_n;
    const double tau_eff = -t / std::log(engine.state().carriers[0] / 1e20);
    const double rel = std::abs(tau_eff - params.tau_carrier) / params.tau_carrier;
    return check("carrier decay time constant", rel < 0.01,
                 "tau_eff=" + std::to_string(tau_eff * 1e9) + " ns");
}

bool test_noise_moments() {
    DeviceParams params;
    const SimGrid grid = SimGrid::make(params, 1000);
    NoiseSource noise{12345, true};
    const double n_local = 2e24;
    const double sigma = NoiseSource::sigma(n_local, grid, params);
    const int n = 100000;
    std::complex<double> mean{0, 0}, second{0, 0};
    double abs2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto xi = noise.draw(static_cast<std::uint32_t>(i % 1000), i / 1000,
                                   Direction::forward, n_local, grid, params);
        mean += xi;
        second += xi * xi;
        abs2 += std::norm(xi);
    }
    mean /= n;
    second /= n;
    abs2 /= n;
    const double s2 = sigma * sigma;
    const bool ok = std::abs(mean) < 5.0 * sigma / std::sqrt(static_cast<double>(n)) &&
                    std::abs(abs2 / s2 - 1.0) < 0.02 && std::abs(second) / s2 < 0.02;
    return check("noise moments", ok,
                 "<xi xi*>/sigma^2=" + std::to_string(abs2 / s2));
}

bool test_determinism(std::size_t n_sections) {
    DeviceParams params;
    RunConfig cfg;
    cfg.structure = StructureSpec::gdcc_qws();
    cfg.current = 30e-3;
    cfg.duration = 0.2e-9;
    cfg.n_sections = n_sections;
    cfg.seed = 7;
    const auto a = run_transient(params, cfg);
    const auto b = run_transient(params, cfg);
    cfg.workers = 2;
    const auto c = run_transient(params, cfg);
    bool ok = a.r_facet.size() == b.r_facet.size() && b.r_facet.size() == c.r_facet.size();
    for (std::size_t i = 0; ok && i < a.r_facet.size(); ++i)
        ok = a.r_facet[i] == b.r_facet[i] && a.r_facet[i] == c.r_facet[i];
    return check("determinism across runs and workers", ok);
}

bool test_spectrum_synthetic() {
    DeviceParams params;
    TraceRecord trace;
    trace.sample_dt = 1e-13;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double t = i * trace.sample_dt;
        const std::complex<double> x =
            std::exp(std::complex<double>(0.0, 2.0 * pi * 1.0e12 * t)) +
            0.1 * std::exp(std::complex<double>(0.0, 2.0 * pi * -0.5e12 * t));
        trace.t.push_back(t);
        trace.r_facet.push_back(x);
        trace.s_facet.push_back({0.0, 0.0});
    }
    const auto spec = compute_spectrum(trace, 0.0, trace.t.back(), params);

    double energy = 0.0;
    for (int i = 0; i < n; ++i) {
        const double w = 0.5 - 0.5 * std::cos(2.0 * pi * i / static_cast<double>(n));
        energy += std::norm(trace.r_facet[static_cast<std::size_t>(i)]) * w * w;
    }
    double total = 0.0;
    for (double v : spec.psd) total += v;
    const double parseval_rel = std::abs(total - energy) / energy;

    const auto ratio = smsr(spec);
    const bool ok = parseval_rel < 1e-9 && spec.peaks.size() >= 2 &&
                    std::abs(ratio.db - 20.0) < 0.2;
    return check("spectrum Parseval + two-tone SMSR", ok,
                 "parseval=" + std::to_string(parseval_rel) +
                     " smsr=" + std::to_string(ratio.db) + " dB");
}

} // namespace

int run_selftest(std::size_t n_sections) {
    int failures = 0;
    failures += !test_profile_normalization();
    failures += !test_amplification();
    failures += !test_pulse_advection();
    failures += !test_carrier_fixed_point();
    failures += !test_carrier_decay();
    failures += !test_noise_moments();
    failures += !test_determinism(n_sections);
    failures += !test_spectrum_synthetic();
    std::printf("%s (%d failure%s)\n", failures == 0 ? "selftest OK" : "selftest FAILED",
                failures, failures == 1 ? "" : "s");
    return failures;
}
