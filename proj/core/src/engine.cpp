#include "tdtw/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

#include "tdtw/errors.hpp"
#include "tdtw/medium.hpp"

namespace tdtw {

using std::numbers::pi;

namespace {

// Hot-loop gain evaluation; identical arithmetic to material_gain() without
// the precondition checks.
inline double gain_raw(double n, const DeviceParams& p) {
    const double d_n = n - p.n_transparency;
    const double shifted = (p.lambda_ref - p.lambda_peak_transparency) + p.a2_peak_shift * d_n;
    return p.a0_diff_gain * d_n - p.a1_curvature * shifted * shifted;
}

inline double detuning_raw(double n_carriers, const DeviceParams& p) {
    const double idx = p.n0_index() + p.confinement * p.dn_dN * n_carriers;
    const double bragg = (2.0 * pi / p.lambda_ref) * idx - pi / p.grating_period;
    const double disp = (2.0 * pi * p.n_group / (p.lambda_ref * p.lambda_bragg)) *
                        (p.lambda_ref - p.lambda_bragg);
    return bragg - disp;
}

} // namespace

StructureSpec StructureSpec::from_name(const std::string& name) {
    if (name == "conventional") return conventional_qws();
    if (name == "gdcc") return gdcc_qws();
    throw SimError("unknown structure '" + name + "' (expected conventional|gdcc)");
}

void RunConfig::validate(const DeviceParams& params) const {
    params.validate();
    if (!std::isfinite(current) || current < 0.0)
        throw SimError("current must be finite and >= 0");
    if (!std::isfinite(duration) || duration <= 0.0)
        throw SimError("duration must be finite and > 0");
    if (n_sections < 2) throw SimError("n_sections must be >= 2");
    if (carrier_subcycle < 1) throw SimError("carrier_subcycle must be >= 1");
    if (record_stride < 1) throw SimError("record_stride must be >= 1");
    if (workers < 1) throw SimError("workers must be >= 1");
    const SimGrid grid = SimGrid::make(params, n_sections, carrier_subcycle);
    const double steps = duration / grid.dt;
    if (steps > static_cast<double>(max_steps))
        throw SimError("duration/dt exceeds the step budget (" +
                       std::to_string(static_cast<std::uint64_t>(steps)) + " > " +
                       std::to_string(max_steps) + " steps)");
    for (double ts : snapshot_times)
        if (!(ts >= 0.0 && ts <= duration))
            throw SimError("snapshot time outside run duration");
    if (snapshot_interval < 0.0 || !std::isfinite(snapshot_interval))
        throw SimError("snapshot_interval must be finite and >= 0");
    if (!std::isfinite(initial_field) || !std::isfinite(initial_carriers) ||
        initial_carriers < 0.0)
        throw SimError("initial field/carrier seeds must be finite (carriers >= 0)");
    if (!(structure.g_shape >= 0.0) || !(structure.kappa0L > 0.0))
        throw SimError("structure requires g_shape >= 0 and kappa0L > 0");
}

Engine::Engine(const DeviceParams& params, const SimGrid& grid, GratingProfile profile,
               NoiseSource noise, int workers)
    : params_(params), grid_(grid), profile_(std::move(profile)), noise_(noise),
      workers_(std::max(1, workers)) {
    const std::size_t m = grid_.n_sections;
    if (profile_.kappa.size() != m || profile_.corrugation_phase.size() != m)
        throw SimError("profile size does not match grid");

    state_ = LaserState::zeros(m);
    r_next_.assign(m, {0.0, 0.0});
    s_next_.assign(m, {0.0, 0.0});
    coupling_r_.resize(m);
    coupling_s_.resize(m);
    diag_fac_.assign(m, {1.0, 0.0});
    gain_half_dz_.assign(m, 0.0);
    noise_scale_.assign(m, 0.0);

    for (std::size_t j = 0; j < m; ++j) {
        const double k_dz = profile_.kappa[j] * grid_.dz;
        const double phi = profile_.corrugation_phase[j];
        // i e^{-i phi} = sin(phi) + i cos(phi)
        coupling_r_[j] = {k_dz * std::sin(phi), k_dz * std::cos(phi)};
        coupling_s_[j] = {-k_dz * std::sin(phi), k_dz * std::cos(phi)};
    }
    half_alpha_dz_ = 0.5 * params_.alpha_loss * grid_.dz;
    eps_ = params_.eps_compression;
    refresh_medium();
}

void Engine::set_state(LaserState st) {
    const std::size_t m = grid_.n_sections;
    if (st.sections() != m || st.s_bwd.size() != m || st.carriers.size() != m)
        throw SimError("state size does not match grid");
    state_ = std::move(st);
    refresh_medium();
}

void Engine::refresh_medium() {
    const std::size_t m = grid_.n_sections;
    const double half_gamma_dz = 0.5 * params_.confinement * grid_.dz;
    const double noise_dt = grid_.dt * 0.7071067811865476;
#pragma omp parallel for schedule(static) num_threads(workers_) if (workers_ > 1)
    for (std::ptrdiff_t jj = 0; jj < static_cast<std::ptrdiff_t>(m); ++jj) {
        const auto j = static_cast<std::size_t>(jj);
        const double n = state_.carriers[j];
        gain_half_dz_[j] = half_gamma_dz * gain_raw(n, params_);
        const double phase = detuning_raw(n, params_) * grid_.dz;
        const double amp0 = std::exp(gain_half_dz_[j] - half_alpha_dz_);
        diag_fac_[j] = {amp0 * std::cos(phase), -amp0 * std::sin(phase)};
        noise_scale_[j] = NoiseSource::sigma(n, grid_, params_) * noise_dt;
    }
}

template <bool kNoise>
void Engine::step_fields_impl() {
    const std::size_t m = grid_.n_sections;
    const auto* r = state_.r_fwd.data();
    const auto* s = state_.s_bwd.data();
    auto* rn = r_next_.data();
    auto* sn = s_next_.data();
    double pmax = 0.0;

#pragma omp parallel for schedule(static) num_threads(workers_) \
    reduction(max : pmax) if (workers_ > 1)
    for (std::ptrdiff_t jj = 0; jj < static_cast<std::ptrdiff_t>(m); ++jj) {
        const auto j = static_cast<std::size_t>(jj);
        const double p_local = std::norm(r[j]) + std::norm(s[j]);
        pmax = std::max(pmax, p_local);
        // gain compression: e^{-g_half dz x/(1+x)}, x = eps P, to second order
        const double x = eps_ * p_local;
        const double u = -gain_half_dz_[j] * x / (1.0 + x);
        const double corr = 1.0 + u * (1.0 + 0.5 * u);
        const std::complex<double> fac = corr * diag_fac_[j];
        std::complex<double> xi_r{0.0, 0.0}, xi_s{0.0, 0.0};
        if constexpr (kNoise) {
            const auto [z1, z2] = noise_.standard_pair(step_, static_cast<std::uint32_t>(j));
            xi_r = noise_scale_[j] * z1;
            xi_s = noise_scale_[j] * z2;
        }
        if (j + 1 < m) rn[j + 1] = fac * r[j] + coupling_r_[j] * s[j] + xi_r;
        if (j >= 1) sn[j - 1] = fac * s[j] + coupling_s_[j] * r[j] + xi_s;
    }
    rn[0] = {0.0, 0.0};
    sn[m - 1] = {0.0, 0.0};

    state_.r_fwd.swap(r_next_);
    state_.s_bwd.swap(s_next_);
    ++step_;
    state_.time += grid_.dt;
    if (!(pmax <= kOverflowGuard)) throw DivergenceError(step_, pmax);
}

void Engine::step_fields() {
    if (noise_.enabled)
        step_fields_impl<true>();
    else
        step_fields_impl<false>();
}

void Engine::step_carriers(double current_ampere) {
    if (!(current_ampere >= 0.0))
        throw SimError("drive current must be >= 0");
    const std::size_t m = grid_.n_sections;
    const double dt_n = static_cast<double>(grid_.carrier_subcycle) * grid_.dt;
    const double pump = current_ampere / (constants::q_electron * params_.active_volume);
    const double gamma_cg = params_.confinement * params_.group_velocity();
    const double inv_tau = 1.0 / params_.tau_carrier;
    std::uint64_t clamps = 0;
    bool bad = false;

#pragma omp parallel for schedule(static) num_threads(workers_) \
    reduction(+ : clamps) reduction(|| : bad) if (workers_ > 1)
    for (std::ptrdiff_t jj = 0; jj < static_cast<std::ptrdiff_t>(m); ++jj) {
        const auto j = static_cast<std::size_t>(jj);
        const double n = state_.carriers[j];
        const double p_local = std::norm(state_.r_fwd[j]) + std::norm(state_.s_bwd[j]);
        const double recomb = n * inv_tau + params_.b_radiative * n * n +
                              params_.c_auger * n * n * n;
        const double stim =
            gamma_cg * gain_raw(n, params_) * p_local / (1.0 + eps_ * p_local);
        double next = n + dt_n * (pump - recomb - stim);
        if (next < 0.0) {
            next = 0.0;
            ++clamps;
        }
        bad = bad || !std::isfinite(next);
        state_.carriers[j] = next;
    }
    clamp_events_ += clamps;
    if (bad) throw SimError("non-finite carrier density at step " + std::to_string(step_));
    refresh_medium();
}

TraceRecord run_transient(const DeviceParams& params, const RunConfig& cfg) {
    cfg.validate(params);
    const SimGrid grid = SimGrid::make(params, cfg.n_sections, cfg.carrier_subcycle);
    GratingProfile profile =
        build_profile(params, cfg.structure.g_shape, cfg.structure.kappa0L, grid);
    NoiseSource noise{cfg.seed, cfg.noise_on};
    Engine engine(params, grid, std::move(profile), noise, cfg.workers);

    if (cfg.initial_field != 0.0 || cfg.initial_carriers != 0.0) {
        LaserState st = LaserState::zeros(grid.n_sections);
        std::fill(st.r_fwd.begin(), st.r_fwd.end(),
                  std::complex<double>{cfg.initial_field, 0.0});
        std::fill(st.s_bwd.begin(), st.s_bwd.end(),
                  std::complex<double>{cfg.initial_field, 0.0});
        std::fill(st.carriers.begin(), st.carriers.end(), cfg.initial_carriers);
        engine.set_state(std::move(st));
    }

    const auto n_steps = static_cast<std::uint64_t>(std::llround(cfg.duration / grid.dt));

    // Snapshot schedule in step indices (explicit instants plus the periodic
    // cadence), deduplicated.
    std::vector<std::uint64_t> snap_steps;
    for (double ts : cfg.snapshot_times)
        snap_steps.push_back(static_cast<std::uint64_t>(std::llround(ts / grid.dt)));
    if (cfg.snapshot_interval > 0.0) {
        const auto every =
            std::max<std::uint64_t>(1, static_cast<std::uint64_t>(
                                           std::llround(cfg.snapshot_interval / grid.dt)));
        for (std::uint64_t k = 0; k <= n_steps; k += every) snap_steps.push_back(k);
    }
    std::sort(snap_steps.begin(), snap_steps.end());
    snap_steps.erase(std::unique(snap_steps.begin(), snap_steps.end()), snap_steps.end());

    TraceRecord trace;
    trace.grid = grid;
    trace.sample_dt = static_cast<double>(cfg.record_stride) * grid.dt;
    trace.t.reserve(n_steps / cfg.record_stride + 2);
    trace.r_facet.reserve(n_steps / cfg.record_stride + 2);
    trace.s_facet.reserve(n_steps / cfg.record_stride + 2);

    const std::size_t last = grid.n_sections - 1;
    auto record_sample = [&](std::uint64_t k) {
        trace.t.push_back(static_cast<double>(k) * grid.dt);
        trace.r_facet.push_back(engine.state().r_fwd[last]);
        trace.s_facet.push_back(engine.state().s_bwd[0]);
    };
    auto record_snapshot = [&](std::uint64_t k) {
        trace.snapshots.push_back(
            {static_cast<double>(k) * grid.dt, engine.state().carriers});
    };

    record_sample(0);
    std::size_t snap_at = 0;
    while (snap_at < snap_steps.size() && snap_steps[snap_at] == 0) {
        record_snapshot(0);
        ++snap_at;
    }

    const auto t_start = std::chrono::steady_clock::now();
    for (std::uint64_t k = 1; k <= n_steps; ++k) {
        engine.step_fields();
        if (k % grid.carrier_subcycle == 0) engine.step_carriers(cfg.current);
        if (k % cfg.record_stride == 0) record_sample(k);
        while (snap_at < snap_steps.size() && snap_steps[snap_at] == k) {
            record_snapshot(k);
            ++snap_at;
        }
        if (cfg.max_wall_seconds > 0.0 && (k & 0xFFFF) == 0) {
            const std::chrono::duration<double> elapsed =
                std::chrono::steady_clock::now() - t_start;
            if (elapsed.count() > cfg.max_wall_seconds)
                throw SimError("wall-clock budget exceeded at step " + std::to_string(k));
        }
    }
    const std::chrono::duration<double> elapsed =
        std::chrono::steady_clock::now() - t_start;

    trace.final_state = engine.state();
    trace.steps = engine.step_index();
    trace.clamp_events = engine.clamp_events();
    trace.wall_seconds = elapsed.count();
    return trace;
}

} // namespace tdtw
