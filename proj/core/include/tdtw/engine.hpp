#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "tdtw/device.hpp"
#include "tdtw/noise.hpp"
#include "tdtw/run_config.hpp"
#include "tdtw/state.hpp"
#include "tdtw/trace.hpp"

namespace tdtw {

// Advances the coupled envelope equations and the carrier rate equation on
// the characteristic grid (dz = c_g dt). Per field step:
//   R_{j+1}^{n+1} = e^{[(Gamma g_j/(2(1+eps P_j)) - alpha_l/2) - i delta_j] dz} R_j^n
//                   + i kappa_j dz e^{-i phi_j} S_j^n + xi dt
// and mirrored for S, with R(0) = S(L) = 0 injected each step. Carriers are
// updated every carrier_subcycle field steps with dt_N = subcycle * dt.
//
// Single-owner: concurrent calls on one Engine are not allowed. Sections fan
// out across `workers` threads; results are identical for any worker count.
class Engine {
  public:
    // Photon densities above this are treated as divergence
    // (~1e10 x the steady-state scale of these devices).
    static constexpr double kOverflowGuard = 1e32;

    Engine(const DeviceParams& params, const SimGrid& grid, GratingProfile profile,
           NoiseSource noise, int workers = 1);

    const LaserState& state() const { return state_; }
    LaserState& state() { return state_; }
    // Replaces the state (sizes must match the grid) and refreshes the
    // cached per-section medium.
    void set_state(LaserState st);

    void step_fields();
    void step_carriers(double current_ampere);
    // Re-derives cached gain/detuning/noise scales from the current carriers;
    // needed after mutating carriers directly.
    void refresh_medium();

    std::uint64_t step_index() const { return step_; }
    std::uint64_t clamp_events() const { return clamp_events_; }
    const SimGrid& grid() const { return grid_; }
    const GratingProfile& profile() const { return profile_; }
    const DeviceParams& params() const { return params_; }

  private:
    template <bool kNoise>
    void step_fields_impl();

    DeviceParams params_;
    SimGrid grid_;
    GratingProfile profile_;
    NoiseSource noise_;
    int workers_ = 1;

    LaserState state_;
    std::vector<std::complex<double>> r_next_, s_next_;

    // static per-section factors
    std::vector<std::complex<double>> coupling_r_, coupling_s_; // i kappa dz e^{∓i phi}
    // carrier-dependent factors, refreshed every carrier update:
    // diag_fac = e^{(Gamma g/2 - alpha/2) dz} e^{-i delta dz}; the per-step
    // compression correction e^{-g_half*x/(1+x)}, x = eps*P, is applied as a
    // second-order polynomial (|argument| <~ 1e-3).
    std::vector<std::complex<double>> diag_fac_;
    std::vector<double> gain_half_dz_;             // Gamma g dz / 2
    std::vector<double> noise_scale_;              // sigma(N) dt / sqrt(2)

    double half_alpha_dz_ = 0.0;
    double eps_ = 0.0;
    std::uint64_t step_ = 0;
    std::uint64_t clamp_events_ = 0;
};

// Full transient: zero fields and carriers, current stepped to cfg.current at
// t = 0, interleaved field/carrier stepping, facet series recorded every
// record_stride steps plus carrier snapshots at the requested instants.
TraceRecord run_transient(const DeviceParams& params, const RunConfig& cfg);

} // namespace tdtw
