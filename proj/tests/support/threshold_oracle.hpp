#pragma once

// Independent steady-state threshold solver used only by tests: per-section
// 2x2 coupled-mode transfer matrices (exact matrix exponential of the static
// equations) multiplied over the cavity; lasing where the no-input round-trip
// element T22 vanishes. Shares no numerics with the time-domain engine.

#include <complex>

#include "tdtw/device.hpp"

namespace tdtw::test_support {

struct ThresholdMode {
    double gamma = 0.0;  // net amplitude gain, m^-1 (0.5*(Gamma*g - alpha))
    double delta = 0.0;  // detuning, m^-1
    double residual = 0.0;
};

// T22(gamma, delta) of the product transfer matrix for the given profile.
std::complex<double> roundtrip_t22(const GratingProfile& profile, double dz,
                                   double gamma, double delta);

// Newton root of T22 = 0 near the given starting point.
ThresholdMode solve_threshold(const GratingProfile& profile, double dz,
                              double gamma0, double delta0);

// The lowest-gain (lasing) mode near delta = 0 for a quarter-wave-shifted
// cavity.
ThresholdMode qws_mode(const GratingProfile& profile, double cavity_length);

} // namespace tdtw::test_support
