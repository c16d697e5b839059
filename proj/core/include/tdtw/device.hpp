#pragma once

#include <cstddef>
#include <vector>

#include "tdtw/constants.hpp"

namespace tdtw {

// Material and structural parameters of the device. Defaults are the
// 1.55 um InGaAsP buried-heterostructure set used throughout; lengths in m,
// times in s, densities in m^-3.
struct DeviceParams {
    double tau_carrier = 4e-9;           // carrier lifetime
    double b_radiative = 1e-16;          // bimolecular recombination, m^3 s^-1
    double c_auger = 3e-41;              // Auger recombination, m^6 s^-1
    double n_transparency = 1.5e24;      // transparency carrier density
    double eps_compression = 1.5e-23;    // gain compression volume, m^3
    double a0_diff_gain = 2.7e-20;       // differential gain, m^2
    double a1_curvature = 1.5e19;        // gain curvature, m^-3
    double a2_peak_shift = 2.7e-32;      // gain-peak shift with carriers, m^4
    double alpha_loss = 4e3;             // internal loss, m^-1
    double n_group = 3.7;                // group index
    double cavity_length = 500e-6;
    double active_thickness = 0.12e-6;
    double active_width = 1.5e-6;
    double active_volume = 90e-18;
    double grating_period = 227.039e-9;
    double lambda_bragg = 1550e-9;
    double lambda_peak_transparency = 1565e-9;
    double confinement = 0.35;
    double phase_shift = 1.5707963267948966;   // quarter-wave shift, rad (90 deg)
    double residue_phase_left = 0.0;           // corrugation phase at left facet

    // Not part of the tabulated set; standard magnitudes, overridable.
    double dn_dN = -1.0e-26;   // differential index, m^3
    double beta_sp = 1e-4;     // spontaneous coupling factor
    double petermann_k = 1.0;  // Petermann excess-noise factor

    // Reference wavelength entering gain/detuning during stepping.
    // Defaults to lambda_bragg; spectral content away from it is carried by
    // the complex envelopes.
    double lambda_ref = 1550e-9;

    double group_velocity() const { return constants::c_light / n_group; }
    // Index at zero injection, fixed by the Bragg condition lambda_B = 2 n0 Lambda.
    double n0_index() const { return lambda_bragg / (2.0 * grating_period); }

    // Throws SimError on non-finite, non-positive, or mutually inconsistent
    // values (active volume vs L*d*w beyond 1%).
    void validate() const;
};

// Per-section discretization. Fields advance exactly one section per step
// (dz = L/M, dt = dz/c_g).
struct SimGrid {
    std::size_t n_sections = 1000;
    double dz = 0.0;
    double dt = 0.0;
    std::size_t carrier_subcycle = 10;

    static SimGrid make(const DeviceParams& params, std::size_t n_sections,
                        std::size_t carrier_subcycle = 10);
};

// Discretized coupling profile: kappa_j at section midpoints and the
// piecewise-constant corrugation phase with the quarter-wave slip at center.
struct GratingProfile {
    std::vector<double> kappa;              // m^-1
    std::vector<double> corrugation_phase;  // rad
    double g_shape = 0.0;
    double kappa0 = 0.0;                    // m^-1, profile amplitude kappa(L/2)
};

// kappa0*L such that the spatial mean of kappa(z)*L over the cavity equals
// target_meanL, by adaptive quadrature of exp(-G u^2) over u in [-1/2, 1/2].
double kappa0_for_mean(double g_shape, double target_meanL);

// Gaussian coupling profile kappa(z) = kappa0 exp(-G ((z - L/2)/L)^2)
// sampled at section midpoints; corrugation phase steps at the section
// boundary nearest z = L/2. Rejects M < 2 and non-finite inputs.
GratingProfile build_profile(const DeviceParams& params, double g_shape,
                             double kappa0L, const SimGrid& grid);

} // namespace tdtw
