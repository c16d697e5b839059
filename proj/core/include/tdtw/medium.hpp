#pragma once

#include "tdtw/device.hpp"

namespace tdtw {

// Local material state at one section.
struct LocalMedium {
    double gain = 0.0;               // m^-1, may be negative (absorption)
    double index = 1.0;
    double detuning = 0.0;           // m^-1
    double compression_factor = 1.0; // 1/(1 + eps*P)
};

// Parabolic material gain g = A0*dN - A1*(dlambda + A2*dN)^2 with
// dN = N - N0, dlambda = lambda - lambda0.
double material_gain(double carriers, double lambda, const DeviceParams& params);

// n = n0 + Gamma*(dn/dN)*N.
double refractive_index(double carriers, const DeviceParams& params);

// delta = (2pi/lambda) n - (2pi n_g/(lambda*lambda_B)) (lambda - lambda_B) - pi/Lambda.
double detuning(double index, double lambda, const DeviceParams& params);

double compression_factor(double photon_density, const DeviceParams& params);

LocalMedium local_medium(double carriers, double photon_density,
                         const DeviceParams& params);

} // namespace tdtw
