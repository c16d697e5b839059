#include "tdtw/medium.hpp"

#include <cmath>
#include <numbers>

#include "tdtw/errors.hpp"

namespace tdtw {

using std::numbers::pi;

double material_gain(double carriers, double lambda, const DeviceParams& params) {
    if (!std::isfinite(carriers) || carriers < 0.0)
        throw SimError("material_gain: carrier density must be finite and >= 0");
    if (!std::isfinite(lambda) || lambda < 1.4e-6 || lambda > 1.7e-6)
        throw SimError("material_gain: lambda outside [1.4, 1.7] um");
    const double d_n = carriers - params.n_transparency;
    const double d_lambda = lambda - params.lambda_peak_transparency;
    const double shifted = d_lambda + params.a2_peak_shift * d_n;
    return params.a0_diff_gain * d_n - params.a1_curvature * shifted * shifted;
}

double refractive_index(double carriers, const DeviceParams& params) {
    if (!std::isfinite(carriers) || carriers < 0.0)
        throw SimError("refractive_index: carrier density must be finite and >= 0");
    return params.n0_index() + params.confinement * params.dn_dN * carriers;
}

double detuning(double index, double lambda, const DeviceParams& params) {
    if (!std::isfinite(index) || index <= 1.0)
        throw SimError("detuning: index must be finite and > 1");
    if (!std::isfinite(lambda) || lambda <= 0.0)
        throw SimError("detuning: lambda must be finite and > 0");
    const double bragg_mismatch = (2.0 * pi / lambda) * index - pi / params.grating_period;
    const double dispersion = (2.0 * pi * params.n_group / (lambda * params.lambda_bragg)) *
                              (lambda - params.lambda_bragg);
    return bragg_mismatch - dispersion;
}

double compression_factor(double photon_density, const DeviceParams& params) {
    return 1.0 / (1.0 + params.eps_compression * photon_density);
}

LocalMedium local_medium(double carriers, double photon_density,
                         const DeviceParams& params) {
    LocalMedium m;
    m.gain = material_gain(carriers, params.lambda_ref, params);
    m.index = refractive_index(carriers, params);
    m.detuning = detuning(m.index, params.lambda_ref, params);
    m.compression_factor = compression_factor(photon_density, params);
    return m;
}

} // namespace tdtw
