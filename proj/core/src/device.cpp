#include "tdtw/device.hpp"

#include <cmath>
#include <string>

#include "tdtw/errors.hpp"

namespace tdtw {

namespace {

void require_finite_positive(double v, const char* name) {
    if (!std::isfinite(v) || v <= 0.0)
        throw SimError(std::string(name) + " must be finite and > 0");
}

// Adaptive Simpson for smooth integrands on [a, b].
double simpson(double (*f)(double, double), double p, double a, double b) {
    struct Rec {
        static double run(double (*f)(double, double), double p, double a, double b,
                          double fa, double fm, double fb, double whole, double tol, int depth) {
            double m = 0.5 * (a + b);
            double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
            double flm = f(lm, p), frm = f(rm, p);
            double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if (depth > 40 || std::abs(left + right - whole) < 15.0 * tol)
                return left + right + (left + right - whole) / 15.0;
            return run(f, p, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
                   run(f, p, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
        }
    };
    double fa = f(a, p), fb = f(b, p), fm = f(0.5 * (a + b), p);
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return Rec::run(f, p, a, b, fa, fm, fb, whole, 1e-13, 0);
}

double gauss_shape(double u, double g) { return std::exp(-g * u * u); }

} // namespace

void DeviceParams::validate() const {
    require_finite_positive(tau_carrier, "tau_carrier");
    require_finite_positive(b_radiative, "b_radiative");
    require_finite_positive(c_auger, "c_auger");
    require_finite_positive(n_transparency, "n_transparency");
    require_finite_positive(a0_diff_gain, "a0_diff_gain");
    require_finite_positive(a1_curvature, "a1_curvature");
    require_finite_positive(a2_peak_shift, "a2_peak_shift");
    require_finite_positive(alpha_loss, "alpha_loss");
    require_finite_positive(n_group, "n_group");
    require_finite_positive(cavity_length, "cavity_length");
    require_finite_positive(active_thickness, "active_thickness");
    require_finite_positive(active_width, "active_width");
    require_finite_positive(active_volume, "active_volume");
    require_finite_positive(grating_period, "grating_period");
    require_finite_positive(lambda_bragg, "lambda_bragg");
    require_finite_positive(lambda_peak_transparency, "lambda_peak_transparency");
    require_finite_positive(lambda_ref, "lambda_ref");
    if (!std::isfinite(eps_compression) || eps_compression < 0.0)
        throw SimError("eps_compression must be finite and >= 0");
    if (!std::isfinite(confinement) || confinement <= 0.0 || confinement > 1.0)
        throw SimError("confinement must lie in (0, 1]");
    if (!std::isfinite(phase_shift) || !std::isfinite(residue_phase_left))
        throw SimError("phase angles must be finite");
    if (!std::isfinite(dn_dN)) throw SimError("dn_dN must be finite");
    if (!std::isfinite(beta_sp) || beta_sp < 0.0)
        throw SimError("beta_sp must be finite and >= 0");
    if (!std::isfinite(petermann_k) || petermann_k <= 0.0)
        throw SimError("petermann_k must be finite and > 0");

    double v_geom = cavity_length * active_thickness * active_width;
    if (std::abs(v_geom - active_volume) > 0.01 * active_volume)
        throw SimError("active_volume inconsistent with L*d*w by more than 1%");
}

SimGrid SimGrid::make(const DeviceParams& params, std::size_t n_sections,
                      std::size_t carrier_subcycle) {
    if (n_sections < 2) throw SimError("grid needs at least 2 sections");
    if (carrier_subcycle < 1) throw SimError("carrier_subcycle must be >= 1");
    SimGrid g;
    g.n_sections = n_sections;
    g.dz = params.cavity_length / static_cast<double>(n_sections);
    g.dt = g.dz / params.group_velocity();
    g.carrier_subcycle = carrier_subcycle;
    return g;
}

double kappa0_for_mean(double g_shape, double target_meanL) {
    if (!std::isfinite(g_shape) || g_shape < 0.0)
        throw SimError("g_shape must be finite and >= 0");
    if (!std::isfinite(target_meanL) || target_meanL <= 0.0)
        throw SimError("target mean kappa*L must be finite and > 0");
    if (g_shape == 0.0) return target_meanL;
    double mean_factor = simpson(gauss_shape, g_shape, -0.5, 0.5);
    return target_meanL / mean_factor;
}

GratingProfile build_profile(const DeviceParams& params, double g_shape,
                             double kappa0L, const SimGrid& grid) {
    if (!std::isfinite(g_shape) || g_shape < 0.0)
        throw SimError("g_shape must be finite and >= 0");
    if (!std::isfinite(kappa0L) || kappa0L <= 0.0)
        throw SimError("kappa0L must be finite and > 0");
    const std::size_t m = grid.n_sections;
    if (m < 2) throw SimError("grid needs at least 2 sections");

    GratingProfile p;
    p.g_shape = g_shape;
    p.kappa0 = kappa0L / params.cavity_length;
    p.kappa.assign(m, p.kappa0);
    if (g_shape != 0.0) {
        // Evaluate one half and mirror: the profile is symmetric about L/2
        // and the mirrored values must match bit-exactly.
        for (std::size_t j = 0; j < (m + 1) / 2; ++j) {
            double u = ((static_cast<double>(j) + 0.5) / static_cast<double>(m)) - 0.5;
            double k = p.kappa0 * std::exp(-g_shape * u * u);
            p.kappa[j] = k;
            p.kappa[m - 1 - j] = k;
        }
    }

    // A quarter-wave (90 deg optical) shift displaces the grating by half a
    // period: corrugation phase slips by 2*phase_shift at the boundary
    // nearest z = L/2.
    const std::size_t shift_at = static_cast<std::size_t>(
        std::llround(static_cast<double>(m) / 2.0));
    p.corrugation_phase.assign(m, params.residue_phase_left);
    for (std::size_t j = shift_at; j < m; ++j)
        p.corrugation_phase[j] += 2.0 * params.phase_shift;
    return p;
}

} // namespace tdtw
