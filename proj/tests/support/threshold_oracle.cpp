#include "support/threshold_oracle.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace tdtw::test_support {

namespace {

using cplx = std::complex<double>;

struct Mat2 {
    cplx a, b, c, d;
};

Mat2 mul(const Mat2& x, const Mat2& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
            x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
}

// exp(A dz) for A = [[a, b], [c, -a]] with q^2 = a^2 + b*c:
// cosh(q dz) I + sinh(q dz)/q * A.
Mat2 section_matrix(double kappa, double phase, double dz, cplx a) {
    const cplx i{0.0, 1.0};
    const cplx b = i * kappa * std::exp(-i * phase);
    const cplx c = -i * kappa * std::exp(i * phase);
    const cplx q = std::sqrt(a * a + b * c);
    cplx ch, soq;
    if (std::abs(q) * dz < 1e-8) {
        ch = 1.0 + 0.5 * q * q * dz * dz;
        soq = dz;
    } else {
        ch = std::cosh(q * dz);
        soq = std::sinh(q * dz) / q;
    }
    return {ch + soq * a, soq * b, soq * c, ch - soq * a};
}

} // namespace

cplx roundtrip_t22(const GratingProfile& profile, double dz, double gamma, double delta) {
    const cplx a{gamma, -delta};
    Mat2 t{1.0, 0.0, 0.0, 1.0};
    for (std::size_t j = 0; j < profile.kappa.size(); ++j)
        t = mul(section_matrix(profile.kappa[j], profile.corrugation_phase[j], dz, a), t);
    return t.d;
}

ThresholdMode solve_threshold(const GratingProfile& profile, double dz, double gamma0,
                              double delta0) {
    double g = gamma0, d = delta0;
    for (int it = 0; it < 100; ++it) {
        const cplx f = roundtrip_t22(profile, dz, g, d);
        const double hg = std::max(1e-6 * std::abs(g), 1e-2);
        const double hd = std::max(1e-6 * std::abs(d), 1e-2);
        const cplx fg = (roundtrip_t22(profile, dz, g + hg, d) - f) / hg;
        const cplx fd = (roundtrip_t22(profile, dz, g, d + hd) - f) / hd;
        const double det = fg.real() * fd.imag() - fg.imag() * fd.real();
        if (det == 0.0) break;
        const double step_g = (-f.real() * fd.imag() + f.imag() * fd.real()) / det;
        const double step_d = (-fg.real() * f.imag() + fg.imag() * f.real()) / det;
        g += step_g;
        d += step_d;
        if (std::abs(step_g) < 1e-9 && std::abs(step_d) < 1e-9) break;
    }
    return {g, d, std::abs(roundtrip_t22(profile, dz, g, d))};
}

ThresholdMode qws_mode(const GratingProfile& profile, double cavity_length) {
    const double dz = cavity_length / static_cast<double>(profile.kappa.size());
    ThresholdMode best{0, 0, 1e300};
    // scan for a basin near delta = 0 and polish by Newton
    for (double g0L : {0.3, 0.5, 0.8, 1.2}) {
        const auto mode =
            solve_threshold(profile, dz, g0L / cavity_length, 0.0);
        const bool near_bragg = std::abs(mode.delta * cavity_length) < 1.0;
        if (mode.residual < 1e-6 && near_bragg &&
            (best.residual > 1e-6 || mode.gamma < best.gamma))
            best = mode;
    }
    if (best.residual > 1e-6)
        throw std::runtime_error("qws_mode: no Bragg-resonance root found");
    return best;
}

} // namespace tdtw::test_support
