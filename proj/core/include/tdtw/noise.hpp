#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <utility>

#include "tdtw/device.hpp"

namespace tdtw {

namespace detail {

// Philox4x32-10 counter-based generator (Salmon et al., SC 2011).
// Pure function of (key, counter): draws are reproducible independent of
// execution order and thread count.
struct Philox4x32 {
    static constexpr std::uint32_t kW32A = 0x9E3779B9u;
    static constexpr std::uint32_t kW32B = 0xBB67AE85u;
    static constexpr std::uint32_t kM4x32A = 0xD2511F53u;
    static constexpr std::uint32_t kM4x32B = 0xCD9E8D57u;

    static std::array<std::uint32_t, 4> block(std::uint64_t key,
                                              std::array<std::uint32_t, 4> ctr) {
        std::uint32_t k0 = static_cast<std::uint32_t>(key);
        std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = static_cast<std::uint64_t>(kM4x32A) * ctr[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(kM4x32B) * ctr[2];
            const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
            const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ k0, lo1, hi0 ^ ctr[3] ^ k1, lo0};
            k0 += kW32A;
            k1 += kW32B;
        }
        return ctr;
    }
};

// Deterministic, platform-independent transcendentals for the Box-Muller
// transform. Polynomial kernels, ~1e-9 accuracy; together with Philox they
// fully pin the noise stream bit-for-bit.

// ln((w + 0.5) * 2^-32) for a raw 32-bit word, i.e. log of the open-interval
// uniform. Normalizes v = w + 0.5 to [1, 2) by exponent bit surgery.
inline double log_of_uniform(std::uint32_t w) {
    const int e = (w == 0) ? -1 : (31 - std::countl_zero(w));
    const double v = static_cast<double>(w) + 0.5;
    std::uint64_t scale_bits = static_cast<std::uint64_t>(1023 - e) << 52;
    double scale; // 2^-e
    __builtin_memcpy(&scale, &scale_bits, sizeof scale);
    const double m = v * scale; // [1, 2)
    const double s = (m - 1.0) / (m + 1.0);
    const double s2 = s * s;
    // 2*atanh(s), s in [0, 1/3)
    const double lnm = 2.0 * s *
                       (1.0 + s2 * (1.0 / 3.0 +
                             s2 * (1.0 / 5.0 +
                             s2 * (1.0 / 7.0 +
                             s2 * (1.0 / 9.0 +
                             s2 * (1.0 / 11.0 +
                             s2 * (1.0 / 13.0 +
                             s2 * (1.0 / 15.0 + s2 * (1.0 / 17.0)))))))));
    return lnm + static_cast<double>(e - 32) * 0.6931471805599453;
}

inline double bm_log(double u) {
    // reference form used by tests; the hot path uses log_of_uniform
    int e = 0;
    const double m2 = 2.0 * std::frexp(u, &e); // [1, 2)
    const double s = (m2 - 1.0) / (m2 + 1.0);
    const double s2 = s * s;
    const double lnm = 2.0 * s *
                       (1.0 + s2 * (1.0 / 3.0 +
                             s2 * (1.0 / 5.0 +
                             s2 * (1.0 / 7.0 +
                             s2 * (1.0 / 9.0 +
                             s2 * (1.0 / 11.0 +
                             s2 * (1.0 / 13.0 +
                             s2 * (1.0 / 15.0 + s2 * (1.0 / 17.0)))))))));
    return lnm + static_cast<double>(e - 1) * 0.6931471805599453;
}

// cos and sin of 2*pi*u for u in [0, 1).
inline void bm_sincos(double u, double& cos_out, double& sin_out) {
    static constexpr double kRoot2Inv = 0.7071067811865476;
    static constexpr double kCosSign[4] = {+1.0, -1.0, -1.0, +1.0};
    static constexpr double kSinSign[4] = {+1.0, +1.0, -1.0, -1.0};
    const double t = 4.0 * u;
    const int q = static_cast<int>(t) & 3;
    const double phi = (t - static_cast<double>(static_cast<int>(t)) - 0.5) *
                       1.5707963267948966; // [-pi/4, pi/4)
    const double x2 = phi * phi;
    const double c = 1.0 + x2 * (-1.0 / 2.0 +
                     x2 * (1.0 / 24.0 +
                     x2 * (-1.0 / 720.0 +
                     x2 * (1.0 / 40320.0 + x2 * (-1.0 / 3628800.0)))));
    const double s = phi * (1.0 + x2 * (-1.0 / 6.0 +
                     x2 * (1.0 / 120.0 +
                     x2 * (-1.0 / 5040.0 + x2 * (1.0 / 362880.0)))));
    const double ca = kCosSign[q] * kRoot2Inv;
    const double sa = kSinSign[q] * kRoot2Inv;
    cos_out = ca * c - sa * s;
    sin_out = sa * c + ca * s;
}

inline double uniform_open(std::uint32_t w) {
    return (static_cast<double>(w) + 0.5) * 0x1.0p-32; // (0, 1)
}

// One standard circular complex Gaussian (unit-variance components) from a
// pair of 32-bit words.
inline std::complex<double> gaussian_pair(std::uint32_t w_radius, std::uint32_t w_angle) {
    const double r = std::sqrt(-2.0 * log_of_uniform(w_radius));
    double c, s;
    bm_sincos(uniform_open(w_angle), c, s);
    return {r * c, r * s};
}

} // namespace detail

enum class Direction : std::uint32_t { forward = 0, backward = 1 };

// Langevin spontaneous-emission source. Stateless: every draw is addressed
// by (seed, section, step, direction), so results do not depend on worker
// count or call order.
struct NoiseSource {
    std::uint64_t seed = 0;
    bool enabled = true;

    // Declared discretization of the continuum correlation: per-draw variance
    // <xi xi*> = beta*K*B*N^2 / (c_g * L * dt * dz); the field increment added
    // per step is xi * dt.
    static double sigma(double n_local, const SimGrid& grid, const DeviceParams& params) {
        const double rate = params.beta_sp * params.petermann_k * params.b_radiative *
                            n_local * n_local;
        return std::sqrt(rate / (params.group_velocity() * params.cavity_length *
                                 grid.dt * grid.dz));
    }

    // Standard (unit-component-variance) circular complex pair for the
    // forward and backward equations at one (section, step).
    std::pair<std::complex<double>, std::complex<double>>
    standard_pair(std::uint64_t step, std::uint32_t section) const {
        const auto w = detail::Philox4x32::block(
            seed, {static_cast<std::uint32_t>(step),
                   static_cast<std::uint32_t>(step >> 32), section, 0u});
        return {detail::gaussian_pair(w[0], w[1]), detail::gaussian_pair(w[2], w[3])};
    }

    // <xi> = 0, <xi xi> = 0, <xi xi*> = sigma^2.
    std::complex<double> draw(std::uint32_t section, std::uint64_t step, Direction dir,
                              double n_local, const SimGrid& grid,
                              const DeviceParams& params) const {
        const auto pair = standard_pair(step, section);
        const std::complex<double> z =
            (dir == Direction::forward) ? pair.first : pair.second;
        return z * (sigma(n_local, grid, params) * 0.7071067811865476);
    }
};

} // namespace tdtw
