#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "tdtw/noise.hpp"

using namespace tdtw;

TEST_CASE("deterministic polynomial kernels match libm") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u01(1e-10, 1.0);
    std::uniform_int_distribution<std::uint32_t> words;
    for (int i = 0; i < 20000; ++i) {
        const double u = u01(rng);
        CHECK(std::abs(detail::bm_log(u) - std::log(u)) <
              1e-9 * std::max(1.0, std::abs(std::log(u))));
        double c, s;
        detail::bm_sincos(u, c, s);
        CHECK(std::abs(c - std::cos(2.0 * M_PI * u)) < 5e-8);
        CHECK(std::abs(s - std::sin(2.0 * M_PI * u)) < 5e-8);
        CHECK(c * c + s * s == doctest::Approx(1.0).epsilon(3e-7));

        const std::uint32_t w = words(rng);
        const double uw = (static_cast<double>(w) + 0.5) * 0x1.0p-32;
        CHECK(std::abs(detail::log_of_uniform(w) - std::log(uw)) <
              1e-9 * std::max(1.0, std::abs(std::log(uw))));
    }
}

TEST_CASE("draws are a pure function of (seed, section, step)") {
    DeviceParams params;
    const SimGrid grid = SimGrid::make(params, 1000);
    NoiseSource a{99, true};
    NoiseSource b{99, true};
    NoiseSource c{100, true};

    const auto d1 = a.draw(17, 123456, Direction::forward, 2e24, grid, params);
    const auto d2 = b.draw(17, 123456, Direction::forward, 2e24, grid, params);
    CHECK(d1 == d2);

    CHECK(a.draw(17, 123456, Direction::backward, 2e24, grid, params) != d1);
    CHECK(a.draw(18, 123456, Direction::forward, 2e24, grid, params) != d1);
    CHECK(a.draw(17, 123457, Direction::forward, 2e24, grid, params) != d1);
    CHECK(c.draw(17, 123456, Direction::forward, 2e24, grid, params) != d1);

    // order independence
    const auto later = a.draw(900, 1, Direction::forward, 2e24, grid, params);
    const auto again = a.draw(17, 123456, Direction::forward, 2e24, grid, params);
    CHECK(again == d1);
    CHECK(later == b.draw(900, 1, Direction::forward, 2e24, grid, params));
}

TEST_CASE("first and second moments of the Langevin draws") {
    DeviceParams params;
    const SimGrid grid = SimGrid::make(params, 1000);
    NoiseSource noise{2024, true};
    const double n_local = 2e24;
    const double sigma2 =
        NoiseSource::sigma(n_local, grid, params) * NoiseSource::sigma(n_local, grid, params);

    const int n = 1'000'000;
    std::complex<double> mean{0, 0};
    std::complex<double> second{0, 0}; // <xi xi>, no conjugate
    double abs2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto xi = noise.draw(static_cast<std::uint32_t>(i & 1023),
                                   static_cast<std::uint64_t>(i >> 10),
                                   (i & 1) ? Direction::backward : Direction::forward,
                                   n_local, grid, params);
        mean += xi;
        second += xi * xi;
        abs2 += std::norm(xi);
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    mean *= inv_n;
    second *= inv_n;
    abs2 *= inv_n;

    const double sigma = std::sqrt(sigma2);
    CHECK(std::abs(mean) < 4.0 * sigma / std::sqrt(static_cast<double>(n)));
    CHECK(abs2 / sigma2 == doctest::Approx(1.0).epsilon(0.01));
    CHECK(std::abs(second) < 4.0 * sigma2 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("declared variance scales with N^2 and the grid") {
    DeviceParams params;
    const SimGrid g1000 = SimGrid::make(params, 1000);
    const SimGrid g500 = SimGrid::make(params, 500);
    const double s1 = NoiseSource::sigma(2e24, g1000, params);
    CHECK(NoiseSource::sigma(4e24, g1000, params) == doctest::Approx(2.0 * s1).epsilon(1e-12));
    // dt*dz both double when M halves: sigma^2 scales by 1/4
    CHECK(NoiseSource::sigma(2e24, g500, params) == doctest::Approx(0.5 * s1).epsilon(1e-12));
    CHECK(NoiseSource::sigma(0.0, g1000, params) == 0.0);
}
