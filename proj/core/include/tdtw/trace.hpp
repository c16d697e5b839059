#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "tdtw/device.hpp"
#include "tdtw/state.hpp"

namespace tdtw {

// Recorded output of one transient run: facet envelope time series plus
// longitudinal carrier snapshots and run counters.
struct TraceRecord {
    std::vector<double> t;                          // s, uniform spacing sample_dt
    std::vector<std::complex<double>> r_facet;      // R(L, t)
    std::vector<std::complex<double>> s_facet;      // S(0, t)
    double sample_dt = 0.0;

    struct Snapshot {
        double t = 0.0;
        std::vector<double> carriers;
    };
    std::vector<Snapshot> snapshots;

    SimGrid grid;
    LaserState final_state;
    std::uint64_t steps = 0;
    std::uint64_t clamp_events = 0;
    double wall_seconds = 0.0;

    // |R(L,t)|^2: photon density emitted at the right facet (S(L) = 0 there).
    std::vector<double> photon_out() const {
        std::vector<double> p(r_facet.size());
        for (std::size_t i = 0; i < r_facet.size(); ++i) p[i] = std::norm(r_facet[i]);
        return p;
    }
    std::vector<double> photon_out_left() const {
        std::vector<double> p(s_facet.size());
        for (std::size_t i = 0; i < s_facet.size(); ++i) p[i] = std::norm(s_facet[i]);
        return p;
    }
};

} // namespace tdtw
