#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace tdtw {

// Per-section complex envelopes and carrier density at one time step.
// |R|^2 + |S|^2 is the local photon density (m^-3).
struct LaserState {
    std::vector<std::complex<double>> r_fwd;
    std::vector<std::complex<double>> s_bwd;
    std::vector<double> carriers;
    double time = 0.0;

    static LaserState zeros(std::size_t n_sections) {
        LaserState st;
        st.r_fwd.assign(n_sections, {0.0, 0.0});
        st.s_bwd.assign(n_sections, {0.0, 0.0});
        st.carriers.assign(n_sections, 0.0);
        return st;
    }

    std::size_t sections() const { return r_fwd.size(); }
};

} // namespace tdtw
