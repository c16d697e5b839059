#pragma once

namespace tdtw::constants {

inline constexpr double c_light = 2.99792458e8;      // m/s
inline constexpr double q_electron = 1.602176634e-19; // C
inline constexpr double h_planck = 6.62607015e-34;    // J s

} // namespace tdtw::constants
