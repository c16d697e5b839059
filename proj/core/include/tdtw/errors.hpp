#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace tdtw {

struct SimError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Field magnitude exceeded the overflow guard; carries the step index.
struct DivergenceError : SimError {
    DivergenceError(std::uint64_t step_index, double photon_density)
        : SimError("field divergence at step " + std::to_string(step_index) +
                   " (photon density " + std::to_string(photon_density) + " m^-3)"),
          step(step_index), peak_photon_density(photon_density) {}
    std::uint64_t step;
    double peak_photon_density;
};

struct ConfigError : SimError {
    explicit ConfigError(const std::string& msg, int line_number = 0)
        : SimError(line_number > 0 ? "line " + std::to_string(line_number) + ": " + msg : msg),
          line(line_number) {}
    int line;
};

} // namespace tdtw
