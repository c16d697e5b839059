#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tdtw/device.hpp"

namespace tdtw {

// Grating family: uniform coupling, the Gaussian-apodized variant with the
// same mean kappa*L, or an arbitrary (G, kappa0*L) pair.
struct StructureSpec {
    std::string name = "conventional";
    double g_shape = 0.0;
    double kappa0L = 2.50;

    static StructureSpec conventional_qws() { return {"conventional", 0.0, 2.50}; }
    static StructureSpec gdcc_qws() { return {"gdcc", 1.0, 2.7098}; }
    static StructureSpec custom(double g_shape, double kappa0L) {
        return {"custom", g_shape, kappa0L};
    }
    // Accepts "conventional" or "gdcc"; throws SimError otherwise.
    static StructureSpec from_name(const std::string& name);
};

struct RunConfig {
    StructureSpec structure;
    double current = 0.0;         // A, stepped from 0 at t = 0
    double duration = 10e-9;      // s
    std::size_t n_sections = 1000;
    std::size_t carrier_subcycle = 10;
    std::uint64_t seed = 1;
    std::size_t record_stride = 16;
    std::vector<double> snapshot_times;  // explicit longitudinal snapshots, s
    double snapshot_interval = 0.0;      // additional periodic snapshots (0 = off)
    bool noise_on = true;
    double initial_field = 0.0;     // uniform envelope seed for noise-off studies
    double initial_carriers = 0.0;  // uniform carrier preload (noise-off studies)
    std::uint64_t max_steps = 80'000'000;
    double max_wall_seconds = 0.0;  // 0 = unlimited
    int workers = 1;

    // duration within the step budget, snapshot times within duration,
    // stride/current sane. Throws SimError.
    void validate(const DeviceParams& params) const;
};

} // namespace tdtw
