#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tdtw/device.hpp"
#include "tdtw/observables.hpp"
#include "tdtw/run_config.hpp"
#include "tdtw/trace.hpp"

namespace tdtw {

// Fully resolved device + run configuration plus scenario extras, with
// bookkeeping of which keys were overridden vs defaulted.
struct SimulationSetup {
    DeviceParams params;
    RunConfig run;
    double t1 = 3e-9;
    double t2 = 10e-9;
    double spectrum_window = 2e-9;

    std::vector<std::string> overrides;
    bool structure_set = false;
};

SimulationSetup default_setup();

// Key/value text configuration ("key = value", '#' comments, SI-prefixed
// unit suffixes on time/length/current/angle keys). A manifest JSON from a
// previous run is accepted too (its "config" object is re-read). Unknown
// keys and malformed values are errors carrying the line number.
SimulationSetup parse_config(const std::filesystem::path& path,
                             bool require_structure = true);
SimulationSetup parse_config_text(const std::string& text,
                                  bool require_structure = true);

// Applies one key=value pair (CLI overrides reuse the config grammar).
void apply_key(SimulationSetup& setup, const std::string& key,
               const std::string& value, int line = 0);

// Sorted "key = value" lines; doubles serialized losslessly. Equal setups
// produce identical text (and hash).
std::string canonical_config(const SimulationSetup& setup);
std::uint64_t config_hash(const SimulationSetup& setup);

std::vector<std::string> known_keys();
std::vector<std::string> defaults_used(const SimulationSetup& setup);

nlohmann::json make_manifest(const SimulationSetup& setup, const std::string& command,
                             const std::vector<std::string>& warnings = {});

// Per-run output directory. The manifest is written first; a run is complete
// only once summary.json and the .complete marker exist.
struct OutputBundle {
    std::filesystem::path dir;

    static OutputBundle create(const std::filesystem::path& dir,
                               const nlohmann::json& manifest);

    void write_timeseries(const TraceRecord& trace, const std::string& name =
                              "timeseries.csv") const;
    void write_profiles(const TraceRecord& trace, const GratingProfile& profile,
                        const DeviceParams& params, const std::vector<double>& at_times,
                        const std::string& name = "profiles.csv") const;
    void write_spectrum(const Spectrum& spectrum,
                        const std::string& name = "spectrum.csv") const;
    void write_holeburning(const HoleBurningReport& report, double dz,
                           const std::string& name = "holeburning.csv") const;
    void write_li(const std::vector<LiPoint>& curve,
                  const std::string& name = "li.csv") const;
    void finish(const nlohmann::json& summary) const;
};

// Lossless double formatting used by every writer (%.17g).
std::string format_double(double v);

} // namespace tdtw
