#include "tdtw/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "tdtw/errors.hpp"
#include "tdtw/version.hpp"

namespace tdtw {

namespace {

enum class Unit { none, time, length, current, angle };

double unit_multiplier(Unit unit, const std::string& suffix, int line) {
    if (suffix.empty()) return 1.0;
    static const std::map<std::string, double> time_units = {
        {"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"ns", 1e-9}, {"ps", 1e-12}, {"fs", 1e-15}};
    static const std::map<std::string, double> length_units = {
        {"m", 1.0}, {"cm", 1e-2}, {"mm", 1e-3}, {"um", 1e-6}, {"nm", 1e-9}, {"pm", 1e-12}};
    static const std::map<std::string, double> current_units = {
        {"A", 1.0}, {"mA", 1e-3}, {"uA", 1e-6}};
    const std::map<std::string, double>* table = nullptr;
    switch (unit) {
        case Unit::time: table = &time_units; break;
        case Unit::length: table = &length_units; break;
        case Unit::current: table = &current_units; break;
        case Unit::angle:
            if (suffix == "rad") return 1.0;
            if (suffix == "deg") return 3.141592653589793 / 180.0;
            throw ConfigError("malformed unit suffix '" + suffix + "' (expected rad|deg)", line);
        case Unit::none:
            throw ConfigError("unexpected unit suffix '" + suffix + "' on a bare-number key",
                              line);
    }
    const auto it = table->find(suffix);
    if (it == table->end())
        throw ConfigError("malformed unit suffix '" + suffix + "'", line);
    return it->second;
}

double parse_real(const std::string& value, Unit unit, int line) {
    const char* s = value.c_str();
    char* end = nullptr;
    const double v = std::strtod(s, &end);
    if (end == s) throw ConfigError("malformed number '" + value + "'", line);
    std::string suffix(end);
    const auto ws = suffix.find_first_not_of(" \t");
    suffix = (ws == std::string::npos) ? "" : suffix.substr(ws);
    const auto we = suffix.find_last_not_of(" \t");
    if (we != std::string::npos) suffix = suffix.substr(0, we + 1);
    const double scaled = v * unit_multiplier(unit, suffix, line);
    if (!std::isfinite(scaled)) throw ConfigError("non-finite value '" + value + "'", line);
    return scaled;
}

std::uint64_t parse_uint(const std::string& value, int line) {
    try {
        size_t pos = 0;
        const auto v = std::stoull(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("malformed integer '" + value + "'", line);
    }
}

bool parse_bool(const std::string& value, int line) {
    if (value == "on" || value == "true" || value == "1") return true;
    if (value == "off" || value == "false" || value == "0") return false;
    throw ConfigError("malformed boolean '" + value + "' (expected on|off)", line);
}

struct KeySpec {
    Unit unit;
    std::function<void(SimulationSetup&, const std::string&, int)> set;
    std::function<std::string(const SimulationSetup&)> get;
};

std::string fmt_uint(std::uint64_t v) { return std::to_string(v); }

const std::map<std::string, KeySpec>& key_registry() {
    static const std::map<std::string, KeySpec> registry = [] {
        std::map<std::string, KeySpec> reg;
        auto real_key = [&reg](const std::string& name, Unit unit, double DeviceParams::*field) {
            reg[name] = {unit,
                         [unit, field](SimulationSetup& s, const std::string& v, int line) {
                             s.params.*field = parse_real(v, unit, line);
                         },
                         [field](const SimulationSetup& s) {
                             return format_double(s.params.*field);
                         }};
        };
        real_key("tau_carrier", Unit::time, &DeviceParams::tau_carrier);
        real_key("b_radiative", Unit::none, &DeviceParams::b_radiative);
        real_key("c_auger", Unit::none, &DeviceParams::c_auger);
        real_key("n_transparency", Unit::none, &DeviceParams::n_transparency);
        real_key("eps_compression", Unit::none, &DeviceParams::eps_compression);
        real_key("a0_diff_gain", Unit::none, &DeviceParams::a0_diff_gain);
        real_key("a1_curvature", Unit::none, &DeviceParams::a1_curvature);
        real_key("a2_peak_shift", Unit::none, &DeviceParams::a2_peak_shift);
        real_key("alpha_loss", Unit::none, &DeviceParams::alpha_loss);
        real_key("n_group", Unit::none, &DeviceParams::n_group);
        real_key("cavity_length", Unit::length, &DeviceParams::cavity_length);
        real_key("active_thickness", Unit::length, &DeviceParams::active_thickness);
        real_key("active_width", Unit::length, &DeviceParams::active_width);
        real_key("active_volume", Unit::none, &DeviceParams::active_volume);
        real_key("grating_period", Unit::length, &DeviceParams::grating_period);
        real_key("lambda_bragg", Unit::length, &DeviceParams::lambda_bragg);
        real_key("lambda_peak_transparency", Unit::length,
                 &DeviceParams::lambda_peak_transparency);
        real_key("confinement", Unit::none, &DeviceParams::confinement);
        real_key("phase_shift", Unit::angle, &DeviceParams::phase_shift);
        real_key("residue_phase_left", Unit::angle, &DeviceParams::residue_phase_left);
        real_key("dn_dN", Unit::none, &DeviceParams::dn_dN);
        real_key("beta_sp", Unit::none, &DeviceParams::beta_sp);
        real_key("petermann_k", Unit::none, &DeviceParams::petermann_k);
        real_key("lambda_ref", Unit::length, &DeviceParams::lambda_ref);

        reg["structure"] = {
            Unit::none,
            [](SimulationSetup& s, const std::string& v, int line) {
                if (v == "conventional" || v == "gdcc") {
                    const auto custom_g = s.run.structure.g_shape;
                    const auto custom_k = s.run.structure.kappa0L;
                    s.run.structure = StructureSpec::from_name(v);
                    if (s.structure_set && s.run.structure.name == "custom") {
                        s.run.structure.g_shape = custom_g;
                        s.run.structure.kappa0L = custom_k;
                    }
                } else if (v == "custom") {
                    s.run.structure.name = "custom";
                } else {
                    throw ConfigError(
                        "unknown structure '" + v + "' (conventional|gdcc|custom)", line);
                }
                s.structure_set = true;
            },
            [](const SimulationSetup& s) { return s.run.structure.name; }};
        reg["g_shape"] = {Unit::none,
                          [](SimulationSetup& s, const std::string& v, int line) {
                              s.run.structure.g_shape = parse_real(v, Unit::none, line);
                          },
                          [](const SimulationSetup& s) {
                              return format_double(s.run.structure.g_shape);
                          }};
        reg["kappa0_L"] = {Unit::none,
                           [](SimulationSetup& s, const std::string& v, int line) {
                               s.run.structure.kappa0L = parse_real(v, Unit::none, line);
                           },
                           [](const SimulationSetup& s) {
                               return format_double(s.run.structure.kappa0L);
                           }};

        reg["current"] = {Unit::current,
                          [](SimulationSetup& s, const std::string& v, int line) {
                              s.run.current = parse_real(v, Unit::current, line);
                          },
                          [](const SimulationSetup& s) { return format_double(s.run.current); }};
        auto time_key = [&reg](const std::string& name, double RunConfig::*field) {
            reg[name] = {Unit::time,
                         [field](SimulationSetup& s, const std::string& v, int line) {
                             s.run.*field = parse_real(v, Unit::time, line);
                         },
                         [field](const SimulationSetup& s) {
                             return format_double(s.run.*field);
                         }};
        };
        time_key("duration", &RunConfig::duration);
        time_key("snapshot_interval", &RunConfig::snapshot_interval);
        time_key("max_wall", &RunConfig::max_wall_seconds);

        reg["sections"] = {Unit::none,
                           [](SimulationSetup& s, const std::string& v, int line) {
                               s.run.n_sections = parse_uint(v, line);
                           },
                           [](const SimulationSetup& s) { return fmt_uint(s.run.n_sections); }};
        reg["carrier_subcycle"] = {
            Unit::none,
            [](SimulationSetup& s, const std::string& v, int line) {
                s.run.carrier_subcycle = parse_uint(v, line);
            },
            [](const SimulationSetup& s) { return fmt_uint(s.run.carrier_subcycle); }};
        reg["seed"] = {Unit::none,
                       [](SimulationSetup& s, const std::string& v, int line) {
                           s.run.seed = parse_uint(v, line);
                       },
                       [](const SimulationSetup& s) { return fmt_uint(s.run.seed); }};
        reg["record_stride"] = {
            Unit::none,
            [](SimulationSetup& s, const std::string& v, int line) {
                s.run.record_stride = parse_uint(v, line);
            },
            [](const SimulationSetup& s) { return fmt_uint(s.run.record_stride); }};
        reg["max_steps"] = {Unit::none,
                            [](SimulationSetup& s, const std::string& v, int line) {
                                s.run.max_steps = parse_uint(v, line);
                            },
                            [](const SimulationSetup& s) { return fmt_uint(s.run.max_steps); }};
        reg["workers"] = {Unit::none,
                          [](SimulationSetup& s, const std::string& v, int line) {
                              s.run.workers = static_cast<int>(parse_uint(v, line));
                          },
                          [](const SimulationSetup& s) {
                              return fmt_uint(static_cast<std::uint64_t>(s.run.workers));
                          }};
        reg["noise"] = {Unit::none,
                        [](SimulationSetup& s, const std::string& v, int line) {
                            s.run.noise_on = parse_bool(v, line);
                        },
                        [](const SimulationSetup& s) {
                            return std::string(s.run.noise_on ? "on" : "off");
                        }};
        reg["initial_field"] = {Unit::none,
                                [](SimulationSetup& s, const std::string& v, int line) {
                                    s.run.initial_field = parse_real(v, Unit::none, line);
                                },
                                [](const SimulationSetup& s) {
                                    return format_double(s.run.initial_field);
                                }};

        auto scenario_time = [&reg](const std::string& name, double SimulationSetup::*field) {
            reg[name] = {Unit::time,
                         [field](SimulationSetup& s, const std::string& v, int line) {
                             s.*field = parse_real(v, Unit::time, line);
                         },
                         [field](const SimulationSetup& s) { return format_double(s.*field); }};
        };
        scenario_time("t1", &SimulationSetup::t1);
        scenario_time("t2", &SimulationSetup::t2);
        scenario_time("spectrum_window", &SimulationSetup::spectrum_window);
        return reg;
    }();
    return registry;
}

} // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

SimulationSetup default_setup() { return SimulationSetup{}; }

void apply_key(SimulationSetup& setup, const std::string& key, const std::string& value,
               int line) {
    const auto& reg = key_registry();
    const auto it = reg.find(key);
    if (it == reg.end()) throw ConfigError("unknown key '" + key + "'", line);
    it->second.set(setup, value, line);
    if (std::find(setup.overrides.begin(), setup.overrides.end(), key) ==
        setup.overrides.end())
        setup.overrides.push_back(key);
}

namespace {

SimulationSetup parse_keyvalue_text(const std::string& text, bool require_structure) {
    SimulationSetup setup = default_setup();
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r");
        line = line.substr(first, last - first + 1);

        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected 'key = value'", line_no);
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t");
            if (a == std::string::npos) return std::string();
            const auto b = s.find_last_not_of(" \t");
            return s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("empty key", line_no);
        if (value.empty()) throw ConfigError("empty value for '" + key + "'", line_no);
        apply_key(setup, key, value, line_no);
    }
    if (require_structure && !setup.structure_set)
        throw ConfigError("structure must be given explicitly (conventional|gdcc|custom)");
    if (setup.run.structure.name != "custom") {
        for (const auto& k : setup.overrides)
            if (k == "g_shape" || k == "kappa0_L")
                throw ConfigError("'" + k + "' is only meaningful with structure = custom");
    }
    return setup;
}

} // namespace

SimulationSetup parse_config_text(const std::string& text, bool require_structure) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        nlohmann::json manifest;
        try {
            manifest = nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("manifest JSON: ") + e.what());
        }
        if (!manifest.contains("config") || !manifest["config"].is_object())
            throw ConfigError("manifest JSON lacks a 'config' object");
        std::string flat;
        for (const auto& [k, v] : manifest["config"].items())
            flat += k + " = " + v.get<std::string>() + "\n";
        return parse_keyvalue_text(flat, require_structure);
    }
    return parse_keyvalue_text(text, require_structure);
}

SimulationSetup parse_config(const std::filesystem::path& path, bool require_structure) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), require_structure);
}

std::vector<std::string> known_keys() {
    std::vector<std::string> keys;
    for (const auto& [k, spec] : key_registry()) keys.push_back(k);
    return keys;
}

std::vector<std::string> defaults_used(const SimulationSetup& setup) {
    std::vector<std::string> out;
    for (const auto& [k, spec] : key_registry()) {
        if ((k == "g_shape" || k == "kappa0_L") && setup.run.structure.name != "custom")
            continue;
        if (std::find(setup.overrides.begin(), setup.overrides.end(), k) ==
            setup.overrides.end())
            out.push_back(k);
    }
    return out;
}

std::string canonical_config(const SimulationSetup& setup) {
    std::string out;
    for (const auto& [k, spec] : key_registry()) {
        if ((k == "g_shape" || k == "kappa0_L") && setup.run.structure.name != "custom")
            continue; // implied by the named structure
        out += k + " = " + spec.get(setup) + "\n";
    }
    return out;
}

std::uint64_t config_hash(const SimulationSetup& setup) {
    // FNV-1a 64
    const std::string text = canonical_config(setup);
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

nlohmann::json make_manifest(const SimulationSetup& setup, const std::string& command,
                             const std::vector<std::string>& warnings) {
    nlohmann::json config;
    for (const auto& [k, spec] : key_registry()) {
        if ((k == "g_shape" || k == "kappa0_L") && setup.run.structure.name != "custom")
            continue;
        config[k] = spec.get(setup);
    }
    char hash_hex[20];
    std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                  static_cast<unsigned long long>(config_hash(setup)));

    const SimGrid grid =
        SimGrid::make(setup.params, setup.run.n_sections, setup.run.carrier_subcycle);
    nlohmann::json manifest = {
        {"schema_version", 1},
        {"generator", {{"name", "tdtw"}, {"version", kVersion}}},
        {"command", command},
        {"config", config},
        {"overrides", setup.overrides},
        {"defaults_used", defaults_used(setup)},
        {"derived",
         {{"n0_index", setup.params.n0_index()},
          {"group_velocity_m_per_s", setup.params.group_velocity()},
          {"dz_m", grid.dz},
          {"dt_s", grid.dt}}},
        {"config_hash", std::string("fnv1a64:") + hash_hex},
        {"warnings", warnings},
    };
    return manifest;
}

OutputBundle OutputBundle::create(const std::filesystem::path& dir,
                                  const nlohmann::json& manifest) {
    std::filesystem::create_directories(dir);
    std::ofstream out(dir / "manifest.json");
    if (!out) throw SimError("cannot write manifest in '" + dir.string() + "'");
    out << manifest.dump(2) << "\n";
    return OutputBundle{dir};
}

void OutputBundle::write_timeseries(const TraceRecord& trace, const std::string& name) const {
    std::ofstream out(dir / name);
    out << "t_s,re_R_L_m^-1.5,im_R_L_m^-1.5,P_L_m^-3,P_0_m^-3\n";
    for (std::size_t i = 0; i < trace.t.size(); ++i) {
        out << format_double(trace.t[i]) << ',' << format_double(trace.r_facet[i].real())
            << ',' << format_double(trace.r_facet[i].imag()) << ','
            << format_double(std::norm(trace.r_facet[i])) << ','
            << format_double(std::norm(trace.s_facet[i])) << '\n';
    }
}

void OutputBundle::write_profiles(const TraceRecord& trace, const GratingProfile& profile,
                                  const DeviceParams& params,
                                  const std::vector<double>& at_times,
                                  const std::string& name) const {
    std::ofstream out(dir / name);
    out << "t_s,z_m,N_m^-3,n_index,kappa_m^-1\n";
    for (const double want : at_times) {
        const TraceRecord::Snapshot* best = nullptr;
        for (const auto& s : trace.snapshots)
            if (!best || std::abs(s.t - want) < std::abs(best->t - want)) best = &s;
        if (!best) continue;
        for (std::size_t j = 0; j < best->carriers.size(); ++j) {
            const double z = (static_cast<double>(j) + 0.5) * trace.grid.dz;
            out << format_double(best->t) << ',' << format_double(z) << ','
                << format_double(best->carriers[j]) << ','
                << format_double(params.n0_index() +
                                 params.confinement * params.dn_dN * best->carriers[j])
                << ',' << format_double(profile.kappa[j]) << '\n';
        }
    }
}

void OutputBundle::write_spectrum(const Spectrum& spectrum, const std::string& name) const {
    double peak = 0.0;
    for (const double v : spectrum.psd) peak = std::max(peak, v);
    const double scale = (peak > 0.0) ? 1.0 / peak : 1.0;
    std::ofstream out(dir / name);
    out << "lambda_m,psd_rel\n";
    for (std::size_t i = 0; i < spectrum.psd.size(); ++i)
        out << format_double(spectrum.wavelength[i]) << ','
            << format_double(spectrum.psd[i] * scale) << '\n';
}

void OutputBundle::write_holeburning(const HoleBurningReport& report, double dz,
                                     const std::string& name) const {
    std::ofstream out(dir / name);
    out << "z_m,sigma_N_m^-3,n_index_t1,n_index_t2\n";
    for (std::size_t j = 0; j < report.sigma_n.size(); ++j) {
        const double z = (static_cast<double>(j) + 0.5) * dz;
        out << format_double(z) << ',' << format_double(report.sigma_n[j]) << ','
            << format_double(report.index_t1[j]) << ','
            << format_double(report.index_t2[j]) << '\n';
    }
}

void OutputBundle::write_li(const std::vector<LiPoint>& curve, const std::string& name) const {
    std::ofstream out(dir / name);
    out << "I_A,P_W,rel_std,extended\n";
    for (const auto& pt : curve)
        out << format_double(pt.current) << ',' << format_double(pt.power) << ','
            << format_double(pt.rel_std) << ',' << (pt.extended ? 1 : 0) << '\n';
}

void OutputBundle::finish(const nlohmann::json& summary) const {
    {
        std::ofstream out(dir / "summary.json");
        out << summary.dump(2) << "\n";
    }
    std::ofstream marker(dir / ".complete");
}

} // namespace tdtw
