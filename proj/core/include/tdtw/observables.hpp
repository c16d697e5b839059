#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "tdtw/device.hpp"
#include "tdtw/run_config.hpp"
#include "tdtw/state.hpp"
#include "tdtw/trace.hpp"

namespace tdtw {

// P_j = |R_j|^2 + |S_j|^2.
std::vector<double> photon_density(const LaserState& state);

// Facet photon density to emitted optical power:
// P_out = (h c / lambda_B) * c_g * (w d / Gamma) * |R(L)|^2.
double output_power(std::complex<double> envelope_at_facet, const DeviceParams& params);
double output_power_from_density(double photon_density_at_facet,
                                 const DeviceParams& params);

struct SpectrumPeak {
    double wavelength = 0.0;     // m
    double power = 0.0;          // relative units (mainlobe sum)
    double prominence_db = 0.0;  // raw peak bin over median PSD, capped at 300
};

// Discrete PSD of the complex facet envelope over one window, Hann-tapered,
// wavelength axis ascending around lambda_ref. Sum of psd equals the
// windowed time-domain energy (Parseval).
struct Spectrum {
    std::vector<double> wavelength;
    std::vector<double> psd;
    std::vector<SpectrumPeak> peaks; // sorted by power, descending
    double lambda_ref = 0.0;
    double median_psd = 0.0;
    double bin_spacing = 0.0; // m
};

struct SpectrumOptions {
    double prominence_db = 10.0;        // detection floor above the median PSD
    double min_peak_separation = 0.25e-9; // m; merges RO sidebands into the carrier
    double dynamic_range_db = 100.0;    // ignore bins this far below the maximum
    int smooth_bins = 9;                // detection smoothing (raw PSD is reported)
    std::size_t min_samples = 16384;
    std::size_t max_peaks = 16;
};

Spectrum compute_spectrum(const TraceRecord& trace, double t_start, double t_end,
                          const DeviceParams& params,
                          const SpectrumOptions& opt = SpectrumOptions{});

struct SmsrResult {
    double db = 0.0;
    bool floor_limited = false; // single detected peak: db is a lower bound
};

// 10 log10(P_main / P_second); when no second peak clears the detection
// floor, returns the floor-limited bound with floor_limited set.
SmsrResult smsr(const Spectrum& spectrum);

// Longitudinal carrier-density standard deviation over a time window plus
// refractive-index profiles at the window edges.
struct HoleBurningReport {
    std::vector<double> sigma_n;   // per section, m^-3
    std::vector<double> index_t1;  // refractive index profile near t1
    std::vector<double> index_t2;
    double t1 = 0.0, t2 = 0.0;
    std::size_t snapshots_used = 0;

    // Mean sigma over the outer `fraction` of sections at both facets.
    double facet_sigma_mean(double fraction = 0.1) const;
};

HoleBurningReport carrier_std(const TraceRecord& trace, double t1, double t2,
                              const DeviceParams& params);

struct LiPoint {
    double current = 0.0;  // A
    double power = 0.0;    // W, time-averaged over the tail window
    double rel_std = 0.0;  // relative std of tail block means
    bool extended = false;
};

struct SweepConfig {
    RunConfig base;                 // current is overridden per point
    std::vector<double> currents;   // A
    double settle_time = 8e-9;      // s per point
    double average_fraction = 0.2;  // tail fraction averaged
    double variance_guard = 0.05;   // extend when block-mean rel std exceeds this
    int max_extensions = 2;
};

// One transient per current; steady-state power from the final
// average_fraction of each run, with the relaxation-oscillation guard.
std::vector<LiPoint> li_sweep(const DeviceParams& params, const SweepConfig& sweep);

struct ThresholdFit {
    double threshold = 0.0;    // A
    double residual = 0.0;     // rms residual / max power
    double slope_below = 0.0;  // W/A
    double slope_above = 0.0;
    std::size_t knee_index = 0;
};

// Two-segment piecewise-linear fit; threshold is the intersection abscissa.
// Throws SimError("no knee detected") on degenerate data.
ThresholdFit extract_threshold(const std::vector<LiPoint>& curve);

} // namespace tdtw
