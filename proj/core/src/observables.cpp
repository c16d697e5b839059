#include "tdtw/observables.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <numeric>
#include <string>
#include <thread>

#include <fftw3.h>

#include "tdtw/engine.hpp"
#include "tdtw/errors.hpp"
#include "tdtw/medium.hpp"

namespace tdtw {

using std::numbers::pi;

std::vector<double> photon_density(const LaserState& state) {
    const std::size_t m = state.sections();
    std::vector<double> p(m);
    for (std::size_t j = 0; j < m; ++j)
        p[j] = std::norm(state.r_fwd[j]) + std::norm(state.s_bwd[j]);
    return p;
}

double output_power_from_density(double photon_density_at_facet,
                                 const DeviceParams& params) {
    const double photon_energy =
        constants::h_planck * constants::c_light / params.lambda_bragg;
    const double cross_section =
        params.active_width * params.active_thickness / params.confinement;
    return photon_energy * params.group_velocity() * cross_section *
           photon_density_at_facet;
}

double output_power(std::complex<double> envelope_at_facet, const DeviceParams& params) {
    return output_power_from_density(std::norm(envelope_at_facet), params);
}

namespace {

std::mutex g_fftw_mutex; // FFTW planner is not thread-safe

std::vector<std::complex<double>> dft_forward(std::vector<std::complex<double>> x) {
    const std::size_t n = x.size();
    std::vector<std::complex<double>> out(n);
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(g_fftw_mutex);
        plan = fftw_plan_dft_1d(static_cast<int>(n),
                                reinterpret_cast<fftw_complex*>(x.data()),
                                reinterpret_cast<fftw_complex*>(out.data()),
                                FFTW_FORWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(g_fftw_mutex);
        fftw_destroy_plan(plan);
    }
    return out;
}

std::vector<double> boxcar(const std::vector<double>& v, int half_width) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(v.size());
    std::vector<double> out(v.size());
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const std::ptrdiff_t a = std::max<std::ptrdiff_t>(0, i - half_width);
        const std::ptrdiff_t b = std::min(n - 1, i + half_width);
        double s = 0.0;
        for (std::ptrdiff_t k = a; k <= b; ++k) s += v[static_cast<std::size_t>(k)];
        out[static_cast<std::size_t>(i)] = s / static_cast<double>(b - a + 1);
    }
    return out;
}

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    return v[mid];
}

constexpr double kProminenceCap = 300.0;

} // namespace

Spectrum compute_spectrum(const TraceRecord& trace, double t_start, double t_end,
                          const DeviceParams& params, const SpectrumOptions& opt) {
    if (trace.t.empty() || trace.sample_dt <= 0.0)
        throw SimError("compute_spectrum: empty trace");
    if (!(t_end > t_start)) throw SimError("compute_spectrum: bad window");
    const double t0 = trace.t.front();
    const double tn = trace.t.back();
    if (t_start < t0 - 0.5 * trace.sample_dt || t_end > tn + 0.5 * trace.sample_dt)
        throw SimError("compute_spectrum: window outside trace");

    const auto i0 = static_cast<std::size_t>(
        std::ceil((t_start - t0) / trace.sample_dt - 1e-9));
    const auto i1 = static_cast<std::size_t>(
        std::floor((t_end - t0) / trace.sample_dt + 1e-9));
    const std::size_t n = (i1 >= i0) ? (i1 - i0 + 1) : 0;
    if (n < opt.min_samples) {
        const double needed_span =
            static_cast<double>(opt.min_samples) * trace.sample_dt;
        const double resolvable =
            params.lambda_ref * params.lambda_ref /
            (constants::c_light * std::max(t_end - t_start, trace.sample_dt));
        throw SimError("compute_spectrum: window too short (" + std::to_string(n) +
                       " samples, need " + std::to_string(opt.min_samples) +
                       "); minimum resolvable mode spacing at this window is " +
                       std::to_string(resolvable * 1e9) + " nm; extend the window to >= " +
                       std::to_string(needed_span * 1e9) + " ns");
    }

    // Hann taper, periodic form.
    std::vector<std::complex<double>> x(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double win =
            0.5 - 0.5 * std::cos(2.0 * pi * static_cast<double>(k) / static_cast<double>(n));
        x[k] = trace.r_facet[i0 + k] * win;
    }
    const auto spec_bins = dft_forward(std::move(x));

    Spectrum out;
    out.lambda_ref = params.lambda_ref;
    out.wavelength.resize(n);
    out.psd.resize(n);
    const double fs = 1.0 / trace.sample_dt;
    const double inv_n = 1.0 / static_cast<double>(n);

    // Ascending wavelength = descending FFT frequency: bins n/2, n/2-1, ..,
    // 0, n-1, .., n/2+1. The envelope convention e^{+i 2 pi f t} makes bin
    // frequency the physical offset: lambda = lambda_ref (1 - f lambda_ref/c).
    const std::size_t half = n / 2;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t k = (half >= i) ? (half - i) : (n + half - i);
        const double f = ((k <= half) ? static_cast<double>(k)
                                      : static_cast<double>(k) - static_cast<double>(n)) *
                         fs * inv_n;
        out.wavelength[i] =
            params.lambda_ref * (1.0 - f * params.lambda_ref / constants::c_light);
        out.psd[i] = std::norm(spec_bins[k]) * inv_n;
    }
    out.bin_spacing = (out.wavelength.back() - out.wavelength.front()) /
                      static_cast<double>(n - 1);
    out.median_psd = median_of(out.psd);

    // Peak detection: local maxima of a lightly smoothed PSD above the
    // median + prominence floor, refined on the raw PSD, with non-maximum
    // suppression at min_peak_separation.
    const int hw = std::max(1, opt.smooth_bins / 2);
    const auto smooth = boxcar(out.psd, hw);
    double raw_max = 0.0;
    for (double v : out.psd) raw_max = std::max(raw_max, v);
    // bins this far under the maximum are numerical dust, not side modes
    const double range_floor = raw_max * std::pow(10.0, -opt.dynamic_range_db / 10.0);
    const double floor_level = std::max(
        out.median_psd * std::pow(10.0, opt.prominence_db / 10.0), range_floor);

    struct Candidate {
        std::size_t bin;
        double power;
        double raw_max;
    };
    std::vector<Candidate> cands;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (!(smooth[i] > smooth[i - 1] && smooth[i] >= smooth[i + 1])) continue;
        // smoothing dilutes a narrow line by up to the boxcar width
        if (!(smooth[i] > floor_level / static_cast<double>(2 * hw + 1))) continue;
        // refine to the raw maximum nearby
        std::size_t b = i;
        const std::size_t a0 = (i > static_cast<std::size_t>(2 * hw)) ? i - 2 * hw : 0;
        const std::size_t a1 = std::min(n - 1, i + static_cast<std::size_t>(2 * hw));
        for (std::size_t k = a0; k <= a1; ++k)
            if (out.psd[k] > out.psd[b]) b = k;
        if (!(out.psd[b] > floor_level)) continue;
        double power = 0.0;
        const std::size_t s0 = (b >= 4) ? b - 4 : 0;
        const std::size_t s1 = std::min(n - 1, b + 4);
        for (std::size_t k = s0; k <= s1; ++k) power += out.psd[k];
        cands.push_back({b, power, out.psd[b]});
    }
    std::sort(cands.begin(), cands.end(),
              [](const Candidate& a, const Candidate& b) { return a.power > b.power; });

    const double min_sep = opt.min_peak_separation;
    for (const auto& c : cands) {
        if (out.peaks.size() >= opt.max_peaks) break;
        // sub-bin refinement: parabola through log-psd
        double lam = out.wavelength[c.bin];
        if (c.bin > 0 && c.bin + 1 < n && out.psd[c.bin - 1] > 0.0 &&
            out.psd[c.bin + 1] > 0.0 && out.psd[c.bin] > 0.0) {
            const double ym = std::log(out.psd[c.bin - 1]);
            const double y0 = std::log(out.psd[c.bin]);
            const double yp = std::log(out.psd[c.bin + 1]);
            const double denom = ym - 2.0 * y0 + yp;
            if (denom < 0.0) {
                const double shift = 0.5 * (ym - yp) / denom;
                if (std::abs(shift) <= 1.0) lam += shift * out.bin_spacing;
            }
        }
        bool clear = true;
        for (const auto& p : out.peaks)
            if (std::abs(p.wavelength - lam) < min_sep) {
                clear = false;
                break;
            }
        if (!clear) continue;
        double prom = kProminenceCap;
        if (out.median_psd > 0.0)
            prom = std::min(kProminenceCap, 10.0 * std::log10(c.raw_max / out.median_psd));
        out.peaks.push_back({lam, c.power, prom});
    }
    std::sort(out.peaks.begin(), out.peaks.end(),
              [](const SpectrumPeak& a, const SpectrumPeak& b) { return a.power > b.power; });
    return out;
}

SmsrResult smsr(const Spectrum& spectrum) {
    if (spectrum.peaks.empty()) throw SimError("smsr: no peaks in spectrum");
    if (spectrum.peaks.size() >= 2) {
        return {10.0 * std::log10(spectrum.peaks[0].power / spectrum.peaks[1].power),
                false};
    }
    // Single detected peak: anything else sits below the detection floor, so
    // the ratio is at least prominence - floor.
    return {std::min(kProminenceCap, spectrum.peaks[0].prominence_db - 10.0), true};
}

double HoleBurningReport::facet_sigma_mean(double fraction) const {
    const std::size_t m = sigma_n.size();
    const std::size_t k = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(fraction * static_cast<double>(m))));
    double s = 0.0;
    for (std::size_t j = 0; j < k; ++j) s += sigma_n[j] + sigma_n[m - 1 - j];
    return s / static_cast<double>(2 * k);
}

HoleBurningReport carrier_std(const TraceRecord& trace, double t1, double t2,
                              const DeviceParams& params) {
    if (!(t2 > t1)) throw SimError("carrier_std: bad window");
    std::vector<const TraceRecord::Snapshot*> in_window;
    for (const auto& s : trace.snapshots)
        if (s.t >= t1 - 1e-15 && s.t <= t2 + 1e-15) in_window.push_back(&s);
    if (in_window.size() < 2)
        throw SimError("carrier_std: need >= 2 snapshots in window, have " +
                       std::to_string(in_window.size()));

    const std::size_t m = in_window.front()->carriers.size();
    HoleBurningReport rep;
    rep.t1 = t1;
    rep.t2 = t2;
    rep.snapshots_used = in_window.size();
    rep.sigma_n.assign(m, 0.0);

    const double inv_k = 1.0 / static_cast<double>(in_window.size());
    for (std::size_t j = 0; j < m; ++j) {
        double mean = 0.0;
        for (const auto* s : in_window) mean += s->carriers[j];
        mean *= inv_k;
        double var = 0.0;
        for (const auto* s : in_window) {
            const double d = s->carriers[j] - mean;
            var += d * d;
        }
        rep.sigma_n[j] = std::sqrt(var * inv_k);
    }

    auto nearest = [&](double t) -> const TraceRecord::Snapshot* {
        const TraceRecord::Snapshot* best = in_window.front();
        for (const auto* s : in_window)
            if (std::abs(s->t - t) < std::abs(best->t - t)) best = s;
        return best;
    };
    const auto* s1 = nearest(t1);
    const auto* s2 = nearest(t2);
    rep.index_t1.resize(m);
    rep.index_t2.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        rep.index_t1[j] = refractive_index(s1->carriers[j], params);
        rep.index_t2[j] = refractive_index(s2->carriers[j], params);
    }
    return rep;
}

namespace {

struct TailStats {
    double mean = 0.0;
    double rel_std = 0.0;
};

TailStats tail_stats(const TraceRecord& trace, double fraction) {
    const double t_end = trace.t.back();
    const double t_from = t_end * (1.0 - fraction);
    std::size_t first = 0;
    while (first < trace.t.size() && trace.t[first] < t_from) ++first;
    const std::size_t count = trace.t.size() - first;
    if (count < 16) throw SimError("li_sweep: tail window too short");

    const auto p = trace.photon_out();
    double mean = 0.0;
    for (std::size_t i = first; i < p.size(); ++i) mean += p[i];
    mean /= static_cast<double>(count);

    // variance of 8 block means against the overall mean
    const std::size_t n_blocks = 8;
    const std::size_t per = count / n_blocks;
    double var = 0.0;
    for (std::size_t b = 0; b < n_blocks; ++b) {
        double bm = 0.0;
        for (std::size_t i = 0; i < per; ++i) bm += p[first + b * per + i];
        bm /= static_cast<double>(per);
        var += (bm - mean) * (bm - mean);
    }
    var /= static_cast<double>(n_blocks);
    TailStats st;
    st.mean = mean;
    st.rel_std = (mean > 0.0) ? std::sqrt(var) / mean : 0.0;
    return st;
}

} // namespace

std::vector<LiPoint> li_sweep(const DeviceParams& params, const SweepConfig& sweep) {
    if (sweep.currents.empty()) throw SimError("li_sweep: empty current list");
    for (std::size_t i = 1; i < sweep.currents.size(); ++i)
        if (!(sweep.currents[i] > sweep.currents[i - 1]))
            throw SimError("li_sweep: currents must be strictly increasing");

    const std::size_t n = sweep.currents.size();
    std::vector<LiPoint> curve(n);

    auto run_point = [&](std::size_t idx, int engine_workers) {
        RunConfig cfg = sweep.base;
        cfg.current = sweep.currents[idx];
        cfg.duration = sweep.settle_time;
        cfg.snapshot_times.clear();
        cfg.snapshot_interval = 0.0;
        cfg.workers = engine_workers;

        LiPoint pt;
        pt.current = cfg.current;
        for (int attempt = 0;; ++attempt) {
            const TraceRecord trace = run_transient(params, cfg);
            const TailStats st = tail_stats(trace, sweep.average_fraction);
            pt.power = output_power_from_density(st.mean, params);
            pt.rel_std = st.rel_std;
            if (st.rel_std <= sweep.variance_guard || attempt >= sweep.max_extensions)
                break;
            cfg.duration *= 1.5;
            pt.extended = true;
        }
        curve[idx] = pt;
    };

    // Points are independent runs; fan them out across the worker budget with
    // single-threaded engines (each point's result does not depend on the
    // scheduling).
    const int pool = std::max(1, sweep.base.workers);
    if (pool == 1 || n == 1) {
        for (std::size_t i = 0; i < n; ++i) run_point(i, sweep.base.workers);
        return curve;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> threads;
    for (int w = 0; w < pool; ++w) {
        threads.emplace_back([&] {
            for (;;) {
                const std::size_t idx = next.fetch_add(1);
                if (idx >= n) return;
                try {
                    run_point(idx, 1);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : threads) t.join();
    if (error) std::rethrow_exception(error);
    return curve;
}

ThresholdFit extract_threshold(const std::vector<LiPoint>& curve) {
    const std::size_t n = curve.size();
    if (n < 6) throw SimError("extract_threshold: need >= 6 points");

    auto fit_line = [&](std::size_t a, std::size_t b, double& slope, double& icept,
                        double& sse) {
        const double cnt = static_cast<double>(b - a);
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = a; i < b; ++i) {
            sx += curve[i].current;
            sy += curve[i].power;
            sxx += curve[i].current * curve[i].current;
            sxy += curve[i].current * curve[i].power;
        }
        const double denom = cnt * sxx - sx * sx;
        slope = (cnt * sxy - sx * sy) / denom;
        icept = (sy - slope * sx) / cnt;
        sse = 0.0;
        for (std::size_t i = a; i < b; ++i) {
            const double r = curve[i].power - (icept + slope * curve[i].current);
            sse += r * r;
        }
    };

    double best_sse = 0.0;
    std::size_t best_k = 0;
    double best[4] = {0, 0, 0, 0}; // slope_lo, icept_lo, slope_hi, icept_hi
    for (std::size_t k = 2; k + 2 <= n; ++k) {
        double m1, c1, e1, m2, c2, e2;
        fit_line(0, k, m1, c1, e1);
        fit_line(k, n, m2, c2, e2);
        if (best_k == 0 || e1 + e2 < best_sse) {
            best_sse = e1 + e2;
            best_k = k;
            best[0] = m1;
            best[1] = c1;
            best[2] = m2;
            best[3] = c2;
        }
    }

    double p_max = 0.0;
    for (const auto& pt : curve) p_max = std::max(p_max, std::abs(pt.power));
    const double slope_gap = best[2] - best[0];
    if (!(slope_gap > 0.0) ||
        slope_gap < 1e-6 * std::max(std::abs(best[0]), std::abs(best[2])) ||
        !(p_max > 0.0))
        throw SimError("extract_threshold: no knee detected");

    const double threshold = (best[1] - best[3]) / slope_gap;
    if (!(threshold >= curve.front().current && threshold <= curve.back().current))
        throw SimError("extract_threshold: no knee detected");

    ThresholdFit fit;
    fit.threshold = threshold;
    fit.residual = std::sqrt(best_sse / static_cast<double>(n)) / p_max;
    fit.slope_below = best[0];
    fit.slope_above = best[2];
    fit.knee_index = best_k;
    return fit;
}

} // namespace tdtw
