#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "qjump/errors.hpp"

namespace qjump {

// Observable trace: strictly increasing times, one value per time.
struct TimeSeries {
    std::vector<double> times;
    std::vector<double> values;

    std::size_t size() const { return times.size(); }
    bool empty() const { return times.empty(); }
};

// Causal single-pole low-pass filter with time constant tau; tau = 0 is the
// identity. Exact exponential smoothing for a zero-order-hold input, so it
// also handles non-uniform grids.
inline TimeSeries low_pass(const TimeSeries& series, double tau) {
    if (tau < 0.0) throw OutOfRangeError("low_pass: tau must be >= 0");
    if (tau == 0.0 || series.size() < 2) return series;
    TimeSeries out = series;
    double y = series.values[0];
    for (std::size_t i = 1; i < series.size(); ++i) {
        double dt = series.times[i] - series.times[i - 1];
        double a = -std::expm1(-dt / tau);
        y += a * (series.values[i] - y);
        out.values[i] = y;
    }
    return out;
}

// Resamples onto a uniform grid spanning the original range, values by linear
// interpolation.
inline TimeSeries resample_linear(const TimeSeries& series, double dt_out) {
    if (series.empty()) throw EmptySeries("resample: empty series");
    if (dt_out <= 0.0) throw OutOfRangeError("resample: dt_out must be > 0");
    TimeSeries out;
    double t0 = series.times.front();
    double t1 = series.times.back();
    auto n = static_cast<std::size_t>(std::floor((t1 - t0) / dt_out * (1.0 + 1e-12))) + 1;
    out.times.reserve(n);
    out.values.reserve(n);
    std::size_t j = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double t = t0 + static_cast<double>(i) * dt_out;
        if (t > t1) t = t1;
        while (j + 1 < series.size() && series.times[j + 1] <= t) ++j;
        double v;
        if (j + 1 >= series.size()) {
            v = series.values.back();
        } else {
            // times[j] <= t < times[j+1]; frac = 0 reproduces samples exactly
            double ta = series.times[j], tb = series.times[j + 1];
            double frac = std::clamp((t - ta) / (tb - ta), 0.0, 1.0);
            v = series.values[j] + frac * (series.values[j + 1] - series.values[j]);
        }
        out.times.push_back(t);
        out.values.push_back(v);
    }
    return out;
}

// Threshold mu with transition band (mu - alpha, mu + alpha) and the filter
// constant applied before detection. Upward means low -> high.
struct JumpConfig {
    double mu = 0.5;
    double alpha = 0.05;
    double filter_tau = 0.0;

    void validate() const {
        if (alpha <= 0.0) throw OutOfRangeError("jump config: alpha must be > 0");
        if (filter_tau < 0.0) throw OutOfRangeError("jump config: filter_tau must be >= 0");
    }
};

struct JumpEvents {
    std::vector<double> up_times;
    std::vector<double> down_times;
};

// Two-cluster split of the value distribution (exact 1-D 2-means): threshold
// midway between cluster means, band width a tenth of their separation.
struct AutoThreshold {
    double mu = 0.0;
    double alpha = 0.0;
    double low_mean = 0.0;
    double high_mean = 0.0;
};

inline AutoThreshold auto_threshold(std::vector<double> values) {
    if (values.size() < 2) throw EmptySeries("auto_threshold: need at least 2 values");
    std::sort(values.begin(), values.end());
    std::vector<double> prefix(values.size() + 1, 0.0);
    for (std::size_t i = 0; i < values.size(); ++i) prefix[i + 1] = prefix[i] + values[i];
    std::vector<double> prefix2(values.size() + 1, 0.0);
    for (std::size_t i = 0; i < values.size(); ++i)
        prefix2[i + 1] = prefix2[i] + values[i] * values[i];

    auto sse = [&](std::size_t lo, std::size_t hi) { // [lo, hi)
        double cnt = static_cast<double>(hi - lo);
        double s = prefix[hi] - prefix[lo];
        double s2 = prefix2[hi] - prefix2[lo];
        return s2 - s * s / cnt;
    };

    std::size_t best_k = 1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < values.size(); ++k) {
        double total = sse(0, k) + sse(k, values.size());
        if (total < best) {
            best = total;
            best_k = k;
        }
    }
    AutoThreshold out;
    out.low_mean = prefix[best_k] / static_cast<double>(best_k);
    out.high_mean = (prefix.back() - prefix[best_k]) /
                    static_cast<double>(values.size() - best_k);
    out.mu = 0.5 * (out.low_mean + out.high_mean);
    out.alpha = 0.1 * (out.high_mean - out.low_mean);
    return out;
}

// Hysteresis state machine: state LOW below mu - alpha, HIGH above mu + alpha.
// A LOW -> HIGH transit records an upward event at the linearly interpolated
// first mu-crossing inside the transit; symmetric for downward. Events
// alternate by construction. The filter is applied by the caller (or use
// detect_jumps_filtered).
inline JumpEvents detect_jumps(const TimeSeries& series, const JumpConfig& cfg) {
    cfg.validate();
    if (series.size() < 2) throw EmptySeries("detect_jumps: need at least 2 samples");

    const double lo_edge = cfg.mu - cfg.alpha;
    const double hi_edge = cfg.mu + cfg.alpha;

    JumpEvents events;
    int state = 0; // 0 unknown, -1 low, +1 high
    std::size_t transit_start = 0;

    auto crossing_time = [&](std::size_t from, std::size_t to, bool upward) {
        // First linear mu-crossing between samples [from, to].
        for (std::size_t i = from; i < to; ++i) {
            double a = series.values[i], b = series.values[i + 1];
            bool crosses = upward ? (a <= cfg.mu && b > cfg.mu) : (a >= cfg.mu && b < cfg.mu);
            if (crosses) {
                double frac = (cfg.mu - a) / (b - a);
                return series.times[i] + frac * (series.times[i + 1] - series.times[i]);
            }
        }
        return series.times[to]; // degenerate; mu touched exactly at the edge sample
    };

    for (std::size_t i = 0; i < series.size(); ++i) {
        double v = series.values[i];
        int here = v < lo_edge ? -1 : (v > hi_edge ? +1 : 0);
        if (here == 0) continue;
        if (state == 0) {
            state = here;
        } else if (here != state) {
            bool upward = here > 0;
            double t = crossing_time(transit_start, i, upward);
            (upward ? events.up_times : events.down_times).push_back(t);
            state = here;
        }
        transit_start = i;
    }
    return events;
}

inline JumpEvents detect_jumps_filtered(const TimeSeries& series, const JumpConfig& cfg) {
    return detect_jumps(low_pass(series, cfg.filter_tau), cfg);
}

// delta_t[i] = up_times[i+1] - up_times[i]
inline std::vector<double> upward_intervals(const JumpEvents& events) {
    std::vector<double> out;
    if (events.up_times.size() < 2) return out;
    out.reserve(events.up_times.size() - 1);
    for (std::size_t i = 0; i + 1 < events.up_times.size(); ++i)
        out.push_back(events.up_times[i + 1] - events.up_times[i]);
    return out;
}

inline std::vector<double> downward_intervals(const JumpEvents& events) {
    std::vector<double> out;
    if (events.down_times.size() < 2) return out;
    out.reserve(events.down_times.size() - 1);
    for (std::size_t i = 0; i + 1 < events.down_times.size(); ++i)
        out.push_back(events.down_times[i + 1] - events.down_times[i]);
    return out;
}

// Interval counts in bins [k w, (k+1) w) starting at zero.
struct IntervalHistogram {
    double bin_width = 0.0;
    std::vector<std::uint64_t> counts;
    std::uint64_t total_events = 0;

    double bin_left(std::size_t i) const { return static_cast<double>(i) * bin_width; }
    double bin_center(std::size_t i) const {
        return (static_cast<double>(i) + 0.5) * bin_width;
    }
    std::uint64_t total() const {
        std::uint64_t s = 0;
        for (auto c : counts) s += c;
        return s;
    }
};

inline IntervalHistogram build_histogram(const std::vector<double>& deltas, double bin_width,
                                         double min_span = 0.0) {
    if (bin_width <= 0.0) throw OutOfRangeError("histogram: bin_width must be > 0");
    IntervalHistogram h;
    h.bin_width = bin_width;
    double span = min_span;
    for (double d : deltas) span = std::max(span, d);
    auto n_bins = static_cast<std::size_t>(std::ceil(span / bin_width * (1.0 + 1e-12)));
    if (span > 0.0 && n_bins == 0) n_bins = 1;
    h.counts.assign(n_bins, 0);
    for (double d : deltas) {
        auto i = static_cast<std::size_t>(d / bin_width);
        if (i >= h.counts.size()) i = h.counts.size() - 1; // d == span edge
        ++h.counts[i];
        ++h.total_events;
    }
    return h;
}

// Pooled over an ensemble, trajectory order preserved.
inline IntervalHistogram build_histogram(const std::vector<std::vector<double>>& pool,
                                         double bin_width, double min_span = 0.0) {
    std::vector<double> all;
    for (const auto& v : pool) all.insert(all.end(), v.begin(), v.end());
    return build_histogram(all, bin_width, min_span);
}

// Contrast C = (h2 - h_min) / h2 between the second subharmonic peak and the
// valley before it. Peak windows are fixed to bin centers in [T/2, 3T/2] and
// [3T/2, 5T/2]; h_min is the minimum strictly between the two peak bins.
// Ties go to the earlier bin; C is clamped at 0 so 0 <= C <= 1 always.
inline double contrast(const IntervalHistogram& h, double T) {
    if (T <= 0.0) throw OutOfRangeError("contrast: T must be > 0");
    if (h.counts.empty() || h.bin_left(h.counts.size()) < 2.5 * T)
        throw NoSecondPeak("contrast: histogram does not cover [0, 2.5 T]");

    auto argmax_in = [&](double lo, double hi) {
        std::size_t best = h.counts.size();
        std::uint64_t best_count = 0;
        for (std::size_t i = 0; i < h.counts.size(); ++i) {
            double c = h.bin_center(i);
            if (c < lo || c > hi) continue;
            if (best == h.counts.size() || h.counts[i] > best_count) {
                best = i;
                best_count = h.counts[i];
            }
        }
        return best;
    };

    std::size_t peak1 = argmax_in(0.5 * T, 1.5 * T);
    std::size_t peak2 = argmax_in(1.5 * T, 2.5 * T);
    if (peak1 == h.counts.size() || peak2 == h.counts.size() || h.counts[peak2] == 0)
        throw NoSecondPeak("contrast: no counts in the second-peak window");

    double h2 = static_cast<double>(h.counts[peak2]);
    double h_min = h2;
    for (std::size_t i = peak1 + 1; i < peak2; ++i)
        h_min = std::min(h_min, static_cast<double>(h.counts[i]));
    return std::max(0.0, (h2 - h_min) / h2);
}

// Scans a model over the detuning grid and returns the detuning whose pooled
// upward intervals maximize the count inside [1.85 T, 2.15 T]. The runner maps
// a detuning to pooled intervals. Ties prefer smaller |Delta|.
struct DetuningScanResult {
    double best_delta = 0.0;
    std::vector<std::pair<double, std::uint64_t>> window_counts;
};

inline std::uint64_t count_in_window(const std::vector<double>& deltas, double lo, double hi) {
    std::uint64_t c = 0;
    for (double d : deltas)
        if (d >= lo && d <= hi) ++c;
    return c;
}

inline DetuningScanResult optimum_detuning_scan(
    const std::function<std::vector<double>(double)>& runner,
    const std::vector<double>& delta_grid, double T) {
    if (delta_grid.empty()) throw OutOfRangeError("detuning scan: empty grid");
    DetuningScanResult res;
    res.window_counts.reserve(delta_grid.size());
    bool have_best = false;
    std::uint64_t best_count = 0;
    for (double delta : delta_grid) {
        std::vector<double> deltas = runner(delta);
        std::uint64_t c = count_in_window(deltas, 1.85 * T, 2.15 * T);
        res.window_counts.emplace_back(delta, c);
        bool better = c > best_count ||
                      (c == best_count && have_best &&
                       std::abs(delta) < std::abs(res.best_delta));
        if (!have_best || better) {
            have_best = true;
            best_count = c;
            res.best_delta = delta;
        }
    }
    if (best_count == 0) throw AllZeroCounts("detuning scan: no intervals in window anywhere");
    return res;
}

} // namespace qjump
