#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "qjump/errors.hpp"
#include "qjump/fit_models.hpp"
#include "qjump/jump_analysis.hpp"
#include "qjump/nelder_mead.hpp"
#include "qjump/rng.hpp"

namespace qjump {

struct FitResult {
    FitKind kind = FitKind::exponential;
    std::vector<double> theta;
    double residual_ss = 0.0;
    bool converged = false;
    int iterations = 0;
};

namespace detail {

struct BinData {
    std::vector<double> x; // bin centers
    std::vector<double> y; // counts
    double x_span = 0.0;
    double y_max = 0.0;
    double x_peak = 0.0;
    std::size_t nonzero = 0;
};

inline BinData bin_data(const IntervalHistogram& h) {
    BinData d;
    d.x.reserve(h.counts.size());
    d.y.reserve(h.counts.size());
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        d.x.push_back(h.bin_center(i));
        double c = static_cast<double>(h.counts[i]);
        d.y.push_back(c);
        if (c > 0.0) ++d.nonzero;
        if (c > d.y_max) {
            d.y_max = c;
            d.x_peak = d.x.back();
        }
    }
    d.x_span = h.counts.empty() ? 0.0 : h.bin_left(h.counts.size());
    return d;
}

// Tail decay rate from the peak bin to the last bin holding >= 5% of the peak.
inline double tail_rate(const BinData& d) {
    double fallback = d.x_span > 0.0 ? 2.0 / d.x_span : 1.0;
    std::size_t peak = 0, last = 0;
    for (std::size_t i = 0; i < d.x.size(); ++i) {
        if (d.y[i] == d.y_max && d.x[i] == d.x_peak) peak = i;
        if (d.y[i] >= 0.05 * d.y_max && d.y[i] > 0.0) last = i;
    }
    if (last <= peak || d.y[last] <= 0.0 || d.y_max <= 0.0) return fallback;
    double rate = std::log(d.y_max / d.y[last]) / (d.x[last] - d.x[peak]);
    return rate > 0.0 && std::isfinite(rate) ? rate : fallback;
}

// Median spacing of prominent local maxima; 0 when fewer than two exist.
inline double peak_spacing(const BinData& d) {
    std::vector<double> peaks;
    for (std::size_t i = 1; i + 1 < d.y.size(); ++i)
        if (d.y[i] >= 0.2 * d.y_max && d.y[i] > d.y[i - 1] && d.y[i] >= d.y[i + 1])
            peaks.push_back(d.x[i]);
    if (peaks.size() < 2) return 0.0;
    std::vector<double> gaps;
    for (std::size_t i = 0; i + 1 < peaks.size(); ++i) gaps.push_back(peaks[i + 1] - peaks[i]);
    std::sort(gaps.begin(), gaps.end());
    return gaps[gaps.size() / 2];
}

inline std::vector<double> heuristic_start(FitKind kind, const BinData& d) {
    double lam = tail_rate(d);
    switch (kind) {
        case FitKind::exponential:
            return {std::max(d.y_max, 1.0), lam};
        case FitKind::damped_sine: {
            double spacing = peak_spacing(d);
            double omega = spacing > 0.0 ? 2.0 * std::numbers::pi / spacing
                                         : (d.x_peak > 0.0 ? 2.0 * std::numbers::pi / d.x_peak
                                                           : 1.0);
            return {std::max(0.5 * d.y_max, 0.5), lam, omega, 0.5 * std::numbers::pi};
        }
        case FitKind::gaussian_peak: {
            // width from the half-maximum extent around the peak
            double half = 0.5 * d.y_max;
            double lo = d.x_peak, hi = d.x_peak;
            for (std::size_t i = 0; i < d.x.size(); ++i) {
                if (d.y[i] >= half) {
                    lo = std::min(lo, d.x[i]);
                    hi = std::max(hi, d.x[i]);
                }
            }
            double hwhm = std::max(0.5 * (hi - lo), 0.25 * (d.x.size() > 1 ? d.x[1] - d.x[0] : 1.0));
            return {std::max(d.y_max, 1.0), std::numbers::ln2 / (hwhm * hwhm), d.x_peak};
        }
        case FitKind::two_state: {
            double first_nonzero = 0.0;
            for (std::size_t i = 0; i < d.y.size(); ++i)
                if (d.y[i] > 0.0) {
                    first_nonzero = d.x[i] - 0.5 * (d.x.size() > 1 ? d.x[1] - d.x[0] : 0.0);
                    break;
                }
            double t0 = std::max(0.0, 0.5 * first_nonzero);
            double g2 = lam;
            double g1 = 3.0 * g2;
            double x_star = std::log(g1 / g2) / (g1 - g2);
            double peak_val = (g1 * g2 / (g1 - g2)) *
                              (std::exp(-g2 * x_star) - std::exp(-g1 * x_star));
            double scale = peak_val > 0.0 ? d.y_max / peak_val : d.y_max;
            return {std::max(scale, 1.0), g1, g2, t0};
        }
    }
    return {};
}

// Positive parameters are optimized in log space; phases, locations and
// latencies stay raw (the latency gets a nonnegativity wall).
inline std::vector<bool> log_mask(FitKind kind) {
    switch (kind) {
        case FitKind::exponential: return {true, true};
        case FitKind::damped_sine: return {true, true, true, false};
        case FitKind::gaussian_peak: return {true, true, false};
        case FitKind::two_state: return {true, true, true, false};
    }
    return {};
}

inline std::vector<double> to_opt_space(const std::vector<double>& theta,
                                        const std::vector<bool>& mask) {
    std::vector<double> z = theta;
    for (std::size_t i = 0; i < z.size(); ++i)
        if (mask[i]) z[i] = std::log(std::max(z[i], 1e-300));
    return z;
}

inline std::vector<double> from_opt_space(const std::vector<double>& z,
                                          const std::vector<bool>& mask) {
    std::vector<double> theta = z;
    for (std::size_t i = 0; i < theta.size(); ++i)
        if (mask[i]) theta[i] = std::exp(theta[i]);
    return theta;
}

} // namespace detail

// Least-squares fit of the model to histogram counts at bin centers, by
// multi-start simplex descent. Start 0 is the data-driven heuristic; further
// starts jitter it deterministically from `jitter_seed`, so a larger `starts`
// only ever extends the searched set.
inline FitResult fit(FitKind kind, const IntervalHistogram& h, int starts = 8,
                     std::uint64_t jitter_seed = 0, bool poisson_weighted = false) {
    detail::BinData data = detail::bin_data(h);
    const std::size_t dim = param_count(kind);
    if (data.nonzero < dim + 1)
        throw InsufficientData("fit: need more nonzero bins than parameters");
    if (starts < 1) starts = 1;

    const auto mask = detail::log_mask(kind);
    const bool is_two_state = kind == FitKind::two_state;
    // binned data cannot identify frequencies past the bin Nyquist band, and
    // aliases of the true frequency fit the sampled values exactly
    const double omega_max = data.x.size() > 1
                                 ? std::numbers::pi / (data.x[1] - data.x[0])
                                 : std::numeric_limits<double>::infinity();

    auto objective = [&](const std::vector<double>& z) {
        std::vector<double> theta = detail::from_opt_space(z, mask);
        if (is_two_state && theta[3] < 0.0) return 1e300;
        if (kind == FitKind::damped_sine && theta[2] > omega_max) return 1e300;
        if (!params_valid(kind, theta)) return 1e300;
        double ss = 0.0;
        for (std::size_t i = 0; i < data.x.size(); ++i) {
            double r = data.y[i] - model_eval(kind, theta, data.x[i]);
            double w = poisson_weighted ? 1.0 / std::max(data.y[i], 1.0) : 1.0;
            ss += w * r * r;
        }
        return std::isfinite(ss) ? ss : 1e300;
    };

    const std::vector<double> base = detail::heuristic_start(kind, data);
    RngStream jitter(jitter_seed, 0x7f1);

    // the frequency basin is narrow (width ~ 2 pi / span), so jitter alone is
    // unreliable; later starts walk a fixed log grid across the whole band
    std::vector<double> omega_grid;
    if (kind == FitKind::damped_sine && data.x.size() > 1 && data.x_span > 0.0) {
        double lo = 2.0 * std::numbers::pi / data.x_span;
        for (double w = lo; w <= omega_max; w *= 1.35) omega_grid.push_back(w);
    }

    FitResult best;
    best.kind = kind;
    best.residual_ss = std::numeric_limits<double>::infinity();

    for (int s = 0; s < starts; ++s) {
        std::vector<double> theta0 = base;
        if (s > 0) {
            for (std::size_t i = 0; i < theta0.size(); ++i) {
                if (mask[i]) {
                    theta0[i] *= std::exp(0.8 * jitter.normal());
                } else {
                    double scale = std::max(std::abs(theta0[i]), 0.05 * data.x_span);
                    theta0[i] += 0.4 * scale * jitter.normal();
                    if (is_two_state && i == 3) theta0[i] = std::abs(theta0[i]);
                }
            }
            if (!omega_grid.empty())
                theta0[2] = omega_grid[static_cast<std::size_t>(s - 1) % omega_grid.size()];
        }
        std::vector<double> z0 = detail::to_opt_space(theta0, mask);
        std::vector<double> step(dim);
        for (std::size_t i = 0; i < dim; ++i)
            step[i] = mask[i] ? 0.5 : std::max(0.25 * std::abs(z0[i]), 0.02 * data.x_span);

        NelderMeadOptions opts;
        NelderMeadResult r = nelder_mead(objective, z0, step, opts);
        int iters = r.iterations;
        // restart twice from the optimum with a tighter simplex
        for (int restart = 0; restart < 2; ++restart) {
            std::vector<double> small_step(dim);
            for (std::size_t i = 0; i < dim; ++i) small_step[i] = 0.05 * (step[i] + 1e-6);
            NelderMeadResult r2 = nelder_mead(objective, r.x, small_step, opts);
            iters += r2.iterations;
            if (r2.fval < r.fval) r = r2;
        }

        if (r.fval < best.residual_ss) {
            best.theta = detail::from_opt_space(r.x, mask);
            best.residual_ss = r.fval;
            best.converged = r.converged;
            best.iterations = iters;
        }
    }

    // canonical form: two-state rates descending, phase wrapped to [0, 2 pi)
    if (is_two_state && best.theta[1] < best.theta[2]) std::swap(best.theta[1], best.theta[2]);
    if (kind == FitKind::damped_sine) {
        double two_pi = 2.0 * std::numbers::pi;
        best.theta[3] = std::fmod(best.theta[3], two_pi);
        if (best.theta[3] < 0.0) best.theta[3] += two_pi;
    }
    return best;
}

} // namespace qjump
