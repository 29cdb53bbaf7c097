#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "qjump/errors.hpp"
#include "qjump/rng.hpp"

namespace qjump {

// Uniformly sampled stochastic signal, evaluated between samples by linear
// interpolation. Evaluation outside [t0, t_end] (beyond a small fp slop) is
// an error.
struct NoiseSignal {
    double t0 = 0.0;
    double sample_dt = 0.0;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }

    double t_end() const {
        return t0 + sample_dt * static_cast<double>(values.size() - 1);
    }

    double sample_time(std::size_t i) const {
        return t0 + sample_dt * static_cast<double>(i);
    }

    double at(double t) const {
        const double slop = 1e-6 * sample_dt;
        if (t < t0 - slop || t > t_end() + slop)
            throw EmptySeries("noise signal evaluated outside its span");
        double u = (t - t0) / sample_dt;
        if (u <= 0.0) return values.front();
        auto i = static_cast<std::size_t>(u);
        if (i >= values.size() - 1) return values.back();
        double frac = u - static_cast<double>(i);
        if (frac == 0.0) return values[i];
        return values[i] + frac * (values[i + 1] - values[i]);
    }
};

// Interpolated Gaussian white-noise detuning signal. The default spacing is
// one sample per 10/gamma of simulated time; pass a different spacing for
// the literal-total reading (see NoiseMode in config.hpp).
inline NoiseSignal generate_white_noise(double duration, double sigma,
                                        std::uint64_t seed,
                                        double sample_spacing = 10.0) {
    if (duration <= 0.0) throw OutOfRangeError("white noise: duration must be > 0");
    if (sigma < 0.0) throw OutOfRangeError("white noise: sigma must be >= 0");
    if (sample_spacing <= 0.0) throw OutOfRangeError("white noise: spacing must be > 0");

    NoiseSignal sig;
    sig.t0 = 0.0;
    sig.sample_dt = sample_spacing;
    auto n = static_cast<std::size_t>(std::ceil(duration / sample_spacing)) + 1;
    sig.values.resize(n);
    RngStream rng(seed, 0);
    for (auto& v : sig.values) v = sigma == 0.0 ? 0.0 : sigma * rng.normal();
    return sig;
}

struct OUParams {
    double kappa = 0.1; // relaxation rate [gamma]
    double D = 1.0;     // noise strength; stationary variance gamma^2 D / (2 kappa)
    double gamma = 1.0; // rate unit
};

// Exact one-step update of d(x) = -kappa x dt + gamma sqrt(D) dB_t.
// Unbiased for any dt; reduces to Euler-Maruyama to O(dt^2) and to the
// Wiener limit x + gamma sqrt(D dt) xi when kappa = 0.
inline double ou_step(double x, double dt, const OUParams& p, double xi) {
    double decay = std::exp(-p.kappa * dt);
    // (1 - e^{-2 kappa dt}) / (2 kappa), evaluated stably; -> dt as kappa -> 0.
    double var_factor =
        p.kappa > 0.0 ? -std::expm1(-2.0 * p.kappa * dt) / (2.0 * p.kappa) : dt;
    return x * decay + p.gamma * std::sqrt(p.D * var_factor) * xi;
}

// First-order Euler-Maruyama update, kept for cross-checking the exact form.
inline double ou_step_euler_maruyama(double x, double dt, const OUParams& p, double xi) {
    return x - p.kappa * x * dt + p.gamma * std::sqrt(p.D * dt) * xi;
}

// OU path sampled on a uniform grid, starting from x0 at t=0.
inline NoiseSignal generate_ou_signal(double duration, double dt, const OUParams& p,
                                      std::uint64_t seed, double x0 = 0.0) {
    if (duration <= 0.0 || dt <= 0.0)
        throw OutOfRangeError("ou signal: duration and dt must be > 0");
    NoiseSignal sig;
    sig.t0 = 0.0;
    sig.sample_dt = dt;
    auto n = static_cast<std::size_t>(std::llround(duration / dt)) + 1;
    sig.values.resize(n);
    RngStream rng(seed, 0);
    double x = x0;
    sig.values[0] = x;
    for (std::size_t i = 1; i < n; ++i) {
        x = ou_step(x, dt, p, rng.normal());
        sig.values[i] = x;
    }
    return sig;
}

} // namespace qjump
