#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "qjump/errors.hpp"

namespace qjump {

// Interval-distribution models:
//   exponential    g1(dt) = c exp(-lambda dt)                        theta = (c, lambda)
//   damped_sine    g2(dt) = c exp(-lambda dt) [sin(omega dt + phi) + 1]
//                                                                theta = (c, lambda, omega, phi)
//   gaussian_peak  g3(dt) = c exp(-a (dt - t1)^2)                    theta = (c, a, t1)
//   two_state      g_ts(dt) = C g1 g2/(g1-g2) [e^{-g2 x} - e^{-g1 x}] H(x), x = dt - 2 t0
//                                                                theta = (C, gamma1, gamma2, t0)
enum class FitKind { exponential, damped_sine, gaussian_peak, two_state };

inline std::size_t param_count(FitKind kind) {
    switch (kind) {
        case FitKind::exponential: return 2;
        case FitKind::damped_sine: return 4;
        case FitKind::gaussian_peak: return 3;
        case FitKind::two_state: return 4;
    }
    return 0;
}

inline std::vector<std::string> param_names(FitKind kind) {
    switch (kind) {
        case FitKind::exponential: return {"c", "lambda"};
        case FitKind::damped_sine: return {"c", "lambda", "omega", "phi"};
        case FitKind::gaussian_peak: return {"c", "a", "t1"};
        case FitKind::two_state: return {"C", "gamma1", "gamma2", "t0"};
    }
    return {};
}

inline bool params_valid(FitKind kind, std::span<const double> theta) {
    if (theta.size() != param_count(kind)) return false;
    for (double v : theta)
        if (!std::isfinite(v)) return false;
    switch (kind) {
        case FitKind::exponential: return theta[1] > 0.0;
        case FitKind::damped_sine: return theta[1] > 0.0 && theta[2] > 0.0;
        case FitKind::gaussian_peak: return theta[1] > 0.0;
        case FitKind::two_state:
            return theta[1] > 0.0 && theta[2] > 0.0 && theta[3] >= 0.0;
    }
    return false;
}

// Dwell-time density of one phase: gamma_i e^{-gamma_i (t - t0)} H(t - t0).
inline double two_state_component(double t, double gamma_i, double t0) {
    if (gamma_i <= 0.0) throw OutOfRangeError("two_state_component: gamma_i must be > 0");
    double x = t - t0;
    if (x < 0.0) return 0.0;
    return gamma_i * std::exp(-gamma_i * x);
}

inline double model_eval(FitKind kind, std::span<const double> theta, double dt) {
    switch (kind) {
        case FitKind::exponential:
            return theta[0] * std::exp(-theta[1] * dt);
        case FitKind::damped_sine:
            return theta[0] * std::exp(-theta[1] * dt) *
                   (std::sin(theta[2] * dt + theta[3]) + 1.0);
        case FitKind::gaussian_peak: {
            double d = dt - theta[2];
            return theta[0] * std::exp(-theta[1] * d * d);
        }
        case FitKind::two_state: {
            double scale = theta[0], g1 = theta[1], g2 = theta[2], t0 = theta[3];
            double x = dt - 2.0 * t0;
            if (x <= 0.0) return 0.0;
            if (std::abs(g1 - g2) < 1e-9 * g1) {
                double g = 0.5 * (g1 + g2); // analytic g1 -> g2 limit
                return scale * g * g * x * std::exp(-g * x);
            }
            return scale * (g1 * g2 / (g1 - g2)) *
                   (std::exp(-g2 * x) - std::exp(-g1 * x));
        }
    }
    return 0.0;
}

} // namespace qjump
