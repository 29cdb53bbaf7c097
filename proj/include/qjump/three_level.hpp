#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <utility>
#include <vector>

#include "qjump/ensemble.hpp"
#include "qjump/errors.hpp"
#include "qjump/mat3.hpp"
#include "qjump/noise.hpp"
#include "qjump/rk4.hpp"
#include "qjump/trajectory.hpp"

namespace qjump {

// Mean-field Lindblad model of the three-level atom (g, r, s) with dual-tone
// drive on the r-s transition and stochastic detuning noise. All rates are in
// units of gamma, times in 1/gamma.
struct ThreeLevelParams {
    double gamma_r = 1.0;
    double gamma_s = 1.0;
    double Omega = 1.0;       // probe Rabi frequency (g-r)
    double Delta = -4.15;     // bare detuning
    double V1 = -10.0;        // mean-field shifts of Delta_eff1 ...
    double V2 = -5.0;
    double V3 = -30.0;        // ... and of Delta_eff2
    double V4 = -15.0;
    double Omega_MW1 = 3.0;   // resonant tone amplitude
    double Omega_MW2 = 0.949; // detuned tone amplitude
    double delta_f = 0.01;    // tone frequency difference; period T = 1/delta_f
    double noise_sigma = 0.2; // white-noise std dev on Delta
    double dt = 1e-3;         // integrator step
    double t_total = 10000.0; // trajectory duration
    double noise_sample_spacing = 10.0;

    void validate() const {
        if (gamma_r <= 0.0 || gamma_s <= 0.0)
            throw OutOfRangeError("three-level: gamma_r and gamma_s must be > 0");
        if (dt <= 0.0) throw OutOfRangeError("three-level: dt must be > 0");
        if (t_total <= 0.0) throw OutOfRangeError("three-level: t_total must be > 0");
        if (delta_f < 0.0) throw OutOfRangeError("three-level: delta_f must be >= 0");
        if (noise_sigma < 0.0) throw OutOfRangeError("three-level: noise_sigma must be >= 0");
        if (noise_sample_spacing <= 0.0)
            throw OutOfRangeError("three-level: noise_sample_spacing must be > 0");
    }

    // beta = 20 log10(Omega_MW2 / Omega_MW1), defined when both amplitudes > 0.
    double beta_dB() const {
        return 20.0 * std::log10(Omega_MW2 / Omega_MW1);
    }
};

inline Mat3c ground_state_density() { return Mat3c::projector(0); }

// Dual-tone Rabi amplitude Omega_MW1 + Omega_MW2 exp(-i 2 pi delta_f t).
inline cxd dual_tone_rabi(double t, const ThreeLevelParams& p) {
    double phase = -2.0 * std::numbers::pi * p.delta_f * t;
    return p.Omega_MW1 + p.Omega_MW2 * cxd(std::cos(phase), std::sin(phase));
}

// Mean-field effective detunings; the noise w shifts the bare detuning in both.
inline std::pair<double, double> effective_detunings(const Mat3c& rho,
                                                     const ThreeLevelParams& p,
                                                     double w) {
    double rho_rr = rho(1, 1).real();
    double rho_ss = rho(2, 2).real();
    double base = p.Delta + w;
    return {base - p.V1 * rho_rr - p.V2 * rho_ss,
            base - p.V3 * rho_rr - p.V4 * rho_ss};
}

// d(rho)/dt = -i [H(t), rho] + sum_i (L_i rho L_i^+ - 1/2 {L_i^+ L_i, rho})
// with L1 = sqrt(gamma_r)|g><r|, L2 = sqrt(gamma_s)|g><s|.
//
// The output is Hermitian by construction (upper triangle computed, lower
// mirrored), and the dissipator moves each decayed population with one shared
// product so its trace contribution cancels exactly in floating point.
inline Mat3c master_rhs(double t, const Mat3c& rho, const ThreeLevelParams& p, double w) {
    auto [deff1, deff2] = effective_detunings(rho, p, w);
    const double a = 0.5 * p.Omega;      // H(0,1)
    const cxd b = 0.5 * dual_tone_rabi(t, p); // H(1,2)
    const double d1 = -deff1;            // H(1,1)
    const double d2 = -deff2;            // H(2,2)

    // C = H rho with H = [[0, a, 0], [conj(a), d1, b], [0, conj(b), d2]].
    cxd c00 = a * rho(1, 0);
    cxd c01 = a * rho(1, 1);
    cxd c02 = a * rho(1, 2);
    cxd c10 = a * rho(0, 0) + d1 * rho(1, 0) + b * rho(2, 0);
    cxd c11 = a * rho(0, 1) + d1 * rho(1, 1) + b * rho(2, 1);
    cxd c12 = a * rho(0, 2) + d1 * rho(1, 2) + b * rho(2, 2);
    cxd c20 = std::conj(b) * rho(1, 0) + d2 * rho(2, 0);
    cxd c21 = std::conj(b) * rho(1, 1) + d2 * rho(2, 1);
    cxd c22 = std::conj(b) * rho(1, 2) + d2 * rho(2, 2);

    // -i (C - C^+): entry (j,k) = -i (c_jk - conj(c_kj)).
    auto ham = [](cxd cjk, cxd ckj) {
        return cxd(cjk.imag() + ckj.imag(), ckj.real() - cjk.real());
    };

    const double gr = p.gamma_r, gs = p.gamma_s;
    double pop_r = rho(1, 1).real();
    double pop_s = rho(2, 2).real();
    double decay_r = gr * pop_r;
    double decay_s = gs * pop_s;

    Mat3c out;
    out(0, 0) = ham(c00, c00).real() + decay_r + decay_s;
    out(1, 1) = ham(c11, c11).real() - decay_r;
    out(2, 2) = ham(c22, c22).real() - decay_s;
    out(0, 1) = ham(c01, c10) - (0.5 * gr) * rho(0, 1);
    out(0, 2) = ham(c02, c20) - (0.5 * gs) * rho(0, 2);
    out(1, 2) = ham(c12, c21) - (0.5 * (gr + gs)) * rho(1, 2);
    out(1, 0) = std::conj(out(0, 1));
    out(2, 0) = std::conj(out(0, 2));
    out(2, 1) = std::conj(out(1, 2));
    return out;
}

inline double rydberg_population(const Mat3c& rho) {
    return rho(1, 1).real() + rho(2, 2).real();
}

// Integrates the master equation with the pre-generated noise signal treated
// as a continuous function, so each realization is a deterministic
// non-autonomous ODE and fixed-step RK4 applies. Samples n_R every dt_out
// (snapped to a whole number of steps).
inline Trajectory integrate_three_level(const ThreeLevelParams& p, const NoiseSignal& noise,
                                        const Mat3c& rho0, double dt_out) {
    p.validate();
    if (dt_out < p.dt) throw OutOfRangeError("three-level: dt_out must be >= dt");
    if (noise.t0 > 0.0 || noise.t_end() < p.t_total - 1e-9 * p.dt)
        throw OutOfRangeError("three-level: noise signal does not cover [0, t_total]");

    const auto n_steps = static_cast<std::uint64_t>(std::llround(p.t_total / p.dt));
    const auto stride = static_cast<std::uint64_t>(std::max<long long>(1, std::llround(dt_out / p.dt)));

    Trajectory traj;
    traj.times.reserve(n_steps / stride + 2);
    traj.values.reserve(n_steps / stride + 2);
    traj.min_value = 1.0;
    traj.max_value = 0.0;

    auto rhs = [&](double t, const Mat3c& rho) { return master_rhs(t, rho, p, noise.at(t)); };

    Mat3c rho = rho0;
    auto record = [&](double t) {
        double n_r = rydberg_population(rho);
        traj.times.push_back(t);
        traj.values.push_back(n_r);
        traj.max_trace_error = std::max(traj.max_trace_error, std::abs(rho.trace().real() - 1.0));
        traj.max_hermiticity_error = std::max(traj.max_hermiticity_error, hermiticity_error(rho));
        traj.min_eigenvalue = std::min(traj.min_eigenvalue, min_eigenvalue(rho));
        traj.min_value = std::min(traj.min_value, n_r);
        traj.max_value = std::max(traj.max_value, n_r);
    };

    record(0.0);
    for (std::uint64_t i = 0; i < n_steps; ++i) {
        double t = static_cast<double>(i) * p.dt;
        rho = rk4_step(rhs, t, rho, p.dt);
        double tr = rho(0, 0).real() + rho(1, 1).real() + rho(2, 2).real();
        if (!std::isfinite(tr))
            throw NonFiniteState("three-level state became non-finite (dt too large?)");
        if ((i + 1) % stride == 0) record(static_cast<double>(i + 1) * p.dt);
    }
    return traj;
}

// Ensemble of independent realizations. Trajectory i draws its noise from the
// stream derived from (base_seed, i), so results do not depend on execution
// order or thread count.
inline std::vector<Trajectory> run_ensemble(const ThreeLevelParams& p, std::size_t n_traj,
                                            std::uint64_t base_seed, double dt_out,
                                            unsigned threads = 1) {
    if (n_traj < 1) throw OutOfRangeError("three-level ensemble: n_traj must be >= 1");
    return parallel_map_indexed<Trajectory>(n_traj, threads, [&](std::size_t i) {
        try {
            NoiseSignal noise = generate_white_noise(p.t_total, p.noise_sigma,
                                                     derive_seed(base_seed, i),
                                                     p.noise_sample_spacing);
            Trajectory traj = integrate_three_level(p, noise, ground_state_density(), dt_out);
            traj.seed = derive_seed(base_seed, i);
            return traj;
        } catch (const NonFiniteState& e) {
            throw NonFiniteState(static_cast<long>(i), e.what());
        }
    });
}

} // namespace qjump
