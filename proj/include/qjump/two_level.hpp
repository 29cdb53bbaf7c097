#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include "qjump/ensemble.hpp"
#include "qjump/errors.hpp"
#include "qjump/mat3.hpp"
#include "qjump/noise.hpp"
#include "qjump/rk4.hpp"
#include "qjump/trajectory.hpp"

namespace qjump {

// Simplified two-level mean-field model: density n and coherence q, the
// adiabatic single-variable dynamics obtained for strong dephasing, its
// effective potential, and the stochastic dynamics with OU detuning noise.
struct TwoLevelParams {
    double Delta = 18.5;   // bare detuning
    double A = 0.0;        // detuning modulation amplitude
    double delta_f = 0.0;  // modulation frequency; period T = 1/delta_f
    double Omega = 2.0;    // Rabi frequency
    double V = 100.0;      // all-to-all interaction strength
    double gamma = 1.0;    // decay rate (sets the unit)
    double gamma_D = 10.0; // dephasing rate
    double kappa = 0.1;    // OU relaxation rate
    double D = 1.0;        // OU noise strength
    double dt = 1e-3;
    double t_total = 10000.0;

    double Gamma() const { return 0.5 * (gamma + gamma_D); }

    OUParams ou() const { return OUParams{kappa, D, gamma}; }

    void validate() const {
        if (gamma <= 0.0) throw OutOfRangeError("two-level: gamma must be > 0");
        if (gamma_D < 0.0) throw OutOfRangeError("two-level: gamma_D must be >= 0");
        if (kappa < 0.0) throw OutOfRangeError("two-level: kappa must be >= 0");
        if (D < 0.0) throw OutOfRangeError("two-level: D must be >= 0");
        if (dt <= 0.0) throw OutOfRangeError("two-level: dt must be > 0");
        if (t_total <= 0.0) throw OutOfRangeError("two-level: t_total must be > 0");
        if (delta_f < 0.0) throw OutOfRangeError("two-level: delta_f must be >= 0");
    }
};

// Mean-field state of the full (n, q) dynamics.
struct TwoLevelState {
    double n = 0.0;
    cxd q{0.0, 0.0};

    friend TwoLevelState operator+(const TwoLevelState& a, const TwoLevelState& b) {
        return {a.n + b.n, a.q + b.q};
    }
    friend TwoLevelState operator*(const TwoLevelState& a, double s) {
        return {a.n * s, a.q * s};
    }
};

// Delta(t) = Delta - A cos(2 pi delta_f t)
inline double modulated_detuning(double t, const TwoLevelParams& p) {
    return p.Delta - p.A * std::cos(2.0 * std::numbers::pi * p.delta_f * t);
}

// Full mean-field equations of motion; delta_s is the instantaneous OU shift.
//   dn = Omega Im(q) - gamma n
//   dq = -i (Delta(t) + delta_s - n V) q - i Omega n - Gamma q + i Omega / 2
inline TwoLevelState full_rhs(double t, const TwoLevelState& s, const TwoLevelParams& p,
                              double delta_s) {
    double det = modulated_detuning(t, p) + delta_s - s.n * p.V;
    TwoLevelState d;
    d.n = p.Omega * s.q.imag() - p.gamma * s.n;
    d.q = cxd(0.0, -det) * s.q + cxd(0.0, -p.Omega * s.n) - p.Gamma() * s.q +
          cxd(0.0, 0.5 * p.Omega);
    return d;
}

// Adiabatic density dynamics for strong dephasing:
//   dn = -Omega^2 Gamma (n - 1/2) / (Gamma^2 + (delta - n V)^2) - gamma n
inline double adiabatic_rhs(double n, double delta_inst, const TwoLevelParams& p) {
    double g = p.Gamma();
    double u = delta_inst - n * p.V;
    return -p.Omega * p.Omega * g * (n - 0.5) / (g * g + u * u) - p.gamma * n;
}

// d(adiabatic_rhs)/dn, used for stability classification.
inline double adiabatic_rhs_deriv(double n, double delta_inst, const TwoLevelParams& p) {
    double g = p.Gamma();
    double u = delta_inst - n * p.V;
    double w = g * g + u * u;
    return -p.Omega * p.Omega * g * (w + 2.0 * p.V * (n - 0.5) * u) / (w * w) - p.gamma;
}

// Effective potential E(n) with dn/dt = -dE/dn:
//   E(n) = gamma n^2/2 - (Omega^2/V)(Delta/V - 1/2) atan((Delta - nV)/Gamma)
//          + (Omega^2 Gamma / 2 V^2) log(1 + (Delta - nV)^2 / Gamma^2)
inline double potential(double n, double delta_inst, const TwoLevelParams& p) {
    if (p.V == 0.0)
        throw DegenerateInteraction("potential: V = 0 has no closed form; use adiabatic_rhs");
    double g = p.Gamma();
    double u = delta_inst - n * p.V;
    double om2 = p.Omega * p.Omega;
    return 0.5 * p.gamma * n * n -
           (om2 / p.V) * (delta_inst / p.V - 0.5) * std::atan(u / g) +
           (om2 * g / (2.0 * p.V * p.V)) * std::log1p((u / g) * (u / g));
}

enum class RootStability { stable, unstable, marginal };

struct FixedPoint {
    double n = 0.0;
    RootStability stability = RootStability::stable;
};

struct FixedPointSet {
    std::vector<FixedPoint> roots; // ascending in n

    int stable_count() const {
        int c = 0;
        for (const auto& r : roots)
            if (r.stability == RootStability::stable) ++c;
        return c;
    }
    bool has_marginal() const {
        for (const auto& r : roots)
            if (r.stability == RootStability::marginal) return true;
        return false;
    }
};

inline RootStability classify_stability(double deriv, double tol = 1e-8) {
    if (std::abs(deriv) < tol) return RootStability::marginal;
    return deriv < 0.0 ? RootStability::stable : RootStability::unstable;
}

// All roots of adiabatic_rhs on [0,1]: uniform bracketing scan plus bisection.
// The RHS is smooth with at most three roots here, so brute force is robust,
// including near the spinodal lines.
inline FixedPointSet fixed_points(const TwoLevelParams& p, double delta_inst,
                                  int scan_points = 2001) {
    auto f = [&](double n) { return adiabatic_rhs(n, delta_inst, p); };

    FixedPointSet out;
    auto add_root = [&](double n) {
        for (const auto& r : out.roots)
            if (std::abs(r.n - n) < 1e-9) return;
        out.roots.push_back({n, classify_stability(adiabatic_rhs_deriv(n, delta_inst, p))});
    };

    double prev_n = 0.0;
    double prev_f = f(0.0);
    if (prev_f == 0.0) add_root(0.0);
    for (int i = 1; i < scan_points; ++i) {
        double n = static_cast<double>(i) / (scan_points - 1);
        double fn = f(n);
        if (fn == 0.0) {
            add_root(n);
        } else if (prev_f != 0.0 && std::signbit(fn) != std::signbit(prev_f)) {
            double lo = prev_n, hi = n, flo = prev_f;
            for (int it = 0; it < 80 && hi - lo > 1e-15; ++it) {
                double mid = 0.5 * (lo + hi);
                double fm = f(mid);
                if (fm == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if (std::signbit(fm) == std::signbit(flo)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            add_root(0.5 * (lo + hi));
        }
        prev_n = n;
        prev_f = fn;
    }
    std::sort(out.roots.begin(), out.roots.end(),
              [](const FixedPoint& a, const FixedPoint& b) { return a.n < b.n; });
    return out;
}

struct PhaseDiagram {
    std::vector<double> deltas;
    std::vector<double> omegas;
    std::vector<int> stable_counts;  // row-major: index = i_delta * omegas.size() + i_omega
    std::vector<std::uint8_t> marginal; // spinodal boundary marker

    int at(std::size_t i_delta, std::size_t i_omega) const {
        return stable_counts[i_delta * omegas.size() + i_omega];
    }
};

inline PhaseDiagram phase_diagram(const std::vector<double>& delta_grid,
                                  const std::vector<double>& omega_grid,
                                  TwoLevelParams p) {
    if (delta_grid.empty() || omega_grid.empty())
        throw OutOfRangeError("phase diagram: grids must be non-empty");
    PhaseDiagram pd;
    pd.deltas = delta_grid;
    pd.omegas = omega_grid;
    pd.stable_counts.resize(delta_grid.size() * omega_grid.size());
    pd.marginal.resize(pd.stable_counts.size(), 0);
    for (std::size_t i = 0; i < delta_grid.size(); ++i) {
        for (std::size_t j = 0; j < omega_grid.size(); ++j) {
            p.Delta = delta_grid[i];
            p.Omega = omega_grid[j];
            FixedPointSet fps = fixed_points(p, p.Delta);
            pd.stable_counts[i * omega_grid.size() + j] = fps.stable_count();
            pd.marginal[i * omega_grid.size() + j] = fps.has_marginal() ? 1 : 0;
        }
    }
    return pd;
}

// Deterministic initial condition for stochastic runs: the lowest stable root
// of the adiabatic dynamics at the t = 0 instantaneous detuning.
inline double initial_density(const TwoLevelParams& p) {
    FixedPointSet fps = fixed_points(p, modulated_detuning(0.0, p));
    for (const auto& r : fps.roots)
        if (r.stability == RootStability::stable) return r.n;
    return fps.roots.front().n; // marginal-only set; still deterministic
}

// Combined stochastic dynamics: RK4 on the adiabatic density with
// delta_inst(t) = modulated_detuning(t) + Delta_S(t). The OU shift is stepped
// exactly on the same dt grid and linearly interpolated at the RK4 stage
// times. If `replay` is non-null it supplies Delta_S instead of the RNG.
inline Trajectory integrate_stochastic_two_level(const TwoLevelParams& p, std::uint64_t seed,
                                                 double dt_out,
                                                 const NoiseSignal* replay = nullptr) {
    p.validate();
    if (dt_out < p.dt) throw OutOfRangeError("two-level: dt_out must be >= dt");
    if (replay && (replay->t0 > 0.0 || replay->t_end() < p.t_total - 1e-9 * p.dt))
        throw OutOfRangeError("two-level: replay signal does not cover [0, t_total]");

    const auto n_steps = static_cast<std::uint64_t>(std::llround(p.t_total / p.dt));
    const auto stride = static_cast<std::uint64_t>(std::max<long long>(1, std::llround(dt_out / p.dt)));

    Trajectory traj;
    traj.seed = seed;
    traj.times.reserve(n_steps / stride + 2);
    traj.values.reserve(n_steps / stride + 2);
    traj.min_value = 1.0;
    traj.max_value = 0.0;

    RngStream rng(seed, 0);
    const OUParams ou = p.ou();

    double n = initial_density(p);
    double s0 = replay ? replay->at(0.0) : 0.0;

    auto record = [&](double t) {
        traj.times.push_back(t);
        traj.values.push_back(n);
        traj.min_value = std::min(traj.min_value, n);
        traj.max_value = std::max(traj.max_value, n);
    };

    record(0.0);
    for (std::uint64_t i = 0; i < n_steps; ++i) {
        double t = static_cast<double>(i) * p.dt;
        double s1 = replay ? replay->at(t + p.dt) : ou_step(s0, p.dt, ou, rng.normal());
        auto rhs = [&](double tt, double nn) {
            double ds;
            if (replay) {
                ds = replay->at(tt);
            } else {
                double frac = (tt - t) / p.dt;
                ds = s0 + frac * (s1 - s0);
            }
            return adiabatic_rhs(nn, modulated_detuning(tt, p) + ds, p);
        };
        n = rk4_step(rhs, t, n, p.dt);
        if (!std::isfinite(n)) throw NonFiniteState("two-level state became non-finite");
        s0 = s1;
        if ((i + 1) % stride == 0) record(static_cast<double>(i + 1) * p.dt);
    }
    return traj;
}

inline std::vector<Trajectory> run_ensemble_two_level(const TwoLevelParams& p,
                                                      std::size_t n_traj,
                                                      std::uint64_t base_seed, double dt_out,
                                                      unsigned threads = 1) {
    if (n_traj < 1) throw OutOfRangeError("two-level ensemble: n_traj must be >= 1");
    return parallel_map_indexed<Trajectory>(n_traj, threads, [&](std::size_t i) {
        try {
            return integrate_stochastic_two_level(p, derive_seed(base_seed, i), dt_out);
        } catch (const NonFiniteState& e) {
            throw NonFiniteState(static_cast<long>(i), e.what());
        }
    });
}

// Integrates the full (n, q) dynamics with fixed detuning shift; used to
// cross-check the adiabatic fixed points.
inline TwoLevelState integrate_full_two_level(const TwoLevelParams& p, TwoLevelState s,
                                              double t_end, double delta_s = 0.0) {
    p.validate();
    auto rhs = [&](double t, const TwoLevelState& st) { return full_rhs(t, st, p, delta_s); };
    const auto n_steps = static_cast<std::uint64_t>(std::llround(t_end / p.dt));
    for (std::uint64_t i = 0; i < n_steps; ++i) {
        s = rk4_step(rhs, static_cast<double>(i) * p.dt, s, p.dt);
        if (!std::isfinite(s.n)) throw NonFiniteState("two-level full state became non-finite");
    }
    return s;
}

} // namespace qjump
