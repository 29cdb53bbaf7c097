#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "qjump/config.hpp"
#include "qjump/csv.hpp"
#include "qjump/errors.hpp"
#include "qjump/fitting.hpp"
#include "qjump/jump_analysis.hpp"
#include "qjump/three_level.hpp"
#include "qjump/two_level.hpp"
#include "qjump/version.hpp"

namespace qjump {

namespace fs = std::filesystem;

struct RunOptions {
    unsigned threads = 1; // affects speed only, never results
};

inline std::string traj_filename(std::size_t index) {
    std::string n = std::to_string(index);
    while (n.size() < 3) n.insert(n.begin(), '0');
    return "traj_" + n + ".csv";
}

// every output file carries the resolved configuration it came from
inline std::string config_comment_block(const RunConfig& cfg) {
    std::string out = "# ";
    out += version_string;
    out += '\n';
    std::stringstream lines(serialize_config(cfg));
    std::string line;
    while (std::getline(lines, line)) out += "# " + line + '\n';
    return out;
}

// Runs the configured ensemble in memory. Replay mode substitutes the given
// noise signal for every trajectory.
inline std::vector<Trajectory> simulate_ensemble(const RunConfig& cfg, const RunOptions& opts) {
    if (!cfg.noise_replay.empty()) {
        NoiseSignal replay = read_noise_csv(cfg.noise_replay);
        std::vector<Trajectory> out;
        out.reserve(cfg.n_traj);
        for (std::size_t i = 0; i < cfg.n_traj; ++i) {
            if (cfg.model == ModelKind::three_level) {
                Trajectory t = integrate_three_level(cfg.three, replay,
                                                     ground_state_density(), cfg.dt_out);
                t.seed = cfg.base_seed;
                out.push_back(std::move(t));
            } else {
                out.push_back(integrate_stochastic_two_level(cfg.two, cfg.base_seed,
                                                             cfg.dt_out, &replay));
            }
        }
        return out;
    }
    if (cfg.model == ModelKind::three_level)
        return run_ensemble(cfg.three, cfg.n_traj, cfg.base_seed, cfg.dt_out, opts.threads);
    return run_ensemble_two_level(cfg.two, cfg.n_traj, cfg.base_seed, cfg.dt_out,
                                  opts.threads);
}

struct SimulateResult {
    std::vector<fs::path> trajectory_files;
    fs::path manifest_path;
};

// Writes one CSV per trajectory plus a manifest. The manifest is itself a
// valid config document (the output list rides in comments) and is written
// last as the completion marker.
inline SimulateResult cmd_simulate(const RunConfig& cfg, const fs::path& out_dir,
                                   const RunOptions& opts = {}) {
    if (cfg.n_traj < 1) throw ConfigError("simulate: n_traj must be >= 1");
    fs::create_directories(out_dir);

    std::vector<Trajectory> ensemble = simulate_ensemble(cfg, opts);
    const std::string column = cfg.model == ModelKind::three_level ? "n_R" : "n";

    SimulateResult res;
    for (std::size_t i = 0; i < ensemble.size(); ++i) {
        fs::path p = out_dir / traj_filename(i);
        write_file(p, trajectory_csv(ensemble[i], cfg, column));
        res.trajectory_files.push_back(p);
    }

    std::string manifest = "# ";
    manifest += version_string;
    manifest += " manifest\n# command = simulate\n";
    for (const auto& p : res.trajectory_files)
        manifest += "# output = " + p.filename().string() + '\n';
    manifest += serialize_config(cfg);
    res.manifest_path = out_dir / "manifest.txt";
    write_file(res.manifest_path, manifest);
    return res;
}

struct AnalyzeResult {
    std::size_t n_traj = 0;
    std::uint64_t up_events = 0;
    std::uint64_t down_events = 0;
    std::uint64_t n_intervals = 0;
    double mu = std::numeric_limits<double>::quiet_NaN();
    double alpha = std::numeric_limits<double>::quiet_NaN();
    double contrast_value = std::numeric_limits<double>::quiet_NaN();
    std::string status = "ok"; // ok | no_jumps | no_second_peak | no_period
    IntervalHistogram histogram;
    std::vector<double> pooled_intervals;
};

// Shared analysis core: transient discard, low-pass, optional resampling,
// threshold selection, jump detection, pooled upward-interval histogram and
// contrast. Pooling follows trajectory order, so results are reproducible.
inline AnalyzeResult analyze_series(const std::vector<TimeSeries>& raw,
                                    const AnalysisParams& ap) {
    AnalyzeResult res;
    res.n_traj = raw.size();

    std::vector<TimeSeries> processed;
    processed.reserve(raw.size());
    for (const auto& series : raw) {
        TimeSeries kept;
        for (std::size_t i = 0; i < series.size(); ++i) {
            if (series.times[i] >= ap.discard_t) {
                kept.times.push_back(series.times[i]);
                kept.values.push_back(series.values[i]);
            }
        }
        if (kept.size() < 2) continue;
        kept = low_pass(kept, ap.filter_tau);
        if (ap.resample_dt > 0.0) kept = resample_linear(kept, ap.resample_dt);
        processed.push_back(std::move(kept));
    }

    double min_span = ap.T ? 2.5 * (*ap.T) + ap.bin_width : 0.0;
    auto finish_empty = [&](const char* status) {
        res.status = status;
        res.histogram = build_histogram(std::vector<double>{}, ap.bin_width, min_span);
        return res;
    };

    if (processed.empty()) return finish_empty("no_jumps");

    // threshold: explicit values win, the rest comes from the pooled split
    if (ap.mu && ap.alpha) {
        res.mu = *ap.mu;
        res.alpha = *ap.alpha;
    } else {
        std::vector<double> pooled;
        for (const auto& s : processed)
            pooled.insert(pooled.end(), s.values.begin(), s.values.end());
        AutoThreshold at = auto_threshold(pooled);
        double scale = std::max({std::abs(at.low_mean), std::abs(at.high_mean), 1e-30});
        if (!(at.alpha > 1e-12 * scale)) return finish_empty("no_jumps");
        res.mu = ap.mu ? *ap.mu : at.mu;
        res.alpha = ap.alpha ? *ap.alpha : at.alpha;
    }

    JumpConfig jc{res.mu, res.alpha, 0.0}; // filter already applied above
    std::vector<std::vector<double>> interval_pool;
    for (const auto& s : processed) {
        JumpEvents ev = detect_jumps(s, jc);
        res.up_events += ev.up_times.size();
        res.down_events += ev.down_times.size();
        interval_pool.push_back(upward_intervals(ev));
    }
    for (const auto& v : interval_pool)
        res.pooled_intervals.insert(res.pooled_intervals.end(), v.begin(), v.end());
    res.n_intervals = res.pooled_intervals.size();

    res.histogram = build_histogram(interval_pool, ap.bin_width, min_span);

    if (res.up_events == 0) {
        res.status = "no_jumps";
        return res;
    }
    if (!ap.T) {
        res.status = "no_period";
        return res;
    }
    try {
        res.contrast_value = contrast(res.histogram, *ap.T);
    } catch (const NoSecondPeak&) {
        res.status = "no_second_peak";
    }
    return res;
}

inline std::string analyze_summary_text(const AnalyzeResult& r, const AnalysisParams& ap) {
    std::string out;
    auto kv = [&](const char* k, const std::string& v) {
        out += k;
        out += " = ";
        out += v;
        out += '\n';
    };
    kv("command", "analyze");
    kv("n_traj", fmt_u64(r.n_traj));
    kv("up_events", fmt_u64(r.up_events));
    kv("down_events", fmt_u64(r.down_events));
    kv("intervals", fmt_u64(r.n_intervals));
    kv("mu", fmt_double(r.mu));
    kv("alpha", fmt_double(r.alpha));
    kv("filter_tau", fmt_double(ap.filter_tau));
    kv("bin_width", fmt_double(ap.bin_width));
    kv("discard_t", fmt_double(ap.discard_t));
    kv("T", ap.T ? fmt_double(*ap.T) : "undefined");
    kv("contrast", fmt_double(r.contrast_value));
    kv("status", r.status);
    return out;
}

// Analyze trajectory CSVs and write histogram.csv + summary.txt. A run with
// zero detected jumps still writes both outputs (status = no_jumps).
inline AnalyzeResult cmd_analyze(const std::vector<fs::path>& traj_files,
                                 const RunConfig& cfg, const fs::path& out_dir) {
    if (traj_files.empty()) throw ConfigError("analyze: need at least one trajectory file");
    fs::create_directories(out_dir);
    std::vector<TimeSeries> series;
    series.reserve(traj_files.size());
    for (const auto& p : traj_files) series.push_back(read_time_series(p));

    AnalyzeResult res = analyze_series(series, cfg.analysis);
    std::string header = config_comment_block(cfg);
    write_file(out_dir / "histogram.csv", header + histogram_csv(res.histogram));
    write_file(out_dir / "summary.txt", header + analyze_summary_text(res, cfg.analysis));
    return res;
}

struct SweepPoint {
    double value = 0.0;
    double contrast_value = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t window_count = 0;
    std::uint64_t up_events = 0;
    std::uint64_t n_intervals = 0;
    std::string status = "ok";
};

struct SweepResult {
    std::string param;
    std::vector<SweepPoint> points;
    fs::path table_path;
};

// Simulate + analyze at every grid value of one parameter. Per-point failures
// are recorded in the table and the sweep continues.
inline SweepResult cmd_sweep(const RunConfig& cfg, const fs::path& out_dir,
                             const RunOptions& opts = {}) {
    if (cfg.sweep_param.empty()) throw ConfigError("sweep: sweep_param is not set");
    if (cfg.sweep_values.empty()) throw ConfigError("sweep: sweep_values is empty");
    fs::create_directories(out_dir);

    SweepResult res;
    res.param = cfg.sweep_param;

    for (std::size_t i = 0; i < cfg.sweep_values.size(); ++i) {
        SweepPoint pt;
        pt.value = cfg.sweep_values[i];
        RunConfig point_cfg = cfg;
        try {
            apply_sweep_value(point_cfg, cfg.sweep_param, pt.value);
            std::vector<Trajectory> ensemble = simulate_ensemble(point_cfg, opts);
            std::vector<TimeSeries> series;
            series.reserve(ensemble.size());
            for (const auto& t : ensemble) series.push_back(TimeSeries{t.times, t.values});
            AnalyzeResult ar = analyze_series(series, point_cfg.analysis);
            pt.contrast_value = ar.contrast_value;
            pt.up_events = ar.up_events;
            pt.n_intervals = ar.n_intervals;
            pt.status = ar.status;
            if (cfg.sweep_mode == SweepMode::window_count) {
                if (!point_cfg.analysis.T)
                    throw ConfigError("sweep: window_count mode needs a defined period T");
                double T = *point_cfg.analysis.T;
                pt.window_count = count_in_window(ar.pooled_intervals, 1.85 * T, 2.15 * T);
            }
            write_file(out_dir / ("point_" + std::to_string(i) + ".txt"),
                       config_comment_block(point_cfg) +
                           analyze_summary_text(ar, point_cfg.analysis));
        } catch (const Error& e) {
            pt.status = std::string("error: ") + e.what();
        }
        res.points.push_back(std::move(pt));
    }

    std::string table = config_comment_block(cfg);
    table += "param,value,C,window_count,up_events,intervals,status\n";
    for (const auto& pt : res.points) {
        table += res.param + ',' + fmt_double(pt.value) + ',' + fmt_double(pt.contrast_value) +
                 ',' + fmt_u64(pt.window_count) + ',' + fmt_u64(pt.up_events) + ',' +
                 fmt_u64(pt.n_intervals) + ',' + pt.status + '\n';
    }
    res.table_path = out_dir / "sweep.csv";
    write_file(res.table_path, table);
    return res;
}

// Stable-root counts over a (Delta, Omega) grid; two-level model only.
inline PhaseDiagram cmd_phase_diagram(const RunConfig& cfg, const fs::path& out_dir) {
    if (cfg.model != ModelKind::two_level)
        throw ConfigError("phase-diagram: only the two_level model has fixed-point analysis");
    if (cfg.pd_delta_count < 1 || cfg.pd_omega_count < 1)
        throw ConfigError("phase-diagram: set pd_delta_count and pd_omega_count");
    fs::create_directories(out_dir);

    auto linspace = [](double lo, double hi, long n) {
        std::vector<double> v;
        v.reserve(static_cast<std::size_t>(n));
        if (n == 1) {
            v.push_back(lo);
            return v;
        }
        for (long i = 0; i < n; ++i)
            v.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
        return v;
    };

    PhaseDiagram pd = phase_diagram(linspace(cfg.pd_delta_min, cfg.pd_delta_max, cfg.pd_delta_count),
                                    linspace(cfg.pd_omega_min, cfg.pd_omega_max, cfg.pd_omega_count),
                                    cfg.two);

    std::string csv = config_comment_block(cfg);
    csv += "delta,omega,stable_count\n";
    for (std::size_t i = 0; i < pd.deltas.size(); ++i)
        for (std::size_t j = 0; j < pd.omegas.size(); ++j)
            csv += fmt_double(pd.deltas[i]) + ',' + fmt_double(pd.omegas[j]) + ',' +
                   std::to_string(pd.at(i, j)) + '\n';
    write_file(out_dir / "phase_diagram.csv", csv);

    for (std::size_t k = 0; k < cfg.pd_potential_deltas.size(); ++k) {
        TwoLevelParams p = cfg.two;
        p.Delta = cfg.pd_potential_deltas[k];
        std::string pot = "n,E\n";
        for (int i = 0; i <= 1000; ++i) {
            double n = static_cast<double>(i) / 1000.0;
            pot += fmt_double(n) + ',' + fmt_double(potential(n, p.Delta, p)) + '\n';
        }
        write_file(out_dir / ("potential_" + std::to_string(k) + ".csv"), pot);
    }
    return pd;
}

inline std::string fit_kind_name(FitKind kind) {
    switch (kind) {
        case FitKind::exponential: return "exponential";
        case FitKind::damped_sine: return "damped_sine";
        case FitKind::gaussian_peak: return "gaussian_peak";
        case FitKind::two_state: return "two_state";
    }
    return "?";
}

inline FitKind fit_kind_from_name(const std::string& name) {
    if (name == "exponential") return FitKind::exponential;
    if (name == "damped_sine") return FitKind::damped_sine;
    if (name == "gaussian_peak") return FitKind::gaussian_peak;
    if (name == "two_state") return FitKind::two_state;
    throw ConfigError("unknown fit model '" + name + "'");
}

inline std::string fit_result_text(const FitResult& fr) {
    std::string out;
    out += "command = fit\n";
    out += "fit_model = " + fit_kind_name(fr.kind) + '\n';
    auto names = param_names(fr.kind);
    for (std::size_t i = 0; i < names.size(); ++i)
        out += names[i] + " = " + fmt_double(fr.theta[i]) + '\n';
    out += "residual_ss = " + fmt_double(fr.residual_ss) + '\n';
    out += std::string("converged = ") + (fr.converged ? "true" : "false") + '\n';
    out += "iterations = " + std::to_string(fr.iterations) + '\n';
    return out;
}

inline FitResult cmd_fit(const fs::path& histogram_path, FitKind kind, int starts,
                         std::uint64_t seed, bool poisson_weighted, const fs::path& out_dir) {
    IntervalHistogram h = read_histogram_csv(histogram_path);
    FitResult fr = fit(kind, h, starts, seed, poisson_weighted);
    fs::create_directories(out_dir);
    std::string header = "# histogram = " + histogram_path.string() + "\n# starts = " +
                         std::to_string(starts) + "\n# jitter_seed = " + fmt_u64(seed) +
                         "\n# poisson_weighted = " + (poisson_weighted ? "true" : "false") +
                         "\n";
    write_file(out_dir / "fit.txt", header + fit_result_text(fr));
    return fr;
}

// Dumps the noise realization that trajectory 0 of this config would see.
inline fs::path cmd_noise_dump(const RunConfig& cfg, const fs::path& out_dir) {
    fs::create_directories(out_dir);
    NoiseSignal sig;
    if (cfg.model == ModelKind::three_level) {
        sig = generate_white_noise(cfg.three.t_total, cfg.three.noise_sigma,
                                   derive_seed(cfg.base_seed, 0),
                                   cfg.three.noise_sample_spacing);
    } else {
        sig = generate_ou_signal(cfg.two.t_total, cfg.two.dt, cfg.two.ou(),
                                 derive_seed(cfg.base_seed, 0));
    }
    fs::path p = out_dir / "noise.csv";
    write_file(p, config_comment_block(cfg) + noise_csv(sig));
    return p;
}

} // namespace qjump
