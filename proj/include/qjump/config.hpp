#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qjump/errors.hpp"
#include "qjump/text.hpp"
#include "qjump/three_level.hpp"
#include "qjump/two_level.hpp"

namespace qjump {

enum class ModelKind { three_level, two_level };
enum class NoiseMode { per_unit_time, literal_total };
enum class SweepMode { contrast, window_count };

// Analysis defaults resolve from the model config where possible; mu and
// alpha may stay "auto", in which case they are chosen from the pooled data
// at analysis time (two-cluster split).
struct AnalysisParams {
    std::optional<double> mu;
    std::optional<double> alpha;
    double filter_tau = 0.0;
    double bin_width = 10.0;
    double discard_t = 0.0;
    std::optional<double> T; // modulation period, when defined
    double resample_dt = 0.0; // 0 = no resampling
};

// Fully resolved run configuration. All values are in units of gamma (rates)
// and 1/gamma (times).
struct RunConfig {
    ModelKind model = ModelKind::two_level;
    ThreeLevelParams three;
    TwoLevelParams two;

    std::size_t n_traj = 1;
    std::uint64_t base_seed = 1;
    double dt_out = 0.5;
    NoiseMode noise_mode = NoiseMode::per_unit_time;
    std::string noise_replay;

    AnalysisParams analysis;

    std::string sweep_param;
    std::vector<double> sweep_values;
    SweepMode sweep_mode = SweepMode::contrast;

    double pd_delta_min = 14.0, pd_delta_max = 25.0;
    long pd_delta_count = 0;
    double pd_omega_min = 2.0, pd_omega_max = 2.0;
    long pd_omega_count = 0;
    std::vector<double> pd_potential_deltas;

    // which derived values still follow the model parameters
    bool auto_dt_out = true;
    bool auto_bin_width = true;
    bool auto_filter_tau = true;
    bool auto_discard_t = true;
    bool auto_T = true;

    double dt() const { return model == ModelKind::three_level ? three.dt : two.dt; }
    double t_total() const {
        return model == ModelKind::three_level ? three.t_total : two.t_total;
    }
    double delta_f() const {
        return model == ModelKind::three_level ? three.delta_f : two.delta_f;
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& v, int line) {
    double out;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw ParseError(line, "expected a number, got '" + v + "'");
    return out;
}

inline long parse_long(const std::string& v, int line) {
    long out;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw ParseError(line, "expected an integer, got '" + v + "'");
    return out;
}

inline std::vector<double> parse_list(const std::string& v, int line) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_double(item, line));
    }
    if (out.empty()) throw ParseError(line, "expected a comma-separated list");
    return out;
}

} // namespace detail

// Recomputes the derived defaults from the current model parameters; called
// after parsing and again after a sweep rewrites a parameter.
inline void resolve_config(RunConfig& cfg) {
    double df = cfg.delta_f();
    if (cfg.auto_T) cfg.analysis.T = df > 0.0 ? std::optional<double>(1.0 / df) : std::nullopt;

    double period = cfg.analysis.T.value_or(0.0);
    if (cfg.auto_dt_out)
        cfg.dt_out = std::max(period > 0.0 ? period / 200.0 : 0.5, cfg.dt());
    if (cfg.auto_bin_width) cfg.analysis.bin_width = period > 0.0 ? period / 20.0 : 10.0;
    if (cfg.auto_filter_tau)
        cfg.analysis.filter_tau =
            df > 0.0 ? 1.0 / (20.0 * df * 2.0 * std::numbers::pi) : 10.0 * cfg.dt();
    if (cfg.auto_discard_t) {
        if (cfg.model == ModelKind::three_level)
            cfg.analysis.discard_t = period > 0.0 ? 5.0 * period : 0.0;
        else
            cfg.analysis.discard_t = cfg.two.kappa > 0.0 ? 20.0 / cfg.two.kappa : 0.0;
    }

    if (cfg.model == ModelKind::three_level) {
        if (cfg.noise_mode == NoiseMode::per_unit_time) {
            cfg.three.noise_sample_spacing = 10.0;
        } else {
            if (df <= 0.0)
                throw ConfigError("noise_mode = literal_total requires delta_f > 0");
            auto n = std::max<long long>(2, std::llround(period / 10.0));
            cfg.three.noise_sample_spacing =
                cfg.three.t_total / static_cast<double>(n - 1);
        }
    }
}

// Parses the flat key = value document. '#' starts a comment line; unknown
// keys (including keys of the other model) are rejected with their line
// number; missing keys take the documented defaults.
inline RunConfig parse_config(const std::string& text) {
    struct Entry {
        std::string key, value;
        int line;
    };
    std::vector<Entry> entries;
    std::stringstream ss(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(ss, raw)) {
        ++line_no;
        std::string line = detail::trim(raw);
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError(line_no, "expected 'key = value'");
        std::string key = detail::trim(line.substr(0, eq));
        std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty()) throw ParseError(line_no, "empty key");
        if (value.empty()) throw ParseError(line_no, "empty value for key '" + key + "'");
        entries.push_back({key, value, line_no});
    }

    RunConfig cfg;
    bool model_seen = false;
    for (const auto& e : entries) {
        if (e.key == "model") {
            if (e.value == "three_level") cfg.model = ModelKind::three_level;
            else if (e.value == "two_level") cfg.model = ModelKind::two_level;
            else throw ParseError(e.line, "model must be three_level or two_level");
            model_seen = true;
        }
    }
    if (!model_seen) throw ConfigError("config is missing the 'model' key");

    const bool three = cfg.model == ModelKind::three_level;

    auto out_of_range = [](const Entry& e, const char* what) {
        throw OutOfRangeError("line " + std::to_string(e.line) + ": " + e.key + " " + what);
    };

    for (const auto& e : entries) {
        const std::string& k = e.key;
        const std::string& v = e.value;
        auto num = [&]() { return detail::parse_double(v, e.line); };
        auto positive = [&]() {
            double x = num();
            if (x <= 0.0) out_of_range(e, "must be > 0");
            return x;
        };
        auto nonnegative = [&]() {
            double x = num();
            if (x < 0.0) out_of_range(e, "must be >= 0");
            return x;
        };
        auto optional_auto = [&]() -> std::optional<double> {
            if (v == "auto") return std::nullopt;
            return num();
        };

        if (k == "model") continue;
        // shared model parameters
        else if (k == "Delta") (three ? cfg.three.Delta : cfg.two.Delta) = num();
        else if (k == "Omega") (three ? cfg.three.Omega : cfg.two.Omega) = num();
        else if (k == "delta_f") (three ? cfg.three.delta_f : cfg.two.delta_f) = nonnegative();
        else if (k == "dt") (three ? cfg.three.dt : cfg.two.dt) = positive();
        else if (k == "t_total") (three ? cfg.three.t_total : cfg.two.t_total) = positive();
        // three-level only
        else if (three && k == "gamma_r") cfg.three.gamma_r = positive();
        else if (three && k == "gamma_s") cfg.three.gamma_s = positive();
        else if (three && k == "V1") cfg.three.V1 = num();
        else if (three && k == "V2") cfg.three.V2 = num();
        else if (three && k == "V3") cfg.three.V3 = num();
        else if (three && k == "V4") cfg.three.V4 = num();
        else if (three && k == "Omega_MW1") cfg.three.Omega_MW1 = num();
        else if (three && k == "Omega_MW2") cfg.three.Omega_MW2 = num();
        else if (three && k == "noise_sigma") cfg.three.noise_sigma = nonnegative();
        // two-level only
        else if (!three && k == "A") cfg.two.A = num();
        else if (!three && k == "V") cfg.two.V = num();
        else if (!three && k == "gamma") cfg.two.gamma = positive();
        else if (!three && k == "gamma_D") cfg.two.gamma_D = nonnegative();
        else if (!three && k == "kappa") cfg.two.kappa = nonnegative();
        else if (!three && k == "D") cfg.two.D = nonnegative();
        // ensemble / output
        else if (k == "n_traj") {
            long n = detail::parse_long(v, e.line);
            if (n < 1) out_of_range(e, "must be >= 1");
            cfg.n_traj = static_cast<std::size_t>(n);
        } else if (k == "base_seed") {
            cfg.base_seed = static_cast<std::uint64_t>(detail::parse_long(v, e.line));
        } else if (k == "dt_out") {
            if (v == "auto") { cfg.auto_dt_out = true; }
            else { cfg.dt_out = positive(); cfg.auto_dt_out = false; }
        } else if (k == "noise_mode") {
            if (v == "per_unit_time") cfg.noise_mode = NoiseMode::per_unit_time;
            else if (v == "literal_total") cfg.noise_mode = NoiseMode::literal_total;
            else throw ParseError(e.line, "noise_mode must be per_unit_time or literal_total");
        } else if (k == "noise_replay") {
            cfg.noise_replay = v == "none" ? "" : v;
        }
        // analysis
        else if (k == "mu") cfg.analysis.mu = optional_auto();
        else if (k == "alpha") {
            cfg.analysis.alpha = optional_auto();
            if (cfg.analysis.alpha && *cfg.analysis.alpha <= 0.0)
                out_of_range(e, "must be > 0");
        } else if (k == "filter_tau") {
            if (v == "auto") { cfg.auto_filter_tau = true; }
            else { cfg.analysis.filter_tau = nonnegative(); cfg.auto_filter_tau = false; }
        } else if (k == "bin_width") {
            if (v == "auto") { cfg.auto_bin_width = true; }
            else { cfg.analysis.bin_width = positive(); cfg.auto_bin_width = false; }
        } else if (k == "T") {
            if (v == "auto") { cfg.auto_T = true; }
            else { cfg.analysis.T = positive(); cfg.auto_T = false; }
        } else if (k == "discard_t") {
            if (v == "auto") { cfg.auto_discard_t = true; }
            else { cfg.analysis.discard_t = nonnegative(); cfg.auto_discard_t = false; }
        } else if (k == "resample_dt") {
            cfg.analysis.resample_dt = nonnegative();
        }
        // sweep
        else if (k == "sweep_param") cfg.sweep_param = v == "none" ? "" : v;
        else if (k == "sweep_values") cfg.sweep_values = detail::parse_list(v, e.line);
        else if (k == "sweep_mode") {
            if (v == "contrast") cfg.sweep_mode = SweepMode::contrast;
            else if (v == "window_count") cfg.sweep_mode = SweepMode::window_count;
            else throw ParseError(e.line, "sweep_mode must be contrast or window_count");
        }
        // phase diagram
        else if (k == "pd_delta_min") cfg.pd_delta_min = num();
        else if (k == "pd_delta_max") cfg.pd_delta_max = num();
        else if (k == "pd_delta_count") {
            cfg.pd_delta_count = detail::parse_long(v, e.line);
            if (cfg.pd_delta_count < 1) out_of_range(e, "must be >= 1");
        } else if (k == "pd_omega_min") cfg.pd_omega_min = num();
        else if (k == "pd_omega_max") cfg.pd_omega_max = num();
        else if (k == "pd_omega_count") {
            cfg.pd_omega_count = detail::parse_long(v, e.line);
            if (cfg.pd_omega_count < 1) out_of_range(e, "must be >= 1");
        } else if (k == "pd_potential_deltas") {
            cfg.pd_potential_deltas = detail::parse_list(v, e.line);
        } else {
            throw UnknownKeyError(e.line, k);
        }
    }

    resolve_config(cfg);
    if (three) cfg.three.validate(); else cfg.two.validate();
    if (cfg.dt_out < cfg.dt()) throw OutOfRangeError("dt_out must be >= dt");
    return cfg;
}

// Emits the fully resolved configuration as a flat key = value document in a
// fixed key order. parse_config(serialize_config(cfg)) reproduces cfg, and
// serializing again yields identical bytes.
inline std::string serialize_config(const RunConfig& cfg) {
    std::string out;
    auto kv = [&](const char* k, const std::string& v) {
        out += k;
        out += " = ";
        out += v;
        out += '\n';
    };
    auto kvd = [&](const char* k, double v) { kv(k, fmt_double(v)); };

    const bool three = cfg.model == ModelKind::three_level;
    kv("model", three ? "three_level" : "two_level");
    if (three) {
        kvd("gamma_r", cfg.three.gamma_r);
        kvd("gamma_s", cfg.three.gamma_s);
        kvd("Omega", cfg.three.Omega);
        kvd("Delta", cfg.three.Delta);
        kvd("V1", cfg.three.V1);
        kvd("V2", cfg.three.V2);
        kvd("V3", cfg.three.V3);
        kvd("V4", cfg.three.V4);
        kvd("Omega_MW1", cfg.three.Omega_MW1);
        kvd("Omega_MW2", cfg.three.Omega_MW2);
        kvd("delta_f", cfg.three.delta_f);
        kvd("noise_sigma", cfg.three.noise_sigma);
        kvd("dt", cfg.three.dt);
        kvd("t_total", cfg.three.t_total);
        kv("noise_mode", cfg.noise_mode == NoiseMode::per_unit_time ? "per_unit_time"
                                                                    : "literal_total");
    } else {
        kvd("Delta", cfg.two.Delta);
        kvd("A", cfg.two.A);
        kvd("delta_f", cfg.two.delta_f);
        kvd("Omega", cfg.two.Omega);
        kvd("V", cfg.two.V);
        kvd("gamma", cfg.two.gamma);
        kvd("gamma_D", cfg.two.gamma_D);
        kvd("kappa", cfg.two.kappa);
        kvd("D", cfg.two.D);
        kvd("dt", cfg.two.dt);
        kvd("t_total", cfg.two.t_total);
    }
    if (!cfg.noise_replay.empty()) kv("noise_replay", cfg.noise_replay);
    kv("n_traj", fmt_u64(cfg.n_traj));
    kv("base_seed", fmt_u64(cfg.base_seed));
    kvd("dt_out", cfg.dt_out);
    kv("mu", cfg.analysis.mu ? fmt_double(*cfg.analysis.mu) : "auto");
    kv("alpha", cfg.analysis.alpha ? fmt_double(*cfg.analysis.alpha) : "auto");
    kvd("filter_tau", cfg.analysis.filter_tau);
    kvd("bin_width", cfg.analysis.bin_width);
    kv("T", cfg.analysis.T ? fmt_double(*cfg.analysis.T) : "auto");
    kvd("discard_t", cfg.analysis.discard_t);
    kvd("resample_dt", cfg.analysis.resample_dt);
    if (!cfg.sweep_param.empty()) {
        kv("sweep_param", cfg.sweep_param);
        std::string list;
        for (std::size_t i = 0; i < cfg.sweep_values.size(); ++i) {
            if (i) list += ',';
            list += fmt_double(cfg.sweep_values[i]);
        }
        kv("sweep_values", list);
        kv("sweep_mode",
           cfg.sweep_mode == SweepMode::contrast ? "contrast" : "window_count");
    }
    if (cfg.pd_delta_count > 0 && cfg.pd_omega_count > 0) {
        kvd("pd_delta_min", cfg.pd_delta_min);
        kvd("pd_delta_max", cfg.pd_delta_max);
        kv("pd_delta_count", fmt_u64(static_cast<std::uint64_t>(cfg.pd_delta_count)));
        kvd("pd_omega_min", cfg.pd_omega_min);
        kvd("pd_omega_max", cfg.pd_omega_max);
        kv("pd_omega_count", fmt_u64(static_cast<std::uint64_t>(cfg.pd_omega_count)));
    }
    if (!cfg.pd_potential_deltas.empty()) {
        std::string list;
        for (std::size_t i = 0; i < cfg.pd_potential_deltas.size(); ++i) {
            if (i) list += ',';
            list += fmt_double(cfg.pd_potential_deltas[i]);
        }
        kv("pd_potential_deltas", list);
    }
    return out;
}

// Applies one numeric parameter by config key name (used by sweeps). The
// derived key beta_dB rewrites Omega_MW2 from the fixed Omega_MW1.
inline void apply_sweep_value(RunConfig& cfg, const std::string& name, double value) {
    const bool three = cfg.model == ModelKind::three_level;
    if (name == "Delta") (three ? cfg.three.Delta : cfg.two.Delta) = value;
    else if (name == "Omega") (three ? cfg.three.Omega : cfg.two.Omega) = value;
    else if (name == "delta_f") (three ? cfg.three.delta_f : cfg.two.delta_f) = value;
    else if (three && name == "Omega_MW1") cfg.three.Omega_MW1 = value;
    else if (three && name == "Omega_MW2") cfg.three.Omega_MW2 = value;
    else if (three && name == "noise_sigma") cfg.three.noise_sigma = value;
    else if (three && name == "beta_dB")
        cfg.three.Omega_MW2 = cfg.three.Omega_MW1 * std::pow(10.0, value / 20.0);
    else if (three && name == "V1") cfg.three.V1 = value;
    else if (three && name == "V2") cfg.three.V2 = value;
    else if (three && name == "V3") cfg.three.V3 = value;
    else if (three && name == "V4") cfg.three.V4 = value;
    else if (!three && name == "A") cfg.two.A = value;
    else if (!three && name == "V") cfg.two.V = value;
    else if (!three && name == "gamma_D") cfg.two.gamma_D = value;
    else if (!three && name == "kappa") cfg.two.kappa = value;
    else if (!three && name == "D") cfg.two.D = value;
    else throw ConfigError("sweep_param '" + name + "' is not a sweepable parameter");
    resolve_config(cfg);
}

} // namespace qjump
