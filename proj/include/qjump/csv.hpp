#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "qjump/config.hpp"
#include "qjump/errors.hpp"
#include "qjump/jump_analysis.hpp"
#include "qjump/noise.hpp"
#include "qjump/text.hpp"
#include "qjump/trajectory.hpp"
#include "qjump/version.hpp"

namespace qjump {

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << content;
    out.flush();
    if (!out) throw IoError("write failed: " + path.string());
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Trajectory CSV: '#'-prefixed header block with the resolved parameters and
// the seed, a column-name row, then t,value rows.
inline std::string trajectory_csv(const Trajectory& traj, const RunConfig& cfg,
                                  const std::string& value_column) {
    std::string out;
    out += "# ";
    out += version_string;
    out += " trajectory\n";
    std::stringstream cfg_lines(serialize_config(cfg));
    std::string line;
    while (std::getline(cfg_lines, line)) {
        out += "# ";
        out += line;
        out += '\n';
    }
    out += "# seed = " + fmt_u64(traj.seed) + '\n';
    out += "# max_trace_error = " + fmt_double(traj.max_trace_error) + '\n';
    out += "# max_hermiticity_error = " + fmt_double(traj.max_hermiticity_error) + '\n';
    out += "# min_eigenvalue = " + fmt_double(traj.min_eigenvalue) + '\n';
    out += "t," + value_column + '\n';
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        out += fmt_double(traj.times[i]);
        out += ',';
        out += fmt_double(traj.values[i]);
        out += '\n';
    }
    return out;
}

// Reads a two-column time series. Tolerant of '#' comments, one header row,
// and comma / whitespace / tab separators (oscilloscope exports vary).
inline TimeSeries read_time_series_text(const std::string& text, const std::string& name) {
    TimeSeries ts;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        for (auto& ch : t)
            if (ch == ',' || ch == '\t' || ch == ';') ch = ' ';
        std::stringstream fields(t);
        double a, b;
        if (fields >> a >> b) {
            if (!ts.times.empty() && a <= ts.times.back())
                throw IoError(name + ": times are not strictly increasing");
            ts.times.push_back(a);
            ts.values.push_back(b);
        } else if (ts.times.empty()) {
            continue; // header row
        } else {
            throw IoError(name + ": malformed row '" + t + "'");
        }
    }
    if (ts.times.empty()) throw IoError(name + ": no data rows");
    return ts;
}

inline TimeSeries read_time_series(const std::filesystem::path& path) {
    return read_time_series_text(read_file(path), path.string());
}

inline std::string histogram_csv(const IntervalHistogram& h) {
    std::string out = "bin_left,bin_right,count\n";
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        out += fmt_double(h.bin_left(i));
        out += ',';
        out += fmt_double(h.bin_left(i + 1));
        out += ',';
        out += fmt_u64(h.counts[i]);
        out += '\n';
    }
    return out;
}

inline IntervalHistogram read_histogram_csv(const std::filesystem::path& path) {
    std::string text = read_file(path);
    std::stringstream ss(text);
    std::string line;
    IntervalHistogram h;
    std::vector<double> lefts;
    while (std::getline(ss, line)) {
        std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        for (auto& ch : t)
            if (ch == ',') ch = ' ';
        std::stringstream fields(t);
        double left, right;
        std::uint64_t count;
        if (fields >> left >> right >> count) {
            lefts.push_back(left);
            if (h.counts.empty()) h.bin_width = right - left;
            h.counts.push_back(count);
            h.total_events += count;
        }
    }
    if (h.counts.empty()) throw IoError(path.string() + ": no histogram rows");
    if (h.bin_width <= 0.0) throw IoError(path.string() + ": non-positive bin width");
    for (std::size_t i = 0; i < lefts.size(); ++i)
        if (std::abs(lefts[i] - static_cast<double>(i) * h.bin_width) > 1e-9 * h.bin_width * (i + 1.0))
            throw IoError(path.string() + ": bins must be uniform starting at 0");
    return h;
}

inline std::string noise_csv(const NoiseSignal& sig) {
    std::string out = "t,value\n";
    for (std::size_t i = 0; i < sig.values.size(); ++i) {
        out += fmt_double(sig.sample_time(i));
        out += ',';
        out += fmt_double(sig.values[i]);
        out += '\n';
    }
    return out;
}

inline NoiseSignal read_noise_csv(const std::filesystem::path& path) {
    TimeSeries ts = read_time_series(path);
    if (ts.size() < 2) throw IoError(path.string() + ": noise signal needs >= 2 samples");
    NoiseSignal sig;
    sig.t0 = ts.times.front();
    sig.sample_dt = (ts.times.back() - ts.times.front()) /
                    static_cast<double>(ts.size() - 1);
    for (std::size_t i = 0; i < ts.size(); ++i) {
        double expect = sig.t0 + sig.sample_dt * static_cast<double>(i);
        if (std::abs(ts.times[i] - expect) > 1e-6 * sig.sample_dt)
            throw IoError(path.string() + ": noise samples must be uniformly spaced");
    }
    sig.values = std::move(ts.values);
    return sig;
}

} // namespace qjump
