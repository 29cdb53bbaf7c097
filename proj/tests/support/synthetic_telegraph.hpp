#pragma once

// Synthetic two-level telegraph signals with known transition times, used as
// the ground-truth oracle for the jump-detection pipeline.

#include <vector>

#include "qjump/jump_analysis.hpp"
#include "qjump/rng.hpp"

namespace qjump::testsupport {

struct SyntheticTelegraph {
    TimeSeries series;              // starts LOW at level 0, levels {0, 1}
    std::vector<double> up_times;   // true low->high switch times
    std::vector<double> down_times; // true high->low switch times
};

// Alternating dwells drawn uniformly from [min_dwell, max_dwell]; optional
// uniform noise of the given amplitude on every sample. No switches are
// placed within `end_guard` of t_end, so a trailing transition cannot be cut
// off mid-way (a filtered trace needs several samples to cross the band).
inline SyntheticTelegraph make_telegraph(RngStream& rng, double t_end, double dt,
                                         double min_dwell, double max_dwell,
                                         double noise_amplitude = 0.0,
                                         double end_guard = 0.0) {
    SyntheticTelegraph out;
    std::vector<double> switch_times;
    double t = 0.0;
    for (;;) {
        t += min_dwell + (max_dwell - min_dwell) * rng.uniform();
        if (t >= t_end - end_guard) break;
        switch_times.push_back(t);
    }
    for (std::size_t i = 0; i < switch_times.size(); ++i)
        (i % 2 == 0 ? out.up_times : out.down_times).push_back(switch_times[i]);

    auto n = static_cast<std::size_t>(t_end / dt) + 1;
    out.series.times.reserve(n);
    out.series.values.reserve(n);
    std::size_t next_switch = 0;
    int level = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double ti = static_cast<double>(i) * dt;
        while (next_switch < switch_times.size() && switch_times[next_switch] <= ti) {
            level ^= 1;
            ++next_switch;
        }
        double v = static_cast<double>(level);
        if (noise_amplitude > 0.0) v += noise_amplitude * (2.0 * rng.uniform() - 1.0);
        out.series.times.push_back(ti);
        out.series.values.push_back(v);
    }
    return out;
}

} // namespace qjump::testsupport
