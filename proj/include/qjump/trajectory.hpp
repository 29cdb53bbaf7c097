#pragma once

#include <cstdint>
#include <vector>

namespace qjump {

// Sampled observable along one simulated run: uniformly spaced times and the
// recorded value (n_R for the three-level model, n for the two-level one).
struct Trajectory {
    std::vector<double> times;
    std::vector<double> values;
    std::uint64_t seed = 0;

    // Integration diagnostics, recorded at the sampling times.
    double max_trace_error = 0.0;      // max |Tr rho - 1|            (three-level)
    double max_hermiticity_error = 0.0;
    double min_eigenvalue = 1.0;       // soft positivity monitor     (three-level)
    double min_value = 0.0;
    double max_value = 0.0;

    std::size_t size() const { return times.size(); }
};

// Deterministic parallel ensemble helper lives in ensemble.hpp.

} // namespace qjump
