#pragma once

// Dense scan-and-bisect root finder for the adiabatic density flow; the
// independent oracle checked against fixed_points().

#include <cmath>
#include <vector>

#include "qjump/two_level.hpp"

namespace qjump::testsupport {

inline std::vector<double> brute_force_roots(const TwoLevelParams& p, double delta,
                                             int grid) {
    auto f = [&](double n) { return adiabatic_rhs(n, delta, p); };
    std::vector<double> roots;
    double prev = f(0.0);
    if (prev == 0.0) roots.push_back(0.0);
    for (int i = 1; i <= grid; ++i) {
        double n = static_cast<double>(i) / grid;
        double fn = f(n);
        if (fn == 0.0) {
            roots.push_back(n);
        } else if (prev != 0.0 && std::signbit(fn) != std::signbit(prev)) {
            double lo = static_cast<double>(i - 1) / grid, hi = n, flo = prev;
            while (hi - lo > 1e-14) {
                double mid = 0.5 * (lo + hi);
                double fm = f(mid);
                if (fm == 0.0) {
                    lo = hi = mid;
                } else if (std::signbit(fm) == std::signbit(flo)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            roots.push_back(0.5 * (lo + hi));
        }
        prev = fn;
    }
    return roots;
}

} // namespace qjump::testsupport
