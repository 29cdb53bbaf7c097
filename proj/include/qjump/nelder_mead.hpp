#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <vector>

namespace qjump {

struct NelderMeadOptions {
    int max_iter = 4000;
    double stagnation_tol = 1e-10; // relative best-value improvement ...
    int stagnation_window = 0;     // ... over this many iterations (0 = 2 * dim)
};

struct NelderMeadResult {
    std::vector<double> x;
    double fval = std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool converged = false;
};

// Derivative-free simplex descent (standard reflect / expand / contract /
// shrink coefficients). Chosen over gradient methods because some objectives
// here have non-smooth seams (Heaviside latency edges).
template <class Fn>
NelderMeadResult nelder_mead(Fn&& f, const std::vector<double>& x0,
                             const std::vector<double>& initial_step,
                             const NelderMeadOptions& opts = {}) {
    const std::size_t dim = x0.size();
    const int window = opts.stagnation_window > 0 ? opts.stagnation_window
                                                  : static_cast<int>(2 * dim);

    struct Vertex {
        std::vector<double> x;
        double f;
    };
    std::vector<Vertex> simplex;
    simplex.reserve(dim + 1);
    simplex.push_back({x0, f(x0)});
    for (std::size_t i = 0; i < dim; ++i) {
        std::vector<double> x = x0;
        x[i] += initial_step[i] != 0.0 ? initial_step[i] : 1e-3;
        simplex.push_back({x, f(x)});
    }

    auto order = [&]() {
        std::sort(simplex.begin(), simplex.end(),
                  [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
    };
    order();

    std::deque<double> best_history{simplex.front().f};
    NelderMeadResult res;
    res.x = simplex.front().x;
    res.fval = simplex.front().f;

    for (int iter = 0; iter < opts.max_iter; ++iter) {
        res.iterations = iter + 1;

        // centroid of all but the worst vertex
        std::vector<double> centroid(dim, 0.0);
        for (std::size_t v = 0; v < dim; ++v)
            for (std::size_t i = 0; i < dim; ++i) centroid[i] += simplex[v].x[i];
        for (auto& c : centroid) c /= static_cast<double>(dim);

        const Vertex& worst = simplex.back();
        auto blend = [&](double coef) {
            std::vector<double> x(dim);
            for (std::size_t i = 0; i < dim; ++i)
                x[i] = centroid[i] + coef * (centroid[i] - worst.x[i]);
            return x;
        };

        std::vector<double> xr = blend(1.0);
        double fr = f(xr);

        if (fr < simplex.front().f) {
            std::vector<double> xe = blend(2.0);
            double fe = f(xe);
            simplex.back() = fe < fr ? Vertex{xe, fe} : Vertex{xr, fr};
        } else if (fr < simplex[dim - 1].f) {
            simplex.back() = {xr, fr};
        } else {
            bool outside = fr < worst.f;
            std::vector<double> xc = blend(outside ? 0.5 : -0.5);
            double fc = f(xc);
            if (fc < (outside ? fr : worst.f)) {
                simplex.back() = {xc, fc};
            } else {
                // shrink toward the best vertex
                for (std::size_t v = 1; v <= dim; ++v) {
                    for (std::size_t i = 0; i < dim; ++i)
                        simplex[v].x[i] =
                            simplex[0].x[i] + 0.5 * (simplex[v].x[i] - simplex[0].x[i]);
                    simplex[v].f = f(simplex[v].x);
                }
            }
        }
        order();

        double best = simplex.front().f;
        best_history.push_back(best);
        if (static_cast<int>(best_history.size()) > window + 1) best_history.pop_front();
        if (static_cast<int>(best_history.size()) == window + 1) {
            double old = best_history.front();
            double scale = std::abs(best) + 1e-300;
            if ((old - best) / scale < opts.stagnation_tol) {
                res.converged = true;
                break;
            }
        }
    }

    res.x = simplex.front().x;
    res.fval = simplex.front().f;
    return res;
}

} // namespace qjump
