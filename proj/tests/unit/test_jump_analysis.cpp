#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "qjump/jump_analysis.hpp"
#include "qjump/rng.hpp"
#include "../support/synthetic_telegraph.hpp"

using namespace qjump;
using testsupport::make_telegraph;

namespace {

TimeSeries uniform_series(double dt, const std::vector<double>& values) {
    TimeSeries ts;
    for (std::size_t i = 0; i < values.size(); ++i) {
        ts.times.push_back(static_cast<double>(i) * dt);
        ts.values.push_back(values[i]);
    }
    return ts;
}

TimeSeries square_wave(double period, double dt, double t_end) {
    TimeSeries ts;
    for (double t = 0.0; t <= t_end; t += dt) {
        ts.times.push_back(t);
        ts.values.push_back(std::fmod(t, period) < 0.5 * period ? 0.0 : 1.0);
    }
    return ts;
}

} // namespace

TEST_CASE("low-pass filter") {
    SECTION("tau = 0 is the identity") {
        TimeSeries ts = uniform_series(0.1, {0.0, 1.0, -0.5, 2.0});
        TimeSeries out = low_pass(ts, 0.0);
        REQUIRE(out.values == ts.values);
    }
    SECTION("constant signals pass unchanged") {
        TimeSeries ts = uniform_series(0.1, std::vector<double>(100, 0.7));
        TimeSeries out = low_pass(ts, 3.0);
        for (double v : out.values) REQUIRE(v == Catch::Approx(0.7).epsilon(1e-12));
    }
    SECTION("unit step reaches 1 - 1/e one time constant after the edge") {
        const double tau = 1.0, dt = tau / 100.0;
        TimeSeries ts;
        for (double t = -2.0; t <= 4.0; t += dt) {
            ts.times.push_back(t);
            ts.values.push_back(t >= 0.0 ? 1.0 : 0.0);
        }
        TimeSeries out = low_pass(ts, tau);
        double at_tau = 0.0;
        for (std::size_t i = 0; i < out.size(); ++i)
            if (std::abs(out.times[i] - tau) < 0.5 * dt) at_tau = out.values[i];
        REQUIRE(at_tau == Catch::Approx(1.0 - std::exp(-1.0)).epsilon(0.02));
    }
}

TEST_CASE("linear resampling") {
    SECTION("resampling onto the original grid is exact") {
        RngStream rng(4, 0);
        TimeSeries ts;
        for (int i = 0; i < 50; ++i) {
            ts.times.push_back(0.25 * i);
            ts.values.push_back(rng.normal());
        }
        TimeSeries out = resample_linear(ts, 0.25);
        REQUIRE(out.times.size() == ts.times.size());
        REQUIRE(out.values == ts.values);
    }
    SECTION("midpoint of two samples") {
        TimeSeries ts = uniform_series(1.0, {0.0, 1.0});
        TimeSeries out = resample_linear(ts, 0.5);
        REQUIRE(out.values.size() == 3);
        REQUIRE(out.values[1] == Catch::Approx(0.5));
    }
    SECTION("output stays within the input range") {
        RngStream rng(8, 0);
        TimeSeries ts;
        double t = 0.0;
        for (int i = 0; i < 200; ++i) {
            t += 0.05 + 0.2 * rng.uniform(); // non-uniform grid
            ts.times.push_back(t);
            ts.values.push_back(rng.normal());
        }
        double lo = *std::min_element(ts.values.begin(), ts.values.end());
        double hi = *std::max_element(ts.values.begin(), ts.values.end());
        TimeSeries out = resample_linear(ts, 0.037);
        for (double v : out.values) {
            REQUIRE(v >= lo);
            REQUIRE(v <= hi);
        }
    }
    SECTION("empty input throws") {
        REQUIRE_THROWS_AS(resample_linear(TimeSeries{}, 0.5), EmptySeries);
    }
}

TEST_CASE("auto threshold splits a bimodal distribution") {
    RngStream rng(13, 0);
    std::vector<double> values;
    for (int i = 0; i < 4000; ++i) values.push_back(0.04 + 0.005 * rng.normal());
    for (int i = 0; i < 2000; ++i) values.push_back(0.20 + 0.005 * rng.normal());
    AutoThreshold at = auto_threshold(values);
    REQUIRE(at.low_mean == Catch::Approx(0.04).margin(0.005));
    REQUIRE(at.high_mean == Catch::Approx(0.20).margin(0.005));
    REQUIRE(at.mu == Catch::Approx(0.12).margin(0.01));
    REQUIRE(at.alpha == Catch::Approx(0.016).margin(0.004));
}

TEST_CASE("jump detection") {
    SECTION("square wave: upward events spaced by the period") {
        const double period = 10.0, dt = 0.05;
        TimeSeries ts = square_wave(period, dt, 100.0);
        JumpEvents ev = detect_jumps(ts, {0.5, 0.1, 0.0});
        REQUIRE(ev.up_times.size() >= 8);
        auto iv = upward_intervals(ev);
        for (double d : iv) REQUIRE(d == Catch::Approx(period).margin(dt));
    }
    SECTION("ramp that stalls inside the band yields no events") {
        TimeSeries ts;
        for (int i = 0; i <= 100; ++i) {
            ts.times.push_back(i * 0.1);
            // rises from 0 to just above mu - alpha, never past mu + alpha
            ts.values.push_back(0.45 * i / 100.0);
        }
        JumpEvents ev = detect_jumps(ts, {0.5, 0.1, 0.0});
        REQUIRE(ev.up_times.empty());
        REQUIRE(ev.down_times.empty());
    }
    SECTION("synthetic telegraph with sub-band noise: counts exact, times close") {
        RngStream rng(77, 0);
        const double dt = 0.02, alpha = 0.15;
        auto synth = make_telegraph(rng, 500.0, dt, 3.0, 12.0, 0.4 * alpha);
        JumpEvents ev = detect_jumps(synth.series, {0.5, alpha, 0.0});
        REQUIRE(ev.up_times.size() == synth.up_times.size());
        REQUIRE(ev.down_times.size() == synth.down_times.size());
        for (std::size_t i = 0; i < ev.up_times.size(); ++i)
            REQUIRE(std::abs(ev.up_times[i] - synth.up_times[i]) <= dt + 1e-12);
    }
    SECTION("alternation holds for arbitrary noisy inputs") {
        RngStream rng(31, 0);
        for (int trial = 0; trial < 50; ++trial) {
            TimeSeries ts;
            double v = rng.normal();
            for (int i = 0; i < 400; ++i) {
                ts.times.push_back(i * 0.1);
                v += 0.3 * rng.normal();
                ts.values.push_back(v);
            }
            JumpEvents ev = detect_jumps(ts, {0.0, 0.4, 0.0});
            // merge and check strict alternation
            std::vector<std::pair<double, int>> merged;
            for (double t : ev.up_times) merged.push_back({t, +1});
            for (double t : ev.down_times) merged.push_back({t, -1});
            std::sort(merged.begin(), merged.end());
            for (std::size_t i = 1; i < merged.size(); ++i)
                REQUIRE(merged[i].second != merged[i - 1].second);
        }
    }
    SECTION("hysteresis is idempotent under sub-alpha/2 noise") {
        RngStream rng(99, 0);
        const double dt = 0.02, alpha = 0.2;
        auto clean = make_telegraph(rng, 300.0, dt, 2.0, 10.0, 0.0);
        JumpEvents base = detect_jumps(clean.series, {0.5, alpha, 0.0});
        for (int trial = 0; trial < 5; ++trial) {
            TimeSeries noisy = clean.series;
            for (auto& v : noisy.values) v += 0.49 * alpha * (2.0 * rng.uniform() - 1.0);
            JumpEvents ev = detect_jumps(noisy, {0.5, alpha, 0.0});
            REQUIRE(ev.up_times.size() == base.up_times.size());
            REQUIRE(ev.down_times.size() == base.down_times.size());
        }
    }
}

TEST_CASE("upward intervals") {
    JumpEvents ev;
    ev.up_times = {1.0, 4.0, 9.0};
    auto iv = upward_intervals(ev);
    REQUIRE(iv == std::vector<double>{3.0, 5.0});

    JumpEvents single;
    single.up_times = {2.0};
    REQUIRE(upward_intervals(single).empty());
    REQUIRE(upward_intervals(JumpEvents{}).empty());
}

TEST_CASE("interval histogram") {
    SECTION("direct binning") {
        IntervalHistogram h = build_histogram({1.0, 1.1, 2.9}, 1.0);
        REQUIRE(h.counts.size() == 3);
        REQUIRE(h.counts[0] == 0);
        REQUIRE(h.counts[1] == 2);
        REQUIRE(h.counts[2] == 1);
        REQUIRE(h.total() == 3);
    }
    SECTION("empty input") {
        IntervalHistogram h = build_histogram(std::vector<double>{}, 1.0);
        REQUIRE(h.total() == 0);
        for (auto c : h.counts) REQUIRE(c == 0);
    }
    SECTION("count conservation for random inputs") {
        RngStream rng(55, 0);
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<double> deltas;
            auto n = static_cast<std::size_t>(1 + 200 * rng.uniform());
            for (std::size_t i = 0; i < n; ++i) deltas.push_back(50.0 * rng.uniform());
            IntervalHistogram h = build_histogram(deltas, 0.5 + 2.0 * rng.uniform());
            REQUIRE(h.total() == deltas.size());
        }
    }
    SECTION("pooling sums counts in trajectory order") {
        std::vector<std::vector<double>> pool = {{1.0, 2.5}, {1.2}, {2.6, 2.7}};
        IntervalHistogram h = build_histogram(pool, 1.0);
        REQUIRE(h.total() == 5);
        REQUIRE(h.counts[1] == 2);
        REQUIRE(h.counts[2] == 3);
    }
}

TEST_CASE("contrast") {
    const double T = 10.0;
    auto hist_with = [&](std::vector<std::uint64_t> counts) {
        IntervalHistogram h;
        h.bin_width = T / 20.0;
        h.counts = std::move(counts);
        return h;
    };

    SECTION("delta spikes at T and 2T with empty valley: C = 1") {
        std::vector<std::uint64_t> c(60, 0);
        c[20] = 50; // center 10.25 ~ T
        c[40] = 30; // center 20.25 ~ 2T
        REQUIRE(contrast(hist_with(c), T) == Catch::Approx(1.0));
    }
    SECTION("flat histogram: C = 0") {
        std::vector<std::uint64_t> c(60, 7);
        REQUIRE(contrast(hist_with(c), T) == Catch::Approx(0.0));
    }
    SECTION("peak 100 with valley floor 50: C = 0.5") {
        std::vector<std::uint64_t> c(60, 0);
        c[20] = 80;
        for (std::size_t i = 21; i < 40; ++i) c[i] = 50;
        c[40] = 100;
        REQUIRE(contrast(hist_with(c), T) == Catch::Approx(0.5));
    }
    SECTION("no counts in the second window throws") {
        std::vector<std::uint64_t> c(60, 0);
        c[20] = 50;
        REQUIRE_THROWS_AS(contrast(hist_with(c), T), NoSecondPeak);
    }
    SECTION("histogram too short throws") {
        std::vector<std::uint64_t> c(30, 1);
        REQUIRE_THROWS_AS(contrast(hist_with(c), T), NoSecondPeak);
    }
    SECTION("contrast is within [0, 1] for random histograms") {
        RngStream rng(3, 0);
        for (int trial = 0; trial < 200; ++trial) {
            std::vector<std::uint64_t> c(60);
            for (auto& x : c) x = static_cast<std::uint64_t>(100.0 * rng.uniform());
            try {
                double C = contrast(hist_with(c), T);
                REQUIRE(C >= 0.0);
                REQUIRE(C <= 1.0);
            } catch (const NoSecondPeak&) {
                // acceptable outcome for degenerate draws
            }
        }
    }
}

TEST_CASE("optimum detuning scan") {
    const double T = 100.0;

    SECTION("stub runner: only one detuning emits 2T intervals") {
        auto runner = [&](double delta) {
            if (delta == -4.0) return std::vector<double>{2.0 * T, 2.0 * T, 2.0 * T};
            return std::vector<double>{0.5 * T};
        };
        DetuningScanResult res = optimum_detuning_scan(runner, {-5.0, -4.0, -3.0}, T);
        REQUIRE(res.best_delta == -4.0);
        REQUIRE(res.window_counts.size() == 3);
        REQUIRE(res.window_counts[1].second == 3);
    }
    SECTION("ties prefer the smaller |Delta|") {
        auto runner = [&](double) { return std::vector<double>{2.0 * T}; };
        DetuningScanResult res = optimum_detuning_scan(runner, {-5.0, -2.0, 4.0}, T);
        REQUIRE(res.best_delta == -2.0);
    }
    SECTION("no intervals anywhere in the window") {
        auto runner = [&](double) { return std::vector<double>{0.1 * T}; };
        REQUIRE_THROWS_AS(optimum_detuning_scan(runner, {-5.0, -4.0}, T), AllZeroCounts);
    }
}
