#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "qjump/rng.hpp"
#include "qjump/two_level.hpp"
#include "../support/root_scan.hpp"

using namespace qjump;
using testsupport::brute_force_roots;

TEST_CASE("modulated detuning") {
    TwoLevelParams p;
    p.Delta = 18.5;
    p.A = 3.0;
    p.delta_f = 0.01;
    REQUIRE(modulated_detuning(0.0, p) == Catch::Approx(15.5));
    REQUIRE(modulated_detuning(50.0, p) == Catch::Approx(21.5)); // t = T/2
    p.A = 0.0;
    for (double t : {0.0, 17.3, 400.0}) REQUIRE(modulated_detuning(t, p) == 18.5);
}

TEST_CASE("full mean-field equations") {
    TwoLevelParams p;

    SECTION("empty state is driven through the coherence") {
        TwoLevelState d = full_rhs(0.0, {0.0, {0.0, 0.0}}, p, 0.0);
        REQUIRE(d.n == 0.0);
        REQUIRE(d.q == cxd(0.0, 0.5 * p.Omega));
    }
    SECTION("undriven density decays") {
        TwoLevelParams p0 = p;
        p0.Omega = 0.0;
        TwoLevelState d = full_rhs(0.0, {0.3, {0.1, -0.2}}, p0, 0.0);
        REQUIRE(d.n == Catch::Approx(-p0.gamma * 0.3));
    }
    SECTION("q-nullcline reduces the density flow to the adiabatic form") {
        for (double n : {0.05, 0.2, 0.5, 0.8}) {
            for (double delta : {5.0, 16.0, 18.5, 23.0, 30.0}) {
                cxd qstar = cxd(0.0, p.Omega * (0.5 - n)) /
                            cxd(p.Gamma(), delta - n * p.V);
                TwoLevelParams pd = p;
                pd.Delta = delta;
                TwoLevelState d = full_rhs(0.0, {n, qstar}, pd, 0.0);
                REQUIRE(d.n == Catch::Approx(adiabatic_rhs(n, delta, p)).margin(1e-12));
            }
        }
    }
}

TEST_CASE("adiabatic density flow") {
    TwoLevelParams p;

    SECTION("trivial values") {
        TwoLevelParams p0 = p;
        p0.Omega = 0.0;
        REQUIRE(adiabatic_rhs(0.0, 18.5, p0) == 0.0);
        REQUIRE(adiabatic_rhs(0.5, 18.5, p) == Catch::Approx(-0.5 * p.gamma));
    }
    SECTION("bistable parameters have three sign changes") {
        int changes = 0;
        double prev = adiabatic_rhs(0.0, 18.5, p);
        for (int i = 1; i <= 2000; ++i) {
            double f = adiabatic_rhs(i / 2000.0, 18.5, p);
            if (std::signbit(f) != std::signbit(prev)) ++changes;
            prev = f;
        }
        REQUIRE(changes == 3);
    }
}

TEST_CASE("effective potential") {
    TwoLevelParams p;

    SECTION("gradient identity: -dE/dn equals the adiabatic flow") {
        const double h = 1e-6;
        for (double delta : {16.0, 18.5, 23.0}) {
            for (int i = 1; i < 99; ++i) {
                double n = i / 100.0;
                double grad =
                    (potential(n + h, delta, p) - potential(n - h, delta, p)) / (2.0 * h);
                REQUIRE(grad + adiabatic_rhs(n, delta, p) == Catch::Approx(0.0).margin(1e-8));
            }
        }
    }
    SECTION("Delta = 16: single minimum at high density") {
        std::vector<double> minima;
        for (int i = 1; i < 999; ++i) {
            double n0 = (i - 1) / 1000.0, n1 = i / 1000.0, n2 = (i + 1) / 1000.0;
            if (potential(n1, 16.0, p) < potential(n0, 16.0, p) &&
                potential(n1, 16.0, p) < potential(n2, 16.0, p))
                minima.push_back(n1);
        }
        REQUIRE(minima.size() == 1);
        REQUIRE(minima[0] > 0.15);
    }
    SECTION("Delta = 23: single minimum at low density") {
        std::vector<double> minima;
        for (int i = 1; i < 999; ++i) {
            double n0 = (i - 1) / 1000.0, n1 = i / 1000.0, n2 = (i + 1) / 1000.0;
            if (potential(n1, 23.0, p) < potential(n0, 23.0, p) &&
                potential(n1, 23.0, p) < potential(n2, 23.0, p))
                minima.push_back(n1);
        }
        REQUIRE(minima.size() == 1);
        REQUIRE(minima[0] < 0.05);
    }
    SECTION("V = 0 is rejected") {
        TwoLevelParams p0 = p;
        p0.V = 0.0;
        REQUIRE_THROWS_AS(potential(0.5, 18.5, p0), DegenerateInteraction);
    }
}

TEST_CASE("fixed points") {
    TwoLevelParams p;

    SECTION("Omega = 0: single stable root at zero") {
        TwoLevelParams p0 = p;
        p0.Omega = 0.0;
        FixedPointSet fps = fixed_points(p0, 18.5);
        REQUIRE(fps.roots.size() == 1);
        REQUIRE(fps.roots[0].n == 0.0);
        REQUIRE(fps.roots[0].stability == RootStability::stable);
    }
    SECTION("marked bistable point has 3 roots, 2 stable") {
        FixedPointSet fps = fixed_points(p, 18.5);
        REQUIRE(fps.roots.size() == 3);
        REQUIRE(fps.stable_count() == 2);
        REQUIRE(fps.roots[0].stability == RootStability::stable);
        REQUIRE(fps.roots[1].stability == RootStability::unstable);
        REQUIRE(fps.roots[2].stability == RootStability::stable);
    }
    SECTION("roots match the dense brute-force oracle") {
        for (double delta : {15.0, 16.0, 17.5, 18.5, 20.0, 21.0, 23.0}) {
            FixedPointSet fps = fixed_points(p, delta);
            std::vector<double> oracle = brute_force_roots(p, delta, 100000);
            REQUIRE(fps.roots.size() == oracle.size());
            for (std::size_t i = 0; i < oracle.size(); ++i)
                REQUIRE(fps.roots[i].n == Catch::Approx(oracle[i]).margin(1e-8));
        }
    }
    SECTION("residual at every root is tiny") {
        for (double delta : {16.0, 18.5, 23.0}) {
            for (const auto& r : fixed_points(p, delta).roots)
                REQUIRE(std::abs(adiabatic_rhs(r.n, delta, p)) < 1e-10);
        }
    }
    SECTION("root count is odd for random parameters") {
        RngStream rng(5, 0);
        for (int trial = 0; trial < 200; ++trial) {
            TwoLevelParams q = p;
            q.Omega = 0.2 + 3.8 * rng.uniform();
            q.V = 10.0 + 190.0 * rng.uniform();
            q.gamma_D = 20.0 * rng.uniform();
            double delta = 40.0 * rng.uniform() - 5.0;
            REQUIRE(fixed_points(q, delta).roots.size() % 2 == 1);
        }
    }
}

TEST_CASE("stability classification at a degenerate derivative") {
    REQUIRE(classify_stability(-0.5) == RootStability::stable);
    REQUIRE(classify_stability(0.5) == RootStability::unstable);
    REQUIRE(classify_stability(1e-9) == RootStability::marginal);
    REQUIRE(classify_stability(-1e-9) == RootStability::marginal);
}

TEST_CASE("phase diagram") {
    TwoLevelParams p;

    SECTION("marked points classify as in the reference diagram") {
        PhaseDiagram pd = phase_diagram({16.0, 18.5, 23.0}, {2.0}, p);
        REQUIRE(pd.at(0, 0) == 1);
        REQUIRE(pd.at(1, 0) == 2);
        REQUIRE(pd.at(2, 0) == 1);
    }
    SECTION("vanishing drive leaves one phase everywhere") {
        PhaseDiagram pd = phase_diagram({14.0, 18.5, 25.0}, {1e-4}, p);
        for (int c : pd.stable_counts) REQUIRE(c == 1);
    }
    SECTION("single bistable window along the Delta slice at Omega = 2") {
        std::vector<double> deltas;
        for (int i = 0; i <= 110; ++i) deltas.push_back(14.0 + 0.1 * i);
        PhaseDiagram pd = phase_diagram(deltas, {2.0}, p);
        // pattern must be 1...2...1 with exactly one contiguous 2-run
        int transitions = 0;
        for (std::size_t i = 1; i < deltas.size(); ++i)
            if (pd.at(i, 0) != pd.at(i - 1, 0)) ++transitions;
        REQUIRE(pd.at(0, 0) == 1);
        REQUIRE(pd.at(deltas.size() - 1, 0) == 1);
        REQUIRE(transitions == 2);
        // the window brackets the star point and sits inside (16, 23)
        bool star_bistable = false;
        for (std::size_t i = 0; i < deltas.size(); ++i)
            if (std::abs(deltas[i] - 18.5) < 0.05 && pd.at(i, 0) == 2) star_bistable = true;
        REQUIRE(star_bistable);
    }
    SECTION("empty grid is rejected") {
        REQUIRE_THROWS_AS(phase_diagram({}, {2.0}, p), OutOfRangeError);
    }
}

TEST_CASE("deterministic relaxation to a stable root") {
    TwoLevelParams p;
    p.D = 0.0;
    p.A = 0.0;
    p.t_total = 400.0;
    Trajectory traj = integrate_stochastic_two_level(p, 1, 1.0);
    FixedPointSet fps = fixed_points(p, p.Delta);
    // started from the low root, must stay on it
    REQUIRE(traj.values.back() == Catch::Approx(fps.roots.front().n).margin(1e-8));
}

TEST_CASE("stochastic telegraph dynamics stays in [0,1] and is reproducible") {
    TwoLevelParams p;
    p.t_total = 2000.0;
    Trajectory a = integrate_stochastic_two_level(p, derive_seed(1, 0), 0.5);
    Trajectory b = integrate_stochastic_two_level(p, derive_seed(1, 0), 0.5);
    REQUIRE(a.values == b.values);
    REQUIRE(a.min_value >= 0.0);
    REQUIRE(a.max_value <= 1.0);

    auto ens1 = run_ensemble_two_level(p, 2, 9, 0.5, 1);
    auto ens2 = run_ensemble_two_level(p, 2, 9, 0.5, 2);
    REQUIRE(ens1[0].values == ens2[0].values);
    REQUIRE(ens1[1].values == ens2[1].values);
    REQUIRE(ens1[0].values != ens1[1].values);
}

TEST_CASE("full model relaxes onto the adiabatic fixed points") {
    TwoLevelParams p; // gamma_D = 10: strong dephasing
    FixedPointSet fps = fixed_points(p, 18.5);
    REQUIRE(fps.roots.size() == 3);

    TwoLevelState low = integrate_full_two_level(p, {0.01, {0.0, 0.0}}, 500.0);
    REQUIRE(low.n == Catch::Approx(fps.roots[0].n).margin(1e-4));
    REQUIRE(std::abs(low.q) <= 0.5 + 1e-9);

    TwoLevelState high = integrate_full_two_level(p, {0.35, {0.0, 0.0}}, 500.0);
    REQUIRE(high.n == Catch::Approx(fps.roots[2].n).margin(1e-4));
    REQUIRE(std::abs(high.q) <= 0.5 + 1e-9);
}

TEST_CASE("initial density picks the lowest stable root") {
    TwoLevelParams p;
    REQUIRE(initial_density(p) == Catch::Approx(fixed_points(p, 18.5).roots[0].n));
    // with modulation the t=0 detuning is Delta - A = 15.5: only the high root
    TwoLevelParams pm = p;
    pm.A = 3.0;
    pm.delta_f = 0.01;
    FixedPointSet at_t0 = fixed_points(pm, 15.5);
    REQUIRE(at_t0.stable_count() == 1);
    REQUIRE(initial_density(pm) == Catch::Approx(at_t0.roots.front().n));
}
