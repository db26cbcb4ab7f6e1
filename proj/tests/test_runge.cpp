#include <doctest.h>

#include <cmath>
#include <random>

#include "fracwave/runge.hpp"

using namespace fracwave;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

double u01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

SolveConfig make_cfg(double T, int n_steps) {
    SolveConfig cfg;
    cfg.time = {T, n_steps};
    return cfg;
}

TimeSeriesField random_series(const BasisPtr& b, const TimeGrid& time, std::mt19937_64& rng) {
    TimeSeriesField u = TimeSeriesField::zeros(b, time);
    for (double& v : u.data) v = 2.0 * u01(rng) - 1.0;
    return u;
}

} // namespace

TEST_CASE("forward and adjoint restriction basics") {
    auto b = build_basis({1, {kPi, 0.0}, {24, 1}});
    SolveConfig cfg = make_cfg(2.0, 128);
    MeasurementWindow W{{0, 0}, {6, 1}};
    const FractionalOrder s{0.5};

    SUBCASE("zero maps to zero both ways") {
        TimeSeriesField z = TimeSeriesField::zeros(b, cfg.time);
        for (double v : forward_restriction(z, W, s, cfg).data) CHECK(v == 0.0);
        for (double v : adjoint_restriction(z, W, s, cfg).data) CHECK(v == 0.0);
    }
    SUBCASE("forward restriction is linear") {
        std::mt19937_64 rng(3);
        TimeSeriesField f1 = random_series(b, cfg.time, rng);
        TimeSeriesField f2 = random_series(b, cfg.time, rng);
        TimeSeriesField lhs = forward_restriction(lincomb(1.5, f1, -0.75, f2), W, s, cfg);
        TimeSeriesField rhs = lincomb(1.5, forward_restriction(f1, W, s, cfg), -0.75,
                                      forward_restriction(f2, W, s, cfg));
        CHECK(space_time_norm(lincomb(1.0, lhs, -1.0, rhs)) <=
              1e-10 * std::max(1.0, space_time_norm(rhs)));
    }
    SUBCASE("a single bump reaches the far side of the domain") {
        TimeSeriesField f =
            source_bump({{0.4, 0.0}, {0.2, 0.1}, 0.4, 0.2, 1.0}, b, cfg.time, &W);
        TimeSeriesField u = forward_restriction(f, W, s, cfg);
        // look at the grid values on the right half at late times
        std::vector<double> grid(24);
        double far = 0.0;
        for (int n = cfg.time.n_steps / 2; n < cfg.time.n_steps; ++n) {
            b->synthesize(u.snapshot(n), grid);
            for (int j = 12; j < 24; ++j) far = std::max(far, std::abs(grid[j]));
        }
        CHECK(far > 1e-4);
    }
    SUBCASE("adjoint identity holds for 10 random pairs") {
        std::mt19937_64 rng(7);
        for (int trial = 0; trial < 10; ++trial) {
            TimeSeriesField f = random_series(b, cfg.time, rng);
            TimeSeriesField g = random_series(b, cfg.time, rng);
            const double a = space_time_inner(forward_restriction(f, W, s, cfg), g);
            const double c = space_time_inner(f, adjoint_restriction(g, W, s, cfg));
            const double scale = space_time_norm(f) * space_time_norm(g);
            CHECK(std::abs(a - c) <= 1e-8 * scale);
        }
    }
}

TEST_CASE("design_source") {
    auto b = build_basis({1, {kPi, 0.0}, {24, 1}});
    SolveConfig cfg = make_cfg(2.0, 128);
    MeasurementWindow W{{0, 0}, {6, 1}};
    const FractionalOrder s{0.5};

    SUBCASE("zero target gives the zero source") {
        RungeProblem p{TimeSeriesField::zeros(b, cfg.time), W, 1e-4, 50, 1e-8};
        RungeSolution sol = design_source(p, s, cfg);
        for (double v : sol.f.data) CHECK(v == 0.0);
        CHECK(sol.converged);
    }
    SUBCASE("targets with mass on W are rejected") {
        std::mt19937_64 rng(5);
        RungeProblem p{random_series(b, cfg.time, rng), W, 1e-4, 50, 1e-8};
        CHECK_THROWS_AS(design_source(p, s, cfg), ConfigError);
    }
    SUBCASE("inverse crime: a reachable target is matched closely") {
        TimeSeriesField f0 =
            source_bump({{0.4, 0.0}, {0.2, 0.1}, 0.7, 0.35, 1.0}, b, cfg.time, &W);
        TimeSeriesField g = forward_restriction(f0, W, s, cfg);
        RungeProblem p{g, W, 1e-10, 500, 1e-12};
        RungeSolution sol = design_source(p, s, cfg);
        CHECK(sol.final_relative_residual <= 1e-4);
    }
    SUBCASE("Tikhonov optimality at the returned iterate") {
        TimeSeriesField f0 =
            source_bump({{0.4, 0.0}, {0.2, 0.1}, 0.7, 0.35, 1.0}, b, cfg.time, &W);
        TimeSeriesField g = forward_restriction(f0, W, s, cfg);
        const double alpha = 1e-4;
        RungeProblem p{g, W, alpha, 400, 1e-10};
        RungeSolution sol = design_source(p, s, cfg);
        CHECK(sol.converged);
        TimeSeriesField rhs = adjoint_restriction(g, W, s, cfg);
        TimeSeriesField lhs = lincomb(
            1.0, adjoint_restriction(forward_restriction(sol.f, W, s, cfg), W, s, cfg), alpha, sol.f);
        CHECK(space_time_norm(lincomb(1.0, lhs, -1.0, rhs)) <= 1e-10 * space_time_norm(rhs) * 10.0);
    }
    SUBCASE("mask idempotence of the designed source") {
        TimeSeriesField f0 =
            source_bump({{0.4, 0.0}, {0.2, 0.1}, 0.7, 0.35, 1.0}, b, cfg.time, &W);
        TimeSeriesField g = forward_restriction(f0, W, s, cfg);
        RungeProblem p{g, W, 1e-6, 100, 1e-8};
        RungeSolution sol = design_source(p, s, cfg);
        TimeSeriesField remasked = mask_to_window(sol.f, W);
        CHECK(space_time_norm(lincomb(1.0, remasked, -1.0, sol.f)) <=
              1e-12 * std::max(1.0, space_time_norm(sol.f)));
    }
    SUBCASE("residual is non-increasing along a decreasing alpha schedule") {
        // smooth target not in the range: constant 1 off W
        TimeSeriesField ones = TimeSeriesField::zeros(b, cfg.time);
        std::vector<double> grid(24, 1.0);
        for (int n = 0; n <= cfg.time.n_steps; ++n) b->analyze(grid, ones.snapshot(n));
        TimeSeriesField target = mask_to_complement(ones, W);
        double prev = 1e300;
        for (double alpha : {1e-2, 1e-4, 1e-6}) {
            RungeProblem p{target, W, alpha, 120, 1e-10};
            RungeSolution sol = design_source(p, s, cfg);
            CHECK(sol.final_relative_residual <= prev + 1e-12);
            prev = sol.final_relative_residual;
        }
    }
}

TEST_CASE("runge_pair_for_inversion") {
    auto b = build_basis({1, {kPi, 0.0}, {24, 1}});
    SolveConfig cfg = make_cfg(2.0, 128);
    MeasurementWindow W{{0, 0}, {6, 1}};
    const FractionalOrder s{0.5};

    SUBCASE("zero difference target gives a zero second source") {
        TimeSeriesField zero = TimeSeriesField::zeros(b, cfg.time);
        auto [d1, d2] = runge_pair_for_inversion(zero, W, s, cfg, 1e-4, 60);
        for (double v : d2.f.data) CHECK(v == 0.0);
        CHECK(space_time_norm(d1.f) > 0.0);
    }
    SUBCASE("designed sources are supported in W x (0,T)") {
        KappaField diff = KappaField::sine_space(0.05, 2);
        TimeSeriesField target = TimeSeriesField::zeros(b, cfg.time);
        const KappaField::Sample ks = diff.sample(*b, cfg.time);
        std::vector<double> grid(24);
        for (int n = 0; n <= cfg.time.n_steps; ++n) {
            for (int j = 0; j < 24; ++j) grid[j] = ks.value[static_cast<size_t>(n) * 24 + j];
            b->analyze(grid, target.snapshot(n));
        }
        auto [d1, d2] = runge_pair_for_inversion(target, W, s, cfg, 1e-4, 60);
        for (const RungeSolution* sol : {&d1, &d2}) {
            std::vector<double> g(24);
            for (int n = 0; n <= cfg.time.n_steps; ++n) {
                b->synthesize(sol->f.snapshot(n), g);
                for (int j = 6; j < 24; ++j) CHECK(std::abs(g[j]) < 1e-12);
            }
            auto first = sol->f.snapshot(0);
            auto last = sol->f.snapshot(cfg.time.n_steps);
            for (int k = 0; k < 24; ++k) {
                CHECK(first[k] == 0.0);
                CHECK(last[k] == 0.0);
            }
        }
    }
}
