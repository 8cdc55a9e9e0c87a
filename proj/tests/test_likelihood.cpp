#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "frapident/likelihood.hpp"

using namespace frapident;

namespace {

SpatialGrid test_grid() { return {32.0, 32.0, 64, 64}; }
BleachSpec test_bleach() { return {16.0, 16.0, 5.0, 1.0}; }
ModelParams region2() { return {0.1, 1.5, 1e-3, 1e-4}; }

FrapCurve constant_curve(double value, int n = 41) {
    FrapCurve c;
    c.times = uniform_times(200.0, n);
    c.values.assign(n, value);
    return c;
}

}  // namespace

TEST_CASE("gaussian likelihood at zero residual equals the prefactor") {
    const FrapCurve y = constant_curve(0.5);
    const double sigma = 0.275;
    const double p = gaussian_likelihood(y, y, sigma);
    CHECK(p == doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi * sigma * sigma))
                   .epsilon(1e-12));
    CHECK(p == doctest::Approx(1.4507).epsilon(1e-3));
    CHECK(log_likelihood(y, y, sigma) ==
          doctest::Approx(-0.5 * std::log(2.0 * std::numbers::pi * sigma * sigma)).epsilon(1e-12));
}

TEST_CASE("unit exponent: sse = 2 sigma^2 scales the prefactor by e^-1") {
    const double sigma = 0.4;
    const double p = std::exp(log_likelihood_from_sse(2.0 * sigma * sigma, sigma));
    const double prefactor = 1.0 / std::sqrt(2.0 * std::numbers::pi * sigma * sigma);
    CHECK(p == doctest::Approx(prefactor * std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("sse/sigma^2 = delta_alpha lands exactly on the threshold") {
    const double sigma = 0.31;
    const double p = std::exp(log_likelihood_from_sse(kDeltaAlpha95 * sigma * sigma, sigma));
    CHECK(p == doctest::Approx(likelihood_threshold(sigma)).epsilon(1e-13));
}

TEST_CASE("threshold examples and algebraic identity") {
    SUBCASE("unit prefactor") {
        const double sigma = 1.0 / std::sqrt(2.0 * std::numbers::pi);
        CHECK(likelihood_threshold(sigma) == doctest::Approx(std::exp(-3.841 / 2.0)).epsilon(1e-12));
        CHECK(likelihood_threshold(sigma) == doctest::Approx(0.14646).epsilon(1e-4));
    }
    SUBCASE("sigma 0.275") {
        CHECK(likelihood_threshold(0.275) == doctest::Approx(0.2125).epsilon(5e-4));
    }
    SUBCASE("delta_alpha 0 degenerates to the maximum") {
        const double sigma = 0.5;
        CHECK(likelihood_threshold(sigma, 0.0) ==
              doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi * sigma * sigma))
                  .epsilon(1e-14));
    }
    SUBCASE("identity threshold * sqrt(2 pi sigma^2) = exp(-delta_alpha/2)") {
        for (double sigma : {0.1, 0.275, 0.365, 0.614, 2.0}) {
            const double lhs =
                likelihood_threshold(sigma) * std::sqrt(2.0 * std::numbers::pi * sigma * sigma);
            CHECK(std::abs(lhs - std::exp(-kDeltaAlpha95 / 2.0)) < 1e-14);
        }
    }
    SUBCASE("invalid sigma") { CHECK_THROWS_AS(likelihood_threshold(0.0), InvalidArgument); }
}

TEST_CASE("classify covers the three shapes") {
    const double threshold_ll = -1.0;
    SUBCASE("constant array is structural") {
        const std::vector<double> flat(9, 0.3);
        CHECK(classify(flat, threshold_ll, 0.05) == Identifiability::StructurallyNonIdentifiable);
    }
    SUBCASE("peak crossing both sides is identifiable") {
        const std::vector<double> peaked{-3.0, -2.0, 0.0, 0.5, 0.0, -2.0, -3.0};
        CHECK(classify(peaked, threshold_ll, 0.05) == Identifiability::Identifiable);
    }
    SUBCASE("one-sided crossing is practical") {
        const std::vector<double> half{-3.0, -2.0, 0.0, 0.5, 0.4, 0.35, 0.3};
        CHECK(classify(half, threshold_ll, 0.05) ==
              Identifiability::PracticallyNonIdentifiable);
    }
    SUBCASE("needs at least five points") {
        CHECK_THROWS_AS(classify({1.0, 2.0, 3.0}, 0.0, 0.05), InvalidArgument);
    }
}

TEST_CASE("profile with every nuisance fixed is a pure likelihood slice") {
    const auto grid = test_grid();
    const auto bleach = test_bleach();
    const auto times = uniform_times(100.0, 11);
    const ModelParams truth = region2();
    const FrapCurve data = simulate_frap(truth, grid, bleach, times);
    const FrapSimulator sim(grid, bleach);
    const double sigma = 0.365;

    FixedParams fixed;
    fixed.c = truth.c;
    fixed.beta1 = truth.beta1;
    fixed.beta2 = truth.beta2;
    const std::vector<double> scan = linspace(0.5 * truth.D, 2.0 * truth.D, 7);
    ProfileOptions opts;
    const ProfileResult prof =
        profile_1d(data, sigma, sim, ParamId::Diff, scan, truth, fixed, opts);

    for (std::size_t i = 0; i < scan.size(); ++i) {
        ModelParams p = truth;
        p.D = scan[i];
        const double direct = gaussian_likelihood(data, sim.simulate(p, times), sigma);
        CHECK(prof.likelihood[i] == doctest::Approx(direct).epsilon(1e-12));
    }
}

TEST_CASE("profile at the baseline grid point reaches the exact maximum") {
    const auto grid = test_grid();
    const auto bleach = test_bleach();
    const auto times = uniform_times(100.0, 11);
    const ModelParams truth = region2();
    const FrapCurve data = simulate_frap(truth, grid, bleach, times);
    const FrapSimulator sim(grid, bleach);
    const double sigma = 0.365;

    // grid deliberately contains the exact baseline value of c
    const std::vector<double> scan{0.05, 0.075, 0.1, 0.15, 0.2};
    ProfileOptions opts;
    opts.fit.max_evals = 150;
    const ProfileResult prof =
        profile_1d(data, sigma, sim, ParamId::C, scan, truth, {}, opts);

    CHECK(prof.grid[prof.argmax()] == doctest::Approx(0.1));
    const double pmax = 1.0 / std::sqrt(2.0 * std::numbers::pi * sigma * sigma);
    CHECK(prof.likelihood[prof.argmax()] == doctest::Approx(pmax).epsilon(1e-9));
}

TEST_CASE("profile optimization only improves on any fixed nuisance vector") {
    const auto grid = test_grid();
    const auto bleach = test_bleach();
    const auto times = uniform_times(100.0, 11);
    const ModelParams truth = region2();
    const FrapCurve data = simulate_frap(truth, grid, bleach, times);
    const FrapSimulator sim(grid, bleach);
    const double sigma = 0.365;

    const std::vector<double> scan{0.08, 0.09, 0.1, 0.11, 0.12};
    ProfileOptions opts;
    opts.fit.max_evals = 250;
    const ProfileResult prof =
        profile_1d(data, sigma, sim, ParamId::C, scan, truth, {}, opts);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> jitter(0.7, 1.4);
    for (std::size_t i = 0; i < scan.size(); ++i) {
        ModelParams p = truth;
        p.c = scan[i];
        p.D *= jitter(rng);
        p.beta1 *= jitter(rng);
        p.beta2 *= jitter(rng);
        const double fixed_ll = log_likelihood(data, sim.simulate(p, times), sigma);
        CHECK(prof.loglik[i] >= fixed_ll - 1e-6);
    }
}

TEST_CASE("2D surface peaks at the baseline cell on noiseless data") {
    const auto grid = test_grid();
    const auto bleach = test_bleach();
    const auto times = uniform_times(100.0, 11);
    const ModelParams truth = region2();
    const FrapCurve data = simulate_frap(truth, grid, bleach, times);
    const FrapSimulator sim(grid, bleach);
    const double sigma = 0.365;

    const auto c_grid = linspace(0.2 * truth.c, 3.0 * truth.c, 8);
    const auto D_grid = linspace(0.2 * truth.D, 3.0 * truth.D, 8);
    ProfileOptions opts;
    opts.fit.max_evals = 120;
    const Surface2D surf = profile_2d(data, sigma, sim, c_grid, D_grid, truth, opts);

    const auto [ci, dj] = surf.argmax_cell();
    CHECK(surf.c_grid[ci] == doctest::Approx(truth.c).epsilon(1e-12));
    CHECK(surf.D_grid[dj] == doctest::Approx(truth.D).epsilon(1e-12));

    const double pmax = 1.0 / std::sqrt(2.0 * std::numbers::pi * sigma * sigma);
    for (double p : surf.likelihood) CHECK(p <= pmax * (1.0 + 1e-12));
}
