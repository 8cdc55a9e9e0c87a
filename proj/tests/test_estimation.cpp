#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "frapident/estimation.hpp"
#include "frapident/nelder_mead.hpp"

using namespace frapident;

namespace {

SpatialGrid test_grid() { return {32.0, 32.0, 64, 64}; }
BleachSpec test_bleach() { return {16.0, 16.0, 5.0, 1.0}; }
ModelParams region2() { return {0.1, 1.5, 1e-3, 1e-4}; }

}  // namespace

TEST_CASE("nelder_mead minimizes a shifted quadratic") {
    auto f = [](const std::vector<double>& x) {
        const double a = x[0] - 1.5, b = x[1] + 2.0;
        return a * a + 3.0 * b * b;
    };
    NelderMeadOptions opts;
    opts.max_evals = 500;
    const auto r = nelder_mead(f, {0.0, 0.0}, {0.5, 0.5}, opts);
    CHECK(r.converged);
    CHECK(r.x[0] == doctest::Approx(1.5).epsilon(1e-4));
    CHECK(r.x[1] == doctest::Approx(-2.0).epsilon(1e-4));
}

TEST_CASE("nelder_mead handles the rosenbrock valley") {
    auto f = [](const std::vector<double>& x) {
        const double a = 1.0 - x[0];
        const double b = x[1] - x[0] * x[0];
        return a * a + 100.0 * b * b;
    };
    NelderMeadOptions opts;
    opts.max_evals = 2000;
    const auto r = nelder_mead(f, {-1.2, 1.0}, {0.1, 0.1}, opts);
    CHECK(r.f < 1e-8);
}

TEST_CASE("sse examples") {
    FrapCurve a{{0.0, 1.0, 2.0}, {0.1, 0.2, 0.3}};
    SUBCASE("identical curves give zero") { CHECK(sse(a, a) == 0.0); }
    SUBCASE("constant offset") {
        FrapCurve b = a;
        std::vector<double> times(41), av(41, 0.5), bv(41, 0.6);
        std::iota(times.begin(), times.end(), 0.0);
        const double total = sse({times, av}, {times, bv});
        CHECK(total == doctest::Approx(41.0 * 0.01).epsilon(1e-12));
    }
    SUBCASE("time grid mismatch throws") {
        FrapCurve b{{0.0, 1.0, 2.5}, {0.1, 0.2, 0.3}};
        CHECK_THROWS_AS(sse(a, b), TimeGridMismatch);
        FrapCurve c{{0.0, 1.0}, {0.1, 0.2}};
        CHECK_THROWS_AS(sse(a, c), TimeGridMismatch);
    }
}

TEST_CASE("estimate_sigma is the rms residual and squares back to sse") {
    std::vector<double> times(41);
    std::iota(times.begin(), times.end(), 0.0);
    FrapCurve a{times, std::vector<double>(41, 0.5)};
    FrapCurve b{times, std::vector<double>(41, 0.62)};
    CHECK(estimate_sigma(a, a) == 0.0);
    CHECK(estimate_sigma(a, b) == doctest::Approx(0.12).epsilon(1e-12));
    const double sigma = estimate_sigma(a, b);
    CHECK(sigma * sigma * 41.0 == doctest::Approx(sse(a, b)).epsilon(1e-12));
}

TEST_CASE("generate_synthetic determinism and noiseless identity") {
    const auto times = uniform_times(30.0, 7);
    const auto grid = test_grid();
    const auto bleach = test_bleach();

    const FrapCurve clean = generate_synthetic(region2(), grid, bleach, times, 0.0, 42);
    const FrapCurve direct = simulate_frap(region2(), grid, bleach, times);
    for (std::size_t i = 0; i < clean.values.size(); ++i)
        CHECK(clean.values[i] == direct.values[i]);

    const FrapCurve n1 = generate_synthetic(region2(), grid, bleach, times, 0.3, 42);
    const FrapCurve n2 = generate_synthetic(region2(), grid, bleach, times, 0.3, 42);
    for (std::size_t i = 0; i < n1.values.size(); ++i) CHECK(n1.values[i] == n2.values[i]);

    const FrapCurve n3 = generate_synthetic(region2(), grid, bleach, times, 0.3, 43);
    bool any_different = false;
    for (std::size_t i = 0; i < n1.values.size(); ++i)
        any_different = any_different || n1.values[i] != n3.values[i];
    CHECK(any_different);
}

TEST_CASE("synthetic noise has the requested scale") {
    // 10^4 draws of a single time point through different seeds
    const auto grid = test_grid();
    const auto bleach = test_bleach();
    const std::vector<double> times{0.0, 5.0};
    const double sigma = 0.275;

    const FrapCurve base = simulate_frap(region2(), grid, bleach, times);
    const FrapSimulator sim(grid, bleach);
    // draw through one generator stream to keep the test fast
    std::mt19937_64 rng(1234);
    std::normal_distribution<double> noise(0.0, sigma);
    double sum = 0.0, sum2 = 0.0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        const double v = base.values[1] + noise(rng);
        sum += v;
        sum2 += v * v;
    }
    const double mean = sum / n;
    const double stddev = std::sqrt(sum2 / n - mean * mean);
    CHECK(std::abs(stddev - sigma) / sigma < 0.03);
}

TEST_CASE("latin hypercube starts respect bounds and stratification") {
    const FitBounds bounds;
    const auto starts = latin_hypercube_starts(16, bounds, 99);
    REQUIRE(starts.size() == 16);
    for (const auto& p : starts) {
        CHECK(p.c >= bounds.c_lo);
        CHECK(p.c <= bounds.c_hi);
        CHECK(p.D >= bounds.D_lo);
        CHECK(p.D <= bounds.D_hi);
        CHECK(p.beta1 >= bounds.beta1_lo);
        CHECK(p.beta1 <= bounds.beta1_hi);
    }
    // one c sample per stratum
    std::vector<int> strata(16, 0);
    for (const auto& p : starts) strata[static_cast<int>(p.c * 16.0 * 0.999999)]++;
    for (int count : strata) CHECK(count == 1);
}

TEST_CASE("fit from the truth stays at the truth") {
    const auto grid = test_grid();
    const auto bleach = test_bleach();
    const auto times = uniform_times(200.0, 21);
    const FrapCurve data = simulate_frap(region2(), grid, bleach, times);
    const FrapSimulator sim(grid, bleach);

    FitOptions opts;
    opts.n_starts = 1;
    opts.max_evals = 200;
    const FitResult r = fit(data, sim, region2(), opts);
    CHECK(r.sse < 1e-12);
    CHECK(r.params.c == doctest::Approx(region2().c).epsilon(0.01));
    CHECK(r.params.D == doctest::Approx(region2().D).epsilon(0.01));
}

TEST_CASE("fit recovers c and D from a perturbed start on noiseless data") {
    const auto grid = test_grid();
    const auto bleach = test_bleach();
    const auto times = uniform_times(200.0, 21);
    const FrapCurve data = simulate_frap(region2(), grid, bleach, times);
    const FrapSimulator sim(grid, bleach);

    ModelParams guess = region2();
    guess.c *= 1.5;
    guess.D *= 1.5;
    FitOptions opts;
    opts.n_starts = 1;
    opts.max_evals = 800;
    const FitResult r = fit(data, sim, guess, opts);
    CHECK(std::abs(r.params.c - region2().c) / region2().c < 0.05);
    CHECK(std::abs(r.params.D - region2().D) / region2().D < 0.05);
}

TEST_CASE("fit results stay inside the bounds box") {
    const auto grid = test_grid();
    const auto bleach = test_bleach();
    const auto times = uniform_times(60.0, 7);
    const FrapCurve data = simulate_frap(region2(), grid, bleach, times);
    const FrapSimulator sim(grid, bleach);

    FitOptions opts;
    opts.n_starts = 4;
    opts.max_evals = 60;
    opts.seed = 5;
    const FitResult r = fit(data, sim, {0.9, 9.0, 0.9, 0.9}, opts);
    CHECK(r.params.c >= opts.bounds.c_lo);
    CHECK(r.params.c <= opts.bounds.c_hi);
    CHECK(r.params.D >= opts.bounds.D_lo);
    CHECK(r.params.D <= opts.bounds.D_hi);
    CHECK(r.params.beta1 >= opts.bounds.beta1_lo);
    CHECK(r.params.beta1 <= opts.bounds.beta1_hi);
    CHECK(r.params.beta2 >= opts.bounds.beta2_lo);
    CHECK(r.params.beta2 <= opts.bounds.beta2_hi);
}

TEST_CASE("fit_objective honors the free mask") {
    // quadratic in beta2 only; everything else pinned by the mask
    const SseObjective objective = [](const ModelParams& p) {
        const double d = std::log10(p.beta2) + 3.0;
        return d * d;
    };
    ModelParams start{0.1, 1.0, 1e-4, 1e-6};
    FitOptions opts;
    opts.max_evals = 200;
    const FitResult r = fit_objective(objective, {start}, {false, false, false, true}, opts);
    CHECK(std::log10(r.params.beta2) == doctest::Approx(-3.0).epsilon(1e-4));
    CHECK(r.params.beta1 == start.beta1);
    CHECK(r.params.c == start.c);
    CHECK(r.sse < 1e-10);
}
