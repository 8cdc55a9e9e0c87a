#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <random>

#include "frapident/grid.hpp"
#include "frapident/model.hpp"

using namespace frapident;

TEST_CASE("validate_params accepts the region baselines") {
    for (const auto& region : default_regions()) CHECK(validate_params(region.baseline).ok());
    CHECK(validate_params({0.05, 0.25, 1e-6, 1e-2}).ok());
}

TEST_CASE("validate_params accepts the degenerate all-zero set") {
    CHECK(validate_params({0.0, 0.0, 0.0, 0.0}).ok());
}

TEST_CASE("validate_params rejects negatives and non-finites with the offending field") {
    const ValidationResult neg = validate_params({-0.1, 0.25, 1e-6, 1e-2});
    CHECK(!neg.ok());
    CHECK(neg.issue == ValidationIssue::NonNegativityViolation);
    CHECK(neg.field == "c");

    const ValidationResult nan = validate_params({0.1, std::nan(""), 1e-6, 1e-2});
    CHECK(nan.issue == ValidationIssue::NonFinite);
    CHECK(nan.field == "D");

    const ValidationResult inf =
        validate_params({0.1, 0.25, std::numeric_limits<double>::infinity(), 1e-2});
    CHECK(inf.issue == ValidationIssue::NonFinite);
    CHECK(inf.field == "beta1");

    CHECK_THROWS_AS(require_valid({-0.1, 0.25, 1e-6, 1e-2}), NonNegativityViolation);
}

TEST_CASE("validate_params is a pure predicate") {
    const ModelParams p{0.05, 0.25, 1e-6, 1e-2};
    const ValidationResult a = validate_params(p);
    const ValidationResult b = validate_params(p);
    CHECK(a.ok() == b.ok());
    CHECK(a.field == b.field);
}

TEST_CASE("equilibrium_fractions examples") {
    SUBCASE("symmetric rates") {
        const auto [fu, fv] = equilibrium_fractions({0.0, 0.0, 0.01, 0.01});
        CHECK(fu == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(fv == doctest::Approx(0.5).epsilon(1e-15));
    }
    SUBCASE("region-1 rates") {
        const auto [fu, fv] = equilibrium_fractions({0.0, 0.0, 1e-6, 1e-2});
        CHECK(fu == doctest::Approx(1e-2 / (1e-2 + 1e-6)).epsilon(1e-14));
        CHECK(fv == doctest::Approx(1e-6 / (1e-2 + 1e-6)).epsilon(1e-10));
        CHECK(fu == doctest::Approx(0.99990).epsilon(1e-4));
        CHECK(fv == doctest::Approx(1.0e-4).epsilon(1e-3));
    }
    SUBCASE("degenerate rates use the fallback") {
        const auto [fu, fv] = equilibrium_fractions({0.0, 0.0, 0.0, 0.0}, 0.5);
        CHECK(fu == 0.5);
        CHECK(fv == 0.5);
        const auto [fu2, fv2] = equilibrium_fractions({0.0, 0.0, 0.0, 0.0}, 0.0);
        CHECK(fu2 == 0.0);
        CHECK(fv2 == 1.0);
    }
}

TEST_CASE("equilibrium_fractions sums to one exactly") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> decade(-8.0, 0.0);
    for (int i = 0; i < 200; ++i) {
        const ModelParams p{0.0, 0.0, std::pow(10.0, decade(rng)), std::pow(10.0, decade(rng))};
        const auto [fu, fv] = equilibrium_fractions(p);
        CHECK(fu + fv == 1.0);
    }
}

TEST_CASE("grid invariants") {
    CHECK_THROWS_AS(SpatialGrid(80.0, 80.0, 20, 64), InvalidArgument);  // not a power of two
    CHECK_THROWS_AS(SpatialGrid(80.0, 80.0, 8, 8), InvalidArgument);    // too small

    const SpatialGrid grid(80.0, 80.0, 64, 64);
    CHECK(grid.dx() == doctest::Approx(1.25));
    CHECK(grid.kx[0] == 0.0);
    CHECK(grid.kx[1] == doctest::Approx(2.0 * std::numbers::pi / 80.0));
    CHECK(grid.kx[63] == doctest::Approx(-2.0 * std::numbers::pi / 80.0));
    CHECK(grid.kx[32] == doctest::Approx(2.0 * std::numbers::pi * 32.0 / 80.0));
}

TEST_CASE("coarse grids are rejected against the default spot") {
    const BleachSpec bleach{40.0, 40.0, 5.0, 1.0};
    CHECK_THROWS_AS(SpatialGrid(80.0, 80.0, 16, 16).require_resolves(bleach), GridTooCoarse);
    CHECK_NOTHROW(SpatialGrid(80.0, 80.0, 256, 256).require_resolves(bleach));
}

TEST_CASE("bleach mask counts pixels of a centered disk") {
    const SpatialGrid grid(64.0, 64.0, 128, 128);
    const BleachSpec bleach{32.0, 32.0, 5.0, 1.0};
    const auto mask = bleach_mask(grid, bleach);
    double count = 0.0;
    for (double m : mask) count += m;
    const double ideal = std::numbers::pi * 2.5 * 2.5 / grid.cell_area();
    CHECK(count == doctest::Approx(ideal).epsilon(0.05));
}

TEST_CASE("curve validation") {
    FrapCurve good{{0.0, 1.0, 2.0}, {0.0, 0.5, 0.9}};
    CHECK_NOTHROW(validate_curve(good));

    FrapCurve bad_start{{1.0, 2.0}, {0.0, 0.5}};
    CHECK_THROWS_AS(validate_curve(bad_start), InvalidArgument);

    FrapCurve not_increasing{{0.0, 2.0, 2.0}, {0.0, 0.5, 0.9}};
    CHECK_THROWS_AS(validate_curve(not_increasing), InvalidArgument);

    FrapCurve negative{{0.0, 1.0}, {0.0, -0.5}};
    CHECK_THROWS_AS(validate_curve(negative), NonNegativityViolation);

    FrapCurve mismatched{{0.0, 1.0}, {0.0}};
    CHECK_THROWS_AS(validate_curve(mismatched), InvalidArgument);
}

TEST_CASE("region registry holds the three baselines and sigma estimates") {
    const auto& regions = default_regions();
    REQUIRE(regions.size() == 3);
    CHECK(find_region(regions, 1).baseline.c == doctest::Approx(0.05));
    CHECK(find_region(regions, 1).baseline.D == doctest::Approx(0.25));
    CHECK(find_region(regions, 1).sigma == doctest::Approx(0.275));
    CHECK(find_region(regions, 2).baseline.beta1 == doctest::Approx(1e-3));
    CHECK(find_region(regions, 2).sigma == doctest::Approx(0.365));
    CHECK(find_region(regions, 3).baseline.beta2 == doctest::Approx(1e-6));
    CHECK(find_region(regions, 3).sigma == doctest::Approx(0.614));
    CHECK_THROWS_AS(find_region(regions, 4), InvalidArgument);
}

TEST_CASE("region config JSON round-trip and duplicate rejection") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "frapident_model_test";
    fs::create_directories(dir);
    const std::string path = (dir / "regions.json").string();

    save_regions_json(path, default_regions());
    const auto loaded = load_regions_json(path);
    REQUIRE(loaded.size() == 3);
    for (std::size_t i = 0; i < loaded.size(); ++i) {
        CHECK(loaded[i].region_id == default_regions()[i].region_id);
        CHECK(loaded[i].baseline.beta1 == default_regions()[i].baseline.beta1);
        CHECK(loaded[i].sigma == default_regions()[i].sigma);
    }

    auto dup = default_regions();
    dup[1].region_id = 1;
    save_regions_json(path, dup);
    CHECK_THROWS_AS(load_regions_json(path), InvalidArgument);
    fs::remove_all(dir);
}
