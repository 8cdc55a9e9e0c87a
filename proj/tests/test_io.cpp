#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "frapident/io.hpp"
#include "frapident/pipeline.hpp"

using namespace frapident;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / "frapident_io_test") {
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("curve CSV round-trips at printed precision") {
    TempDir dir;
    FrapCurve curve;
    curve.times = uniform_times(200.0, 41);
    curve.values.resize(41);
    for (int i = 0; i < 41; ++i) curve.values[i] = 0.123456789012 * i / 40.0;

    const std::string path = dir.file("curve.csv");
    save_curve_csv(path, curve);
    const FrapCurve back = load_curve_csv(path);
    REQUIRE(back.size() == curve.size());
    for (std::size_t i = 0; i < curve.size(); ++i) {
        CHECK(back.times[i] == doctest::Approx(curve.times[i]).epsilon(1e-11));
        CHECK(back.values[i] == doctest::Approx(curve.values[i]).epsilon(1e-11));
    }
}

TEST_CASE("curve loader rejects malformed input") {
    TempDir dir;
    SUBCASE("wrong header") {
        const std::string path = dir.file("bad_header.csv");
        std::ofstream(path) << "time,intensity\n0,0.5\n";
        CHECK_THROWS_AS(load_curve_csv(path), InvalidArgument);
    }
    SUBCASE("non-monotone times") {
        const std::string path = dir.file("bad_times.csv");
        std::ofstream(path) << "time_s,intensity\n0,0.1\n5,0.2\n5,0.3\n";
        CHECK_THROWS_AS(load_curve_csv(path), InvalidArgument);
    }
    SUBCASE("non-numeric field") {
        const std::string path = dir.file("bad_value.csv");
        std::ofstream(path) << "time_s,intensity\n0,zero\n";
        CHECK_THROWS_AS(load_curve_csv(path), InvalidArgument);
    }
    SUBCASE("missing file") { CHECK_THROWS_AS(load_curve_csv(dir.file("nope.csv")), InvalidArgument); }
}

TEST_CASE("profile CSV carries the documented header") {
    TempDir dir;
    ProfileResult prof;
    prof.interest = "D";
    prof.grid = {0.5, 1.0, 1.5};
    prof.loglik = {-1.0, 0.0, -1.0};
    prof.likelihood = {0.4, 1.0, 0.4};
    prof.optima.assign(3, ModelParams{0.1, 1.0, 1e-3, 1e-4});
    prof.threshold = 0.2;

    const std::string path = dir.file("profile.csv");
    save_profile_csv(path, prof);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "interest,value,loglik,likelihood,threshold,c,D,beta1,beta2");
    int rows = 0;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 3);
}

TEST_CASE("tau CSV header and row count") {
    TempDir dir;
    const TauCurve tau = tau_curve(linspace(-3.0, 3.0, 49));
    const std::string path = dir.file("tau.csv");
    save_tau_csv(path, tau);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "s,log10_beta1,log10_beta2");
    int rows = 0;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 49);
}

TEST_CASE("pipeline config JSON round-trips") {
    TempDir dir;
    PipelineConfig cfg = desk_config();
    cfg.seed = 1234;
    cfg.noise_sigma = 0.1;
    cfg.fit.max_evals = 321;
    const std::string path = dir.file("config.json");
    save_config_json(path, cfg);
    const PipelineConfig back = load_config_json(path);
    CHECK(back.grid_n == cfg.grid_n);
    CHECK(back.domain_l == cfg.domain_l);
    CHECK(back.seed == cfg.seed);
    CHECK(back.noise_sigma == cfg.noise_sigma);
    CHECK(back.profile_points == cfg.profile_points);
    CHECK(back.field_nodes == cfg.field_nodes);
    CHECK(back.fit.max_evals == 321);
}

TEST_CASE("format_number keeps at least 9 significant digits") {
    CHECK(format_number(0.123456789012345).substr(0, 11) == "0.123456789");
    CHECK(format_number(1.0) == "1");
    const double value = -1.86735e-5;
    CHECK(std::stod(format_number(value)) == doctest::Approx(value).epsilon(1e-11));
}
