#ifndef FRAPIDENT_PIPELINE_HPP
#define FRAPIDENT_PIPELINE_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "frapident/estimation.hpp"
#include "frapident/likelihood.hpp"
#include "frapident/model.hpp"
#include "frapident/relationships.hpp"

namespace frapident {

// Everything a run needs beyond the region table, so paper-scale and
// desk-scale runs differ only by config.
struct PipelineConfig {
    // domain / solver
    double domain_l = 80.0;  // um, square domain
    int grid_n = 256;
    double bleach_diameter = 5.0;
    double bleach_depth = 1.0;
    double horizon = 200.0;
    int n_times = 41;
    // pre-bleach split of the fluorescent pool between transported and
    // diffusing states (the experiments never report it; equal by default)
    double prebleach_u_fraction = 0.5;

    // synthetic data generation
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;

    // step 1: 1D profiles
    int profile_points = 49;
    double beta_decades = 3.0;

    // step 2: (c, D) surface; point counts chosen so the baseline lies on
    // the grid (0.2x..3x with (n-1) divisible by 7)
    int surface_points = 15;

    // step 3: LSE grid over (log10 beta1, log10 beta2)
    int lse_points = 25;

    // step 4: slope field, tau, s-profile, traces
    int field_nodes = 15;
    double field_h = 0.1;
    double field_decades = 3.0;
    double s_min = -3.0;
    double s_max = 3.0;
    int s_points = 49;
    double tau_offset = -6.0;
    double trace_step = 0.05;
    bool s_profile_cd = true;

    // optimization and classification
    FitOptions fit;
    double flatness_tol = 0.05;
    double delta_alpha = kDeltaAlpha95;
    // The source experiments report fluorescence in arbitrary units and the
    // region sigma values live on that scale; our curves are normalized to a
    // unit pre-bleach spot integral. intensity_scale converts between the
    // two: classification runs use sigma / intensity_scale.
    double intensity_scale = 10.0;
    // loglik tie tolerance for deciding whether the s-profile has a unique
    // maximum (distinct from flatness_tol, which drives classification)
    double s_tie_tol = 1e-3;

    double classification_sigma(double region_sigma) const {
        return region_sigma / intensity_scale;
    }

    int n_threads = 1;

    SpatialGrid make_grid() const;
    BleachSpec make_bleach() const;
    FrapSimulator make_simulator() const;
    std::vector<double> make_times() const;
    ProfileOptions make_profile_options() const;
};

// Full-scale defaults (256 grid, 80 um, 49-point profiles).
PipelineConfig full_config();

// Desk-scale preset: 128 grid, 64 um, 25-point profiles, 9x9 slope field.
// Faster, with slightly coarser profiles; classifications and s* agree with
// the full preset to within one grid step.
PipelineConfig desk_config();

PipelineConfig load_config_json(const std::string& path);
void save_config_json(const std::string& path, const PipelineConfig& cfg);

struct TraceSummary {
    double s = 0.0;                      // tau parameter of Q
    std::pair<double, double> q;         // (log10 beta1, log10 beta2)
    double min_dist_to_baseline = 0.0;   // Euclidean, log10 plane
    double lse_at_q = 0.0;
    double max_lse_ratio = 0.0;          // max over trace of lse / lse_at_q
    std::string csv;
};

struct PipelineReport {
    int region_id = 0;
    std::string data_source;
    int completed_steps = 0;             // 0..4
    std::optional<std::string> error;    // set when a step aborted the run

    // step 1
    std::vector<std::string> profile_params;
    std::map<std::string, std::string> classifications;
    std::map<std::string, double> profile_argmax;  // scan units

    // step 2
    double surface_c_argmax = 0.0;
    double surface_D_argmax = 0.0;

    // step 3
    double lse_min = 0.0;
    double lse_valley_max_row_jump = 0.0;  // valley connectivity, grid rows

    // step 4
    std::vector<double> s_star;            // all plateau maxima (1 => unique)
    bool unique_s_star = false;
    std::vector<TraceSummary> traces;
    std::pair<double, double> baseline_point{0.0, 0.0};  // P in log10 plane

    std::vector<std::string> artifacts;    // relative paths under out_dir
    std::vector<std::pair<std::string, double>> timings_s;  // excluded from report.json
};

// Runs the four-step identifiability pipeline for one region and writes all
// artifacts under out_dir/region<id>/. data_source is either "synthetic" or
// a curve CSV path. Step failures stop the run and are recorded in the
// report rather than thrown.
PipelineReport run_pipeline(const RegionConfig& region, const std::string& data_source,
                            const PipelineConfig& cfg, const std::string& out_dir);

// Deterministic serialization of the report (timings excluded).
std::string report_to_json(const PipelineReport& report);

}  // namespace frapident

#endif
