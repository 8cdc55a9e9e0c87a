#include "frapident/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "frapident/io.hpp"
#include "frapident/parallel.hpp"
#include "frapident/svg.hpp"

namespace frapident {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

SpatialGrid PipelineConfig::make_grid() const { return {domain_l, domain_l, grid_n, grid_n}; }

BleachSpec PipelineConfig::make_bleach() const {
    return {domain_l / 2.0, domain_l / 2.0, bleach_diameter, bleach_depth};
}

std::vector<double> PipelineConfig::make_times() const { return uniform_times(horizon, n_times); }

FrapSimulator PipelineConfig::make_simulator() const {
    return {make_grid(), make_bleach(), prebleach_u_fraction};
}

ProfileOptions PipelineConfig::make_profile_options() const {
    ProfileOptions opts;
    opts.fit = fit;
    opts.flatness_tol = flatness_tol;
    opts.delta_alpha = delta_alpha;
    return opts;
}

PipelineConfig full_config() { return {}; }

PipelineConfig desk_config() {
    PipelineConfig cfg;
    cfg.domain_l = 64.0;
    cfg.grid_n = 128;
    cfg.profile_points = 25;
    cfg.surface_points = 8;
    cfg.lse_points = 21;
    cfg.field_nodes = 9;
    cfg.s_points = 25;
    return cfg;
}

namespace {

constexpr int kConfigSchema = 1;

}  // namespace

PipelineConfig load_config_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open config: " + path);
    nlohmann::json j;
    in >> j;
    if (!j.contains("schema_version") || j["schema_version"].get<int>() != kConfigSchema)
        throw InvalidArgument("config: unsupported schema_version in " + path);

    PipelineConfig cfg;
    auto get = [&](const char* key, auto& value) {
        if (j.contains(key)) value = j[key].get<std::decay_t<decltype(value)>>();
    };
    get("domain_l", cfg.domain_l);
    get("grid_n", cfg.grid_n);
    get("bleach_diameter", cfg.bleach_diameter);
    get("bleach_depth", cfg.bleach_depth);
    get("horizon", cfg.horizon);
    get("n_times", cfg.n_times);
    get("prebleach_u_fraction", cfg.prebleach_u_fraction);
    get("noise_sigma", cfg.noise_sigma);
    get("seed", cfg.seed);
    get("profile_points", cfg.profile_points);
    get("beta_decades", cfg.beta_decades);
    get("surface_points", cfg.surface_points);
    get("lse_points", cfg.lse_points);
    get("field_nodes", cfg.field_nodes);
    get("field_h", cfg.field_h);
    get("field_decades", cfg.field_decades);
    get("s_min", cfg.s_min);
    get("s_max", cfg.s_max);
    get("s_points", cfg.s_points);
    get("tau_offset", cfg.tau_offset);
    get("trace_step", cfg.trace_step);
    get("s_profile_cd", cfg.s_profile_cd);
    get("flatness_tol", cfg.flatness_tol);
    get("delta_alpha", cfg.delta_alpha);
    get("intensity_scale", cfg.intensity_scale);
    get("s_tie_tol", cfg.s_tie_tol);
    get("n_threads", cfg.n_threads);
    get("fit_max_evals", cfg.fit.max_evals);
    get("fit_n_starts", cfg.fit.n_starts);
    get("fit_simplex_tol", cfg.fit.simplex_tol);
    get("fit_f_tol", cfg.fit.f_tol);
    get("fit_init_step_frac", cfg.fit.init_step_frac);
    return cfg;
}

void save_config_json(const std::string& path, const PipelineConfig& cfg) {
    ordered_json j;
    j["schema_version"] = kConfigSchema;
    j["domain_l"] = cfg.domain_l;
    j["grid_n"] = cfg.grid_n;
    j["bleach_diameter"] = cfg.bleach_diameter;
    j["bleach_depth"] = cfg.bleach_depth;
    j["horizon"] = cfg.horizon;
    j["n_times"] = cfg.n_times;
    j["prebleach_u_fraction"] = cfg.prebleach_u_fraction;
    j["noise_sigma"] = cfg.noise_sigma;
    j["seed"] = cfg.seed;
    j["profile_points"] = cfg.profile_points;
    j["beta_decades"] = cfg.beta_decades;
    j["surface_points"] = cfg.surface_points;
    j["lse_points"] = cfg.lse_points;
    j["field_nodes"] = cfg.field_nodes;
    j["field_h"] = cfg.field_h;
    j["field_decades"] = cfg.field_decades;
    j["s_min"] = cfg.s_min;
    j["s_max"] = cfg.s_max;
    j["s_points"] = cfg.s_points;
    j["tau_offset"] = cfg.tau_offset;
    j["trace_step"] = cfg.trace_step;
    j["s_profile_cd"] = cfg.s_profile_cd;
    j["flatness_tol"] = cfg.flatness_tol;
    j["delta_alpha"] = cfg.delta_alpha;
    j["intensity_scale"] = cfg.intensity_scale;
    j["s_tie_tol"] = cfg.s_tie_tol;
    j["n_threads"] = cfg.n_threads;
    j["fit_max_evals"] = cfg.fit.max_evals;
    j["fit_n_starts"] = cfg.fit.n_starts;
    j["fit_simplex_tol"] = cfg.fit.simplex_tol;
    j["fit_f_tol"] = cfg.fit.f_tol;
    j["fit_init_step_frac"] = cfg.fit.init_step_frac;
    std::ofstream out(path);
    if (!out) throw InvalidArgument("cannot write config: " + path);
    out << j.dump(2) << "\n";
}

namespace {

// log10 grid around the baseline rate, clipped to the optimizer box.
std::vector<double> beta_log_grid(double baseline, double decades, int n, const FitBounds& b,
                                  ParamId id) {
    const double center = std::log10(std::clamp(baseline, b.lo(id), b.hi(id)));
    const double lo = std::max(center - decades, std::log10(b.lo(id)));
    const double hi = std::min(center + decades, std::log10(b.hi(id)));
    return linspace(lo, hi, n);
}

std::vector<double> cd_grid(double baseline, int n, ParamId id, const FitBounds& b) {
    const double lo = std::max(0.2 * baseline, b.lo(id));
    const double hi = std::min(3.0 * baseline, b.hi(id));
    return linspace(lo, hi, n);
}

struct StepClock {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double lap() {
        const auto t1 = std::chrono::steady_clock::now();
        const double s = std::chrono::duration<double>(t1 - t0).count();
        t0 = t1;
        return s;
    }
};

}  // namespace

PipelineReport run_pipeline(const RegionConfig& region, const std::string& data_source,
                            const PipelineConfig& cfg, const std::string& out_dir) {
    PipelineReport report;
    report.region_id = region.region_id;
    report.data_source = data_source;
    report.baseline_point = {std::log10(region.baseline.beta1), std::log10(region.baseline.beta2)};

    const fs::path region_dir = fs::path(out_dir) / ("region" + std::to_string(region.region_id));
    for (int step = 1; step <= 4; ++step)
        fs::create_directories(region_dir / ("step" + std::to_string(step)));

    auto rel = [&](const fs::path& p) { return fs::relative(p, out_dir).string(); };
    auto add_artifact = [&](const fs::path& p) { report.artifacts.push_back(rel(p)); };

    const SpatialGrid grid = cfg.make_grid();
    const BleachSpec bleach = cfg.make_bleach();
    const std::vector<double> times = cfg.make_times();
    const FrapSimulator sim(grid, bleach, cfg.prebleach_u_fraction);
    const ProfileOptions popts = cfg.make_profile_options();

    const double sigma_eff = cfg.classification_sigma(region.sigma);

    // Data: noiseless (or seeded-noise) baseline synthetic curve, or a CSV.
    FrapCurve data;
    if (data_source == "synthetic") {
        data = generate_synthetic(region.baseline, grid, bleach, times, cfg.noise_sigma,
                                  cfg.seed, cfg.prebleach_u_fraction);
    } else {
        data = load_curve_csv(data_source);
    }
    {
        const fs::path p = region_dir / "data.csv";
        save_curve_csv(p.string(), data);
        add_artifact(p);
    }

    StepClock clock;
    try {
        // ---- Step 1: 1D profile likelihoods -------------------------------
        const std::array<ParamId, 4> params = {ParamId::C, ParamId::Diff, ParamId::Beta1,
                                               ParamId::Beta2};
        std::array<ProfileResult, 4> profiles;
        parallel_for(params.size(), cfg.n_threads, [&](std::size_t i) {
            const auto grid_points = default_profile_grid(params[i], region.baseline,
                                                          cfg.fit.bounds, cfg.profile_points,
                                                          cfg.beta_decades);
            profiles[i] = profile_1d(data, sigma_eff, sim, params[i], grid_points,
                                     region.baseline, {}, popts);
        });
        for (std::size_t i = 0; i < params.size(); ++i) {
            const std::string name = param_name(params[i]);
            const ProfileResult& prof = profiles[i];
            report.profile_params.push_back(name);
            report.classifications[name] = to_string(prof.classification);
            report.profile_argmax[name] = prof.grid[prof.argmax()];
            const fs::path csv = region_dir / "step1" / ("profile_" + name + ".csv");
            save_profile_csv(csv.string(), prof);
            add_artifact(csv);
            const fs::path svg = region_dir / "step1" / ("profile_" + name + ".svg");
            plot_profile_svg(svg.string(), prof,
                             "Region " + std::to_string(region.region_id) + " profile: " + name);
            add_artifact(svg);
        }
        report.timings_s.emplace_back("step1_profiles", clock.lap());
        report.completed_steps = 1;

        // ---- Step 2: 2D (c, D) profile ------------------------------------
        const auto c_grid = cd_grid(region.baseline.c, cfg.surface_points, ParamId::C,
                                    cfg.fit.bounds);
        const auto D_grid = cd_grid(region.baseline.D, cfg.surface_points, ParamId::Diff,
                                    cfg.fit.bounds);
        ProfileOptions sopts = popts;
        sopts.n_threads = cfg.n_threads;
        const Surface2D surface =
            profile_2d(data, sigma_eff, sim, c_grid, D_grid, region.baseline, sopts);
        const auto [ci, dj] = surface.argmax_cell();
        report.surface_c_argmax = surface.c_grid[ci];
        report.surface_D_argmax = surface.D_grid[dj];
        {
            const fs::path csv = region_dir / "step2" / "surface_cD.csv";
            save_surface_csv(csv.string(), surface);
            add_artifact(csv);
            const fs::path svg = region_dir / "step2" / "surface_cD.svg";
            plot_heatmap_svg(svg.string(),
                             "Region " + std::to_string(region.region_id) +
                                 " 2D profile likelihood (c, D)",
                             "c", "D", surface.c_grid, surface.D_grid, surface.likelihood, false);
            add_artifact(svg);
        }
        report.timings_s.emplace_back("step2_surface", clock.lap());
        report.completed_steps = 2;

        // ---- Step 3: LSE contour grid over (beta1, beta2) ------------------
        const auto b1_lse = beta_log_grid(region.baseline.beta1, cfg.beta_decades,
                                          cfg.lse_points, cfg.fit.bounds, ParamId::Beta1);
        const auto b2_lse = beta_log_grid(region.baseline.beta2, cfg.beta_decades,
                                          cfg.lse_points, cfg.fit.bounds, ParamId::Beta2);
        const auto lse = lse_grid(data, sim, region, b1_lse, b2_lse, cfg.n_threads);
        report.lse_min = *std::min_element(lse.begin(), lse.end());

        // Valley descriptor: the argmin beta2 per beta1 column plus its
        // connectivity (max jump of the argmin row between adjacent columns).
        {
            std::vector<double> valley_b2(b1_lse.size()), valley_lse(b1_lse.size());
            std::vector<std::size_t> argmin_rows(b1_lse.size());
            for (std::size_t i = 0; i < b1_lse.size(); ++i) {
                std::size_t best = 0;
                for (std::size_t j = 1; j < b2_lse.size(); ++j)
                    if (lse[i * b2_lse.size() + j] < lse[i * b2_lse.size() + best]) best = j;
                argmin_rows[i] = best;
                valley_b2[i] = b2_lse[best];
                valley_lse[i] = lse[i * b2_lse.size() + best];
            }
            double max_jump = 0.0;
            for (std::size_t i = 1; i < argmin_rows.size(); ++i)
                max_jump = std::max(max_jump, std::abs(static_cast<double>(argmin_rows[i]) -
                                                       static_cast<double>(argmin_rows[i - 1])));
            report.lse_valley_max_row_jump = max_jump;

            const fs::path csv = region_dir / "step3" / "lse_grid.csv";
            save_lse_csv(csv.string(), b1_lse, b2_lse, lse);
            add_artifact(csv);
            const fs::path valley_csv = region_dir / "step3" / "lse_valley.csv";
            {
                std::ofstream out(valley_csv);
                out << "log10_beta1,log10_beta2,lse\n";
                for (std::size_t i = 0; i < b1_lse.size(); ++i)
                    out << format_number(b1_lse[i]) << "," << format_number(valley_b2[i]) << ","
                        << format_number(valley_lse[i]) << "\n";
            }
            add_artifact(valley_csv);
            const fs::path svg = region_dir / "step3" / "lse_grid.svg";
            plot_heatmap_svg(svg.string(),
                             "Region " + std::to_string(region.region_id) + " LSE contours",
                             "log10 beta1", "log10 beta2", b1_lse, b2_lse, lse, true);
            add_artifact(svg);
        }
        report.timings_s.emplace_back("step3_lse", clock.lap());
        report.completed_steps = 3;

        // ---- Step 4: slope field, tau, s-profile, traces --------------------
        const auto b1_sub = beta_log_grid(region.baseline.beta1, cfg.field_decades,
                                          cfg.profile_points, cfg.fit.bounds, ParamId::Beta1);
        const SubsetProfile subset = subset_profile(data, sigma_eff, sim, region, b1_sub, popts);
        {
            const fs::path csv = region_dir / "step4" / "subset_profile.csv";
            save_subset_csv(csv.string(), subset);
            add_artifact(csv);
        }

        const auto b1_nodes = beta_log_grid(region.baseline.beta1, cfg.field_decades,
                                            cfg.field_nodes, cfg.fit.bounds, ParamId::Beta1);
        const auto b2_nodes = beta_log_grid(region.baseline.beta2, cfg.field_decades,
                                            cfg.field_nodes, cfg.fit.bounds, ParamId::Beta2);
        SlopeFieldOptions fopts;
        fopts.h = cfg.field_h;
        fopts.profile = popts;
        fopts.n_threads = cfg.n_threads;
        const SlopeField field = slope_field(sim, region, b1_nodes, b2_nodes, times, fopts);
        {
            const fs::path csv = region_dir / "step4" / "slope_field.csv";
            save_field_csv(csv.string(), field);
            add_artifact(csv);
        }

        const auto s_grid = linspace(cfg.s_min, cfg.s_max, cfg.s_points);
        const TauCurve tau = tau_curve(s_grid, cfg.tau_offset);
        {
            const fs::path csv = region_dir / "step4" / "tau.csv";
            save_tau_csv(csv.string(), tau);
            add_artifact(csv);
        }

        const ProfileResult sprof =
            s_profile(data, sigma_eff, sim, region, s_grid, cfg.s_profile_cd, popts,
                      cfg.tau_offset);
        {
            const fs::path csv = region_dir / "step4" / "s_profile.csv";
            save_profile_csv(csv.string(), sprof);
            add_artifact(csv);
            const fs::path svg = region_dir / "step4" / "s_profile.svg";
            plot_profile_svg(svg.string(), sprof,
                             "Region " + std::to_string(region.region_id) + " s-profile");
            add_artifact(svg);
        }

        const auto plateau = plateau_points(sprof, cfg.s_tie_tol);
        for (std::size_t idx : plateau) report.s_star.push_back(sprof.grid[idx]);
        report.unique_s_star = plateau.size() == 1;

        TraceOptions topts;
        topts.step = cfg.trace_step;
        topts.n_threads = cfg.n_threads;
        std::vector<PlotSeries> overlay;
        {
            PlotSeries tau_series;
            tau_series.label = "tau";
            tau_series.x = tau.beta1_log10;
            tau_series.y = tau.beta2_log10;
            overlay.push_back(std::move(tau_series));
        }
        for (std::size_t qi = 0; qi < plateau.size(); ++qi) {
            const double s = sprof.grid[plateau[qi]];
            const auto q = tau_point(s, cfg.tau_offset);
            TraceSummary summary;
            summary.s = s;
            summary.q = q;
            if (!field.contains(q.first, q.second)) {
                // Q outside the node box: record and skip the trace.
                summary.min_dist_to_baseline = std::numeric_limits<double>::quiet_NaN();
                report.traces.push_back(summary);
                continue;
            }
            const ContourTrace trace = trace_contour(field, q, sim, region, data, topts);
            summary.lse_at_q = trace.lse[trace.start_index];
            double min_dist = std::numeric_limits<double>::infinity();
            double max_ratio = 0.0;
            const double lse_floor = std::max(summary.lse_at_q, 1e-300);
            for (std::size_t i = 0; i < trace.beta1_log10.size(); ++i) {
                const double dx = trace.beta1_log10[i] - report.baseline_point.first;
                const double dy = trace.beta2_log10[i] - report.baseline_point.second;
                min_dist = std::min(min_dist, std::hypot(dx, dy));
                max_ratio = std::max(max_ratio, trace.lse[i] / lse_floor);
            }
            summary.min_dist_to_baseline = min_dist;
            summary.max_lse_ratio = max_ratio;

            const fs::path csv =
                region_dir / "step4" / ("trace_q" + std::to_string(qi + 1) + ".csv");
            save_trace_csv(csv.string(), trace);
            add_artifact(csv);
            summary.csv = rel(csv);
            report.traces.push_back(summary);

            PlotSeries ts;
            ts.label = "trace Q" + std::to_string(qi + 1);
            ts.x = trace.beta1_log10;
            ts.y = trace.beta2_log10;
            overlay.push_back(std::move(ts));
        }

        {
            std::vector<FieldMarker> markers;
            markers.push_back(
                {"P", report.baseline_point.first, report.baseline_point.second, "#d62728"});
            for (std::size_t qi = 0; qi < report.traces.size(); ++qi)
                markers.push_back({"Q" + std::to_string(qi + 1), report.traces[qi].q.first,
                                   report.traces[qi].q.second, "#1f77b4"});
            const fs::path svg = region_dir / "step4" / "slope_field.svg";
            plot_field_svg(svg.string(),
                           "Region " + std::to_string(region.region_id) + " slope field",
                           field, overlay, markers);
            add_artifact(svg);
        }
        report.timings_s.emplace_back("step4_relationships", clock.lap());
        report.completed_steps = 4;
    } catch (const Error& e) {
        report.error = e.what();
    }

    {
        std::ofstream out(region_dir / "report.json");
        out << report_to_json(report) << "\n";
        report.artifacts.push_back(rel(region_dir / "report.json"));
    }
    {
        ordered_json jt;
        for (const auto& [step, seconds] : report.timings_s) jt[step] = seconds;
        std::ofstream out(region_dir / "timings.json");
        out << jt.dump(2) << "\n";
    }
    return report;
}

std::string report_to_json(const PipelineReport& report) {
    ordered_json j;
    j["schema_version"] = 1;
    j["region_id"] = report.region_id;
    j["data_source"] = report.data_source;
    j["completed_steps"] = report.completed_steps;
    if (report.error) j["error"] = *report.error;

    ordered_json step1;
    for (const auto& name : report.profile_params) {
        ordered_json e;
        e["classification"] = report.classifications.at(name);
        e["argmax"] = report.profile_argmax.at(name);
        step1[name] = std::move(e);
    }
    j["step1_profiles"] = std::move(step1);

    if (report.completed_steps >= 2) {
        j["step2_surface"] = {{"c_argmax", report.surface_c_argmax},
                              {"D_argmax", report.surface_D_argmax}};
    }
    if (report.completed_steps >= 3) {
        j["step3_lse"] = {{"min", report.lse_min},
                          {"valley_max_row_jump", report.lse_valley_max_row_jump}};
    }
    if (report.completed_steps >= 4) {
        ordered_json step4;
        step4["s_star"] = report.s_star;
        step4["unique_s_star"] = report.unique_s_star;
        step4["baseline_log10_beta1"] = report.baseline_point.first;
        step4["baseline_log10_beta2"] = report.baseline_point.second;
        step4["traces"] = ordered_json::array();
        for (const auto& t : report.traces) {
            ordered_json e;
            e["s"] = t.s;
            e["q_log10_beta1"] = t.q.first;
            e["q_log10_beta2"] = t.q.second;
            e["min_dist_to_baseline"] = t.min_dist_to_baseline;
            e["lse_at_q"] = t.lse_at_q;
            e["max_lse_ratio"] = t.max_lse_ratio;
            e["csv"] = t.csv;
            step4["traces"].push_back(std::move(e));
        }
        j["step4_reparametrization"] = std::move(step4);
    }
    j["artifacts"] = report.artifacts;
    return j.dump(2);
}

}  // namespace frapident
