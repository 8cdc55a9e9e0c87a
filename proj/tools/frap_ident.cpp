#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "frapident/io.hpp"
#include "frapident/parallel.hpp"
#include "frapident/pipeline.hpp"
#include "frapident/svg.hpp"

namespace fs = std::filesystem;
using namespace frapident;

namespace {

struct GlobalArgs {
    std::string config_path;
    std::string regions_path;
    std::string preset = "full";
    int region_id = 1;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    int threads = 0;  // 0 = resolve from env/hardware
    int grid_n = 0;   // 0 = keep config value
    double domain_l = 0.0;
    std::string data_source = "synthetic";

    bool seed_set = false;
};

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("FRAP_IDENT_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return default_threads();
}

PipelineConfig resolve_config(const GlobalArgs& args) {
    PipelineConfig cfg;
    if (!args.config_path.empty()) {
        cfg = load_config_json(args.config_path);
    } else if (args.preset == "desk") {
        cfg = desk_config();
    } else if (args.preset == "full") {
        cfg = full_config();
    } else {
        throw InvalidArgument("unknown preset: " + args.preset + " (use full or desk)");
    }
    if (args.grid_n > 0) cfg.grid_n = args.grid_n;
    if (args.domain_l > 0.0) cfg.domain_l = args.domain_l;
    if (args.seed_set) cfg.seed = args.seed;
    cfg.n_threads = resolve_threads(args.threads);
    return cfg;
}

std::vector<RegionConfig> resolve_regions(const GlobalArgs& args) {
    if (!args.regions_path.empty()) return load_regions_json(args.regions_path);
    return default_regions();
}

FrapCurve resolve_data(const GlobalArgs& args, const RegionConfig& region,
                       const PipelineConfig& cfg) {
    if (args.data_source == "synthetic") {
        return generate_synthetic(region.baseline, cfg.make_grid(), cfg.make_bleach(),
                                  cfg.make_times(), cfg.noise_sigma, cfg.seed,
                                  cfg.prebleach_u_fraction);
    }
    return load_curve_csv(args.data_source);
}

void print_params(const ModelParams& p) {
    std::cout << "c=" << format_number(p.c) << " D=" << format_number(p.D)
              << " beta1=" << format_number(p.beta1) << " beta2=" << format_number(p.beta2)
              << "\n";
}

// Dispatches a CSV to the right plot by its header line.
void plot_any(const std::string& input, const std::string& output) {
    std::ifstream in(input);
    if (!in) throw InvalidArgument("cannot open: " + input);
    std::string header;
    std::getline(in, header);
    if (!header.empty() && header.back() == '\r') header.pop_back();

    std::vector<std::vector<double>> cols;
    std::string line;
    std::size_t n_cols = std::count(header.begin(), header.end(), ',') + 1;
    cols.resize(n_cols);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        std::size_t c = 0;
        while (std::getline(ss, field, ',') && c < n_cols) {
            try {
                cols[c].push_back(std::stod(field));
            } catch (const std::exception&) {
                cols[c].push_back(std::numeric_limits<double>::quiet_NaN());
            }
            ++c;
        }
    }

    auto series = [&](std::size_t xc, std::size_t yc, const std::string& label) {
        PlotSeries s;
        s.label = label;
        s.x = cols[xc];
        s.y = cols[yc];
        s.markers = true;
        return s;
    };

    if (header == "time_s,intensity") {
        plot_lines_svg(output, fs::path(input).stem().string(), "time (s)", "intensity",
                       {series(0, 1, "F(t)")});
    } else if (header.rfind("interest,value,", 0) == 0) {
        PlotSeries s;
        s.label = "likelihood";
        s.x = cols[1];
        s.y = cols[3];
        s.markers = true;
        const double threshold = cols[4].empty() ? 0.0 : cols[4].front();
        plot_lines_svg(output, fs::path(input).stem().string(), "value", "likelihood", {s},
                       {threshold});
    } else if (header == "s,log10_beta1,log10_beta2") {
        plot_lines_svg(output, fs::path(input).stem().string(), "log10 beta1", "log10 beta2",
                       {series(1, 2, "tau")});
    } else if (header == "log10_beta1,log10_beta2,lse") {
        plot_lines_svg(output, fs::path(input).stem().string(), "log10 beta1", "log10 beta2",
                       {series(0, 1, "points")});
    } else if (header == "log10_beta1,log10_beta2_opt,loglik") {
        plot_lines_svg(output, fs::path(input).stem().string(), "log10 beta1",
                       "log10 beta2 (optimal)", {series(0, 1, "subset profile")});
    } else {
        throw InvalidArgument("plot: unrecognized CSV header: " + header);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"FRAP transport-model simulation and identifiability toolkit"};
    app.require_subcommand(1);

    GlobalArgs args;
    app.add_option("--config", args.config_path, "pipeline config JSON")->check(CLI::ExistingFile);
    app.add_option("--regions", args.regions_path, "region table JSON")->check(CLI::ExistingFile);
    app.add_option("--preset", args.preset, "built-in config preset: full or desk");
    app.add_option("--region", args.region_id, "region id (1-3)");
    app.add_option("--out", args.out_dir, "output directory");
    app.add_option("--seed", args.seed, "RNG seed")
        ->each([&args](const std::string&) { args.seed_set = true; });
    app.add_option("--threads", args.threads, "worker threads (default: FRAP_IDENT_THREADS or hardware)");
    app.add_option("--grid-n", args.grid_n, "grid points per axis (power of two)");
    app.add_option("--domain-l", args.domain_l, "domain side length, um");
    app.add_option("--data", args.data_source, "curve source: 'synthetic' or a CSV path");

    // simulate -----------------------------------------------------------
    auto* cmd_sim = app.add_subcommand("simulate", "write the synthetic baseline curve");
    double sim_noise = 0.0;
    cmd_sim->add_option("--noise", sim_noise, "Gaussian noise stddev");
    cmd_sim->callback([&] {
        PipelineConfig cfg = resolve_config(args);
        const RegionConfig region = find_region(resolve_regions(args), args.region_id);
        const FrapCurve curve =
            generate_synthetic(region.baseline, cfg.make_grid(), cfg.make_bleach(),
                               cfg.make_times(), sim_noise, cfg.seed,
                               cfg.prebleach_u_fraction);
        fs::create_directories(args.out_dir);
        const fs::path path =
            fs::path(args.out_dir) / ("region" + std::to_string(region.region_id) + "_synthetic.csv");
        save_curve_csv(path.string(), curve);
        std::cout << "wrote " << path.string() << " (" << curve.size()
                  << " rows, F(0)=" << format_number(curve.values.front()) << ")\n";
    });

    // fit ------------------------------------------------------------------
    auto* cmd_fit = app.add_subcommand("fit", "least-squares fit of c, D, beta1, beta2");
    ModelParams fit_guess{0.1, 1.0, 1e-4, 1e-4};
    bool fit_guess_baseline = false;
    cmd_fit->add_option("--guess-c", fit_guess.c, "start value for c");
    cmd_fit->add_option("--guess-D", fit_guess.D, "start value for D");
    cmd_fit->add_option("--guess-beta1", fit_guess.beta1, "start value for beta1");
    cmd_fit->add_option("--guess-beta2", fit_guess.beta2, "start value for beta2");
    cmd_fit->add_flag("--guess-baseline", fit_guess_baseline, "start from the region baseline");
    cmd_fit->callback([&] {
        PipelineConfig cfg = resolve_config(args);
        const RegionConfig region = find_region(resolve_regions(args), args.region_id);
        const FrapCurve data = resolve_data(args, region, cfg);
        const FrapSimulator sim(cfg.make_grid(), cfg.make_bleach(), cfg.prebleach_u_fraction);
        FitOptions opts = cfg.fit;
        opts.seed = cfg.seed;
        opts.n_threads = cfg.n_threads;
        const ModelParams guess = fit_guess_baseline ? region.baseline : fit_guess;
        const FitResult result = fit(data, sim, guess, opts);
        std::cout << "sse=" << format_number(result.sse) << " evals=" << result.n_evals
                  << " converged=" << (result.converged ? "yes" : "no") << "\n";
        print_params(result.params);
    });

    // sigma ------------------------------------------------------------------
    auto* cmd_sigma = app.add_subcommand("sigma", "noise level estimate between two curves");
    std::string sigma_model;
    cmd_sigma->add_option("--model", sigma_model,
                          "model curve CSV (default: simulated region baseline)");
    cmd_sigma->callback([&] {
        PipelineConfig cfg = resolve_config(args);
        const RegionConfig region = find_region(resolve_regions(args), args.region_id);
        const FrapCurve data = resolve_data(args, region, cfg);
        FrapCurve model;
        if (!sigma_model.empty()) {
            model = load_curve_csv(sigma_model);
        } else {
            model = simulate_frap(region.baseline, cfg.make_grid(), cfg.make_bleach(),
                                  data.times, cfg.prebleach_u_fraction);
        }
        std::cout << "sigma=" << format_number(estimate_sigma(data, model))
                  << " sse=" << format_number(sse(data, model)) << " n=" << data.size() << "\n";
    });

    // profile ------------------------------------------------------------------
    auto* cmd_profile = app.add_subcommand("profile", "1D profile likelihood for one parameter");
    std::string profile_param = "D";
    cmd_profile->add_option("--param", profile_param, "interest parameter: c, D, beta1, beta2");
    cmd_profile->callback([&] {
        PipelineConfig cfg = resolve_config(args);
        const RegionConfig region = find_region(resolve_regions(args), args.region_id);
        const FrapCurve data = resolve_data(args, region, cfg);
        const FrapSimulator sim(cfg.make_grid(), cfg.make_bleach(), cfg.prebleach_u_fraction);
        const ParamId interest = param_from_name(profile_param);
        const auto grid_points = default_profile_grid(interest, region.baseline, cfg.fit.bounds,
                                                      cfg.profile_points, cfg.beta_decades);
        const ProfileResult prof = profile_1d(data, region.sigma, sim, interest, grid_points,
                                              region.baseline, {}, cfg.make_profile_options());
        fs::create_directories(args.out_dir);
        const fs::path csv = fs::path(args.out_dir) / ("profile_" + profile_param + ".csv");
        save_profile_csv(csv.string(), prof);
        plot_profile_svg((fs::path(args.out_dir) / ("profile_" + profile_param + ".svg")).string(),
                         prof, "profile: " + profile_param);
        std::cout << "classification=" << to_string(prof.classification)
                  << " argmax=" << format_number(prof.grid[prof.argmax()])
                  << " threshold=" << format_number(prof.threshold) << "\n"
                  << "wrote " << csv.string() << "\n";
    });

    // profile2d ------------------------------------------------------------------
    auto* cmd_surface = app.add_subcommand("profile2d", "2D (c, D) profile likelihood surface");
    cmd_surface->callback([&] {
        PipelineConfig cfg = resolve_config(args);
        const RegionConfig region = find_region(resolve_regions(args), args.region_id);
        const FrapCurve data = resolve_data(args, region, cfg);
        const FrapSimulator sim(cfg.make_grid(), cfg.make_bleach(), cfg.prebleach_u_fraction);
        const auto c_grid = linspace(std::max(0.2 * region.baseline.c, cfg.fit.bounds.c_lo),
                                     std::min(3.0 * region.baseline.c, cfg.fit.bounds.c_hi),
                                     cfg.surface_points);
        const auto D_grid = linspace(std::max(0.2 * region.baseline.D, cfg.fit.bounds.D_lo),
                                     std::min(3.0 * region.baseline.D, cfg.fit.bounds.D_hi),
                                     cfg.surface_points);
        ProfileOptions opts = cfg.make_profile_options();
        opts.n_threads = cfg.n_threads;
        const Surface2D surface = profile_2d(data, region.sigma, sim, c_grid, D_grid,
                                             region.baseline, opts);
        fs::create_directories(args.out_dir);
        const fs::path csv = fs::path(args.out_dir) / "surface_cD.csv";
        save_surface_csv(csv.string(), surface);
        plot_heatmap_svg((fs::path(args.out_dir) / "surface_cD.svg").string(),
                         "2D profile likelihood", "c", "D", surface.c_grid, surface.D_grid,
                         surface.likelihood, false);
        const auto [ci, dj] = surface.argmax_cell();
        std::cout << "argmax c=" << format_number(surface.c_grid[ci])
                  << " D=" << format_number(surface.D_grid[dj]) << "\n"
                  << "wrote " << csv.string() << "\n";
    });

    // subset ------------------------------------------------------------------
    auto* cmd_subset = app.add_subcommand("subset", "optimal beta2 per fixed beta1");
    cmd_subset->callback([&] {
        PipelineConfig cfg = resolve_config(args);
        const RegionConfig region = find_region(resolve_regions(args), args.region_id);
        const FrapCurve data = resolve_data(args, region, cfg);
        const FrapSimulator sim(cfg.make_grid(), cfg.make_bleach(), cfg.prebleach_u_fraction);
        const double center = std::log10(region.baseline.beta1);
        const auto b1 = linspace(std::max(center - cfg.field_decades, -8.0),
                                 std::min(center + cfg.field_decades, 0.0), cfg.profile_points);
        const SubsetProfile subset =
            subset_profile(data, region.sigma, sim, region, b1, cfg.make_profile_options());
        fs::create_directories(args.out_dir);
        const fs::path csv = fs::path(args.out_dir) / "subset_profile.csv";
        save_subset_csv(csv.string(), subset);
        std::cout << "wrote " << csv.string() << "\n";
    });

    // lse-grid ------------------------------------------------------------------
    auto* cmd_lse = app.add_subcommand("lse-grid", "least-squares error over a beta grid");
    cmd_lse->callback([&] {
        PipelineConfig cfg = resolve_config(args);
        const RegionConfig region = find_region(resolve_regions(args), args.region_id);
        const FrapCurve data = resolve_data(args, region, cfg);
        const FrapSimulator sim(cfg.make_grid(), cfg.make_bleach(), cfg.prebleach_u_fraction);
        auto beta_grid = [&](double baseline) {
            const double center = std::log10(baseline);
            return linspace(std::max(center - cfg.beta_decades, -8.0),
                            std::min(center + cfg.beta_decades, 0.0), cfg.lse_points);
        };
        const auto b1 = beta_grid(region.baseline.beta1);
        const auto b2 = beta_grid(region.baseline.beta2);
        const auto lse = lse_grid(data, sim, region, b1, b2, cfg.n_threads);
        fs::create_directories(args.out_dir);
        const fs::path csv = fs::path(args.out_dir) / "lse_grid.csv";
        save_lse_csv(csv.string(), b1, b2, lse);
        plot_heatmap_svg((fs::path(args.out_dir) / "lse_grid.svg").string(), "LSE contours",
                         "log10 beta1", "log10 beta2", b1, b2, lse, true);
        std::cout << "min_lse=" << format_number(*std::min_element(lse.begin(), lse.end()))
                  << "\nwrote " << csv.string() << "\n";
    });

    // slope-field ------------------------------------------------------------------
    auto* cmd_field = app.add_subcommand("slope-field", "subset-profile slope vector field");
    cmd_field->callback([&] {
        PipelineConfig cfg = resolve_config(args);
        const RegionConfig region = find_region(resolve_regions(args), args.region_id);
        const FrapSimulator sim(cfg.make_grid(), cfg.make_bleach(), cfg.prebleach_u_fraction);
        auto node_grid = [&](double baseline) {
            const double center = std::log10(baseline);
            return linspace(std::max(center - cfg.field_decades, -8.0),
                            std::min(center + cfg.field_decades, 0.0), cfg.field_nodes);
        };
        SlopeFieldOptions opts;
        opts.h = cfg.field_h;
        opts.profile = cfg.make_profile_options();
        opts.n_threads = cfg.n_threads;
        const SlopeField field = slope_field(sim, region, node_grid(region.baseline.beta1),
                                             node_grid(region.baseline.beta2), cfg.make_times(),
                                             opts);
        fs::create_directories(args.out_dir);
        const fs::path csv = fs::path(args.out_dir) / "slope_field.csv";
        save_field_csv(csv.string(), field);
        plot_field_svg((fs::path(args.out_dir) / "slope_field.svg").string(), "slope field",
                       field, {}, {});
        std::cout << "wrote " << csv.string() << "\n";
    });

    // tau ------------------------------------------------------------------
    auto* cmd_tau = app.add_subcommand("tau", "analytic transverse curve");
    double tau_s_min = -3.0, tau_s_max = 3.0, tau_offset = -6.0;
    int tau_n = 49;
    cmd_tau->add_option("--s-min", tau_s_min, "lower end of the s grid");
    cmd_tau->add_option("--s-max", tau_s_max, "upper end of the s grid");
    cmd_tau->add_option("--n", tau_n, "number of points");
    cmd_tau->add_option("--offset", tau_offset, "hyperbola offset");
    cmd_tau->callback([&] {
        const TauCurve tau = tau_curve(linspace(tau_s_min, tau_s_max, tau_n), tau_offset);
        fs::create_directories(args.out_dir);
        const fs::path csv = fs::path(args.out_dir) / "tau.csv";
        save_tau_csv(csv.string(), tau);
        std::cout << "wrote " << csv.string() << " (" << tau.s.size() << " rows)\n";
    });

    // s-profile ------------------------------------------------------------------
    auto* cmd_sprof = app.add_subcommand("s-profile", "profile likelihood along tau");
    bool sprof_fix_cd = false;
    cmd_sprof->add_flag("--fix-cd", sprof_fix_cd, "hold c and D at baseline instead of refitting");
    cmd_sprof->callback([&] {
        PipelineConfig cfg = resolve_config(args);
        const RegionConfig region = find_region(resolve_regions(args), args.region_id);
        const FrapCurve data = resolve_data(args, region, cfg);
        const FrapSimulator sim(cfg.make_grid(), cfg.make_bleach(), cfg.prebleach_u_fraction);
        const auto s_grid = linspace(cfg.s_min, cfg.s_max, cfg.s_points);
        const ProfileResult prof =
            s_profile(data, region.sigma, sim, region, s_grid, !sprof_fix_cd,
                      cfg.make_profile_options(), cfg.tau_offset);
        fs::create_directories(args.out_dir);
        const fs::path csv = fs::path(args.out_dir) / "s_profile.csv";
        save_profile_csv(csv.string(), prof);
        plot_profile_svg((fs::path(args.out_dir) / "s_profile.svg").string(), prof, "s-profile");
        std::cout << "s_star=" << format_number(prof.grid[prof.argmax()])
                  << " classification=" << to_string(prof.classification) << "\n"
                  << "wrote " << csv.string() << "\n";
    });

    // trace ------------------------------------------------------------------
    auto* cmd_trace = app.add_subcommand("trace", "contour trace through a point Q on tau");
    double trace_s = 0.0;
    cmd_trace->add_option("--s", trace_s, "tau parameter of the start point Q")->required();
    cmd_trace->callback([&] {
        PipelineConfig cfg = resolve_config(args);
        const RegionConfig region = find_region(resolve_regions(args), args.region_id);
        const FrapCurve data = resolve_data(args, region, cfg);
        const FrapSimulator sim(cfg.make_grid(), cfg.make_bleach(), cfg.prebleach_u_fraction);
        auto node_grid = [&](double baseline) {
            const double center = std::log10(baseline);
            return linspace(std::max(center - cfg.field_decades, -8.0),
                            std::min(center + cfg.field_decades, 0.0), cfg.field_nodes);
        };
        SlopeFieldOptions fopts;
        fopts.h = cfg.field_h;
        fopts.profile = cfg.make_profile_options();
        fopts.n_threads = cfg.n_threads;
        const SlopeField field = slope_field(sim, region, node_grid(region.baseline.beta1),
                                             node_grid(region.baseline.beta2), cfg.make_times(),
                                             fopts);
        TraceOptions topts;
        topts.step = cfg.trace_step;
        topts.n_threads = cfg.n_threads;
        const ContourTrace trace =
            trace_contour(field, tau_point(trace_s, cfg.tau_offset), sim, region, data, topts);
        fs::create_directories(args.out_dir);
        const fs::path csv = fs::path(args.out_dir) / "trace.csv";
        save_trace_csv(csv.string(), trace);
        std::cout << "points=" << trace.beta1_log10.size()
                  << " lse_at_q=" << format_number(trace.lse[trace.start_index]) << "\n"
                  << "wrote " << csv.string() << "\n";
    });

    // pipeline ------------------------------------------------------------------
    auto* cmd_pipeline = app.add_subcommand("pipeline", "run the four-step identifiability pipeline");
    cmd_pipeline->callback([&] {
        PipelineConfig cfg = resolve_config(args);
        const RegionConfig region = find_region(resolve_regions(args), args.region_id);
        const PipelineReport report = run_pipeline(region, args.data_source, cfg, args.out_dir);
        std::cout << report_to_json(report) << "\n";
        if (report.error) throw Error("pipeline aborted in step " +
                                      std::to_string(report.completed_steps + 1) + ": " +
                                      *report.error);
    });

    // plot ------------------------------------------------------------------
    auto* cmd_plot = app.add_subcommand("plot", "render an emitted CSV as SVG");
    std::string plot_input, plot_output;
    cmd_plot->add_option("--input", plot_input, "CSV file")->required()->check(CLI::ExistingFile);
    cmd_plot->add_option("--output", plot_output, "SVG path (default: input with .svg)");
    cmd_plot->callback([&] {
        const std::string output =
            plot_output.empty() ? fs::path(plot_input).replace_extension(".svg").string()
                                : plot_output;
        plot_any(plot_input, output);
        std::cout << "wrote " << output << "\n";
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);  // prints usage or help text
        return code == 0 ? 0 : 1;
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const NonNegativityViolation& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const NonFinite& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
