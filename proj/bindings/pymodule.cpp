#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "frapident/io.hpp"
#include "frapident/pipeline.hpp"

namespace py = pybind11;
using namespace frapident;

PYBIND11_MODULE(_frapident, m) {
    m.doc() = "FRAP transport-model simulation and identifiability analysis";

    py::register_exception<Error>(m, "FrapError", PyExc_RuntimeError);

    py::class_<ModelParams>(m, "ModelParams")
        .def(py::init<>())
        .def(py::init([](double c, double D, double beta1, double beta2) {
                 return ModelParams{c, D, beta1, beta2};
             }),
             py::arg("c"), py::arg("D"), py::arg("beta1"), py::arg("beta2"))
        .def_readwrite("c", &ModelParams::c)
        .def_readwrite("D", &ModelParams::D)
        .def_readwrite("beta1", &ModelParams::beta1)
        .def_readwrite("beta2", &ModelParams::beta2)
        .def("__repr__", [](const ModelParams& p) {
            return "ModelParams(c=" + format_number(p.c) + ", D=" + format_number(p.D) +
                   ", beta1=" + format_number(p.beta1) + ", beta2=" + format_number(p.beta2) +
                   ")";
        });

    m.def("validate_params", [](const ModelParams& p) {
        const ValidationResult r = validate_params(p);
        return py::make_tuple(r.ok(), r.field);
    }, py::arg("params"), "Returns (ok, offending_field).");

    m.def("equilibrium_fractions",
          [](const ModelParams& p, double fallback) { return equilibrium_fractions(p, fallback); },
          py::arg("params"), py::arg("fallback") = 0.5);

    py::class_<RegionConfig>(m, "RegionConfig")
        .def(py::init<>())
        .def_readwrite("region_id", &RegionConfig::region_id)
        .def_readwrite("baseline", &RegionConfig::baseline)
        .def_readwrite("sigma", &RegionConfig::sigma)
        .def_readwrite("description", &RegionConfig::description);

    m.def("default_regions", [] { return default_regions(); });
    m.def("load_regions_json", &load_regions_json, py::arg("path"));

    py::class_<BleachSpec>(m, "BleachSpec")
        .def(py::init<>())
        .def(py::init([](double cx, double cy, double diameter, double depth) {
                 return BleachSpec{cx, cy, diameter, depth};
             }),
             py::arg("center_x"), py::arg("center_y"), py::arg("diameter") = 5.0,
             py::arg("depth") = 1.0)
        .def_readwrite("center_x", &BleachSpec::center_x)
        .def_readwrite("center_y", &BleachSpec::center_y)
        .def_readwrite("diameter", &BleachSpec::diameter)
        .def_readwrite("depth", &BleachSpec::depth);

    py::class_<SpatialGrid>(m, "SpatialGrid")
        .def(py::init<>())
        .def(py::init<double, double, int, int>(), py::arg("Lx"), py::arg("Ly"), py::arg("Nx"),
             py::arg("Ny"))
        .def_readonly("Lx", &SpatialGrid::Lx)
        .def_readonly("Ly", &SpatialGrid::Ly)
        .def_readonly("Nx", &SpatialGrid::Nx)
        .def_readonly("Ny", &SpatialGrid::Ny)
        .def("dx", &SpatialGrid::dx)
        .def("dy", &SpatialGrid::dy);

    py::class_<FrapCurve>(m, "FrapCurve")
        .def(py::init<>())
        .def(py::init([](std::vector<double> times, std::vector<double> values) {
                 return FrapCurve{std::move(times), std::move(values)};
             }),
             py::arg("times"), py::arg("values"))
        .def_readwrite("times", &FrapCurve::times)
        .def_readwrite("values", &FrapCurve::values)
        .def("__len__", &FrapCurve::size);

    m.def("uniform_times", &uniform_times, py::arg("horizon") = 200.0, py::arg("n") = 41);

    py::class_<FrapSimulator>(m, "FrapSimulator")
        .def(py::init<const SpatialGrid&, const BleachSpec&, double>(), py::arg("grid"),
             py::arg("bleach"), py::arg("u_fraction") = 0.5)
        .def("simulate",
             [](const FrapSimulator& sim, const ModelParams& p,
                const std::vector<double>& times, std::optional<double> u_fraction) {
                 return sim.simulate(p, times, u_fraction);
             },
             py::arg("params"), py::arg("times"), py::arg("u_fraction") = py::none(),
             py::call_guard<py::gil_scoped_release>())
        .def("simulate_etdrk4",
             [](const FrapSimulator& sim, const ModelParams& p, const std::vector<double>& times,
                double dt, std::optional<double> u_fraction) {
                 return sim.simulate_etdrk4(p, times, {dt}, u_fraction);
             },
             py::arg("params"), py::arg("times"), py::arg("dt") = 0.05,
             py::arg("u_fraction") = py::none(), py::call_guard<py::gil_scoped_release>())
        .def_property_readonly("u_fraction", &FrapSimulator::u_fraction)
        .def_property_readonly("spot_pixel_count", &FrapSimulator::spot_pixel_count);

    m.def("simulate_frap", &simulate_frap, py::arg("params"), py::arg("grid"), py::arg("bleach"),
          py::arg("times"), py::arg("u_fraction") = 0.5,
          py::call_guard<py::gil_scoped_release>());

    m.def("generate_synthetic", &generate_synthetic, py::arg("params"), py::arg("grid"),
          py::arg("bleach"), py::arg("times"), py::arg("sigma"), py::arg("seed") = 0,
          py::arg("u_fraction") = 0.5, py::call_guard<py::gil_scoped_release>());

    m.def("sse", &sse, py::arg("data"), py::arg("model"));
    m.def("estimate_sigma", &estimate_sigma, py::arg("data"), py::arg("model"));

    py::class_<FitBounds>(m, "FitBounds")
        .def(py::init<>())
        .def_readwrite("c_lo", &FitBounds::c_lo)
        .def_readwrite("c_hi", &FitBounds::c_hi)
        .def_readwrite("D_lo", &FitBounds::D_lo)
        .def_readwrite("D_hi", &FitBounds::D_hi)
        .def_readwrite("beta1_lo", &FitBounds::beta1_lo)
        .def_readwrite("beta1_hi", &FitBounds::beta1_hi)
        .def_readwrite("beta2_lo", &FitBounds::beta2_lo)
        .def_readwrite("beta2_hi", &FitBounds::beta2_hi);

    py::class_<FitOptions>(m, "FitOptions")
        .def(py::init<>())
        .def_readwrite("bounds", &FitOptions::bounds)
        .def_readwrite("max_evals", &FitOptions::max_evals)
        .def_readwrite("n_starts", &FitOptions::n_starts)
        .def_readwrite("seed", &FitOptions::seed)
        .def_readwrite("simplex_tol", &FitOptions::simplex_tol)
        .def_readwrite("f_tol", &FitOptions::f_tol)
        .def_readwrite("n_threads", &FitOptions::n_threads);

    py::class_<FitResult>(m, "FitResult")
        .def_readonly("params", &FitResult::params)
        .def_readonly("sse", &FitResult::sse)
        .def_readonly("n_evals", &FitResult::n_evals)
        .def_readonly("converged", &FitResult::converged);

    m.def("fit",
          [](const FrapCurve& data, const FrapSimulator& sim, const ModelParams& guess,
             const FitOptions& opts) { return fit(data, sim, guess, opts); },
          py::arg("data"), py::arg("sim"), py::arg("guess"), py::arg("options") = FitOptions{},
          py::call_guard<py::gil_scoped_release>());

    m.def("gaussian_likelihood", &gaussian_likelihood, py::arg("y"), py::arg("ysim"),
          py::arg("sigma"));
    m.def("log_likelihood", &log_likelihood, py::arg("y"), py::arg("ysim"), py::arg("sigma"));
    m.def("likelihood_threshold", &likelihood_threshold, py::arg("sigma"),
          py::arg("delta_alpha") = kDeltaAlpha95);

    py::enum_<Identifiability>(m, "Identifiability")
        .value("Identifiable", Identifiability::Identifiable)
        .value("PracticallyNonIdentifiable", Identifiability::PracticallyNonIdentifiable)
        .value("StructurallyNonIdentifiable", Identifiability::StructurallyNonIdentifiable);

    m.def("classify",
          [](const std::vector<double>& loglik, double loglik_threshold, double flatness_tol) {
              return classify(loglik, loglik_threshold, flatness_tol);
          },
          py::arg("loglik"), py::arg("loglik_threshold"), py::arg("flatness_tol") = 0.05);

    py::class_<ProfileResult>(m, "ProfileResult")
        .def_readonly("interest", &ProfileResult::interest)
        .def_readonly("grid", &ProfileResult::grid)
        .def_readonly("loglik", &ProfileResult::loglik)
        .def_readonly("likelihood", &ProfileResult::likelihood)
        .def_readonly("threshold", &ProfileResult::threshold)
        .def_readonly("classification", &ProfileResult::classification)
        .def("argmax", &ProfileResult::argmax);

    py::enum_<ParamId>(m, "ParamId")
        .value("C", ParamId::C)
        .value("D", ParamId::Diff)
        .value("Beta1", ParamId::Beta1)
        .value("Beta2", ParamId::Beta2);

    py::class_<ProfileOptions>(m, "ProfileOptions")
        .def(py::init<>())
        .def_readwrite("fit", &ProfileOptions::fit)
        .def_readwrite("flatness_tol", &ProfileOptions::flatness_tol)
        .def_readwrite("delta_alpha", &ProfileOptions::delta_alpha)
        .def_readwrite("warm_start", &ProfileOptions::warm_start)
        .def_readwrite("n_threads", &ProfileOptions::n_threads);

    m.def("default_profile_grid", &default_profile_grid, py::arg("interest"),
          py::arg("baseline"), py::arg("bounds") = FitBounds{}, py::arg("n_points") = 49,
          py::arg("beta_decades") = 3.0);

    m.def("profile_1d",
          [](const FrapCurve& data, double sigma, const FrapSimulator& sim, ParamId interest,
             const std::vector<double>& grid, const ModelParams& baseline,
             const ProfileOptions& opts) {
              return profile_1d(data, sigma, sim, interest, grid, baseline, {}, opts);
          },
          py::arg("data"), py::arg("sigma"), py::arg("sim"), py::arg("interest"), py::arg("grid"),
          py::arg("baseline"), py::arg("options") = ProfileOptions{},
          py::call_guard<py::gil_scoped_release>());

    py::class_<Surface2D>(m, "Surface2D")
        .def_readonly("c_grid", &Surface2D::c_grid)
        .def_readonly("D_grid", &Surface2D::D_grid)
        .def_readonly("loglik", &Surface2D::loglik)
        .def_readonly("likelihood", &Surface2D::likelihood)
        .def_readonly("threshold", &Surface2D::threshold)
        .def("argmax_cell", &Surface2D::argmax_cell);

    m.def("profile_2d",
          [](const FrapCurve& data, double sigma, const FrapSimulator& sim,
             const std::vector<double>& c_grid, const std::vector<double>& D_grid,
             const ModelParams& baseline, const ProfileOptions& opts) {
              return profile_2d(data, sigma, sim, c_grid, D_grid, baseline, opts);
          },
          py::arg("data"), py::arg("sigma"), py::arg("sim"), py::arg("c_grid"),
          py::arg("D_grid"), py::arg("baseline"), py::arg("options") = ProfileOptions{},
          py::call_guard<py::gil_scoped_release>());

    py::class_<TauCurve>(m, "TauCurve")
        .def_readonly("s", &TauCurve::s)
        .def_readonly("beta1_log10", &TauCurve::beta1_log10)
        .def_readonly("beta2_log10", &TauCurve::beta2_log10)
        .def_readonly("offset", &TauCurve::offset);

    m.def("tau_curve", &tau_curve, py::arg("s_grid"), py::arg("offset") = -6.0);
    m.def("tau_point", &tau_point, py::arg("s"), py::arg("offset") = -6.0);

    py::class_<SubsetProfile>(m, "SubsetProfile")
        .def_readonly("beta1_log10", &SubsetProfile::beta1_log10)
        .def_readonly("beta2_opt_log10", &SubsetProfile::beta2_opt_log10)
        .def_readonly("loglik", &SubsetProfile::loglik);

    m.def("subset_profile", &subset_profile, py::arg("data"), py::arg("sigma"), py::arg("sim"),
          py::arg("region"), py::arg("beta1_grid"), py::arg("options") = ProfileOptions{},
          py::call_guard<py::gil_scoped_release>());

    m.def("lse_grid", &lse_grid, py::arg("reference"), py::arg("sim"), py::arg("region"),
          py::arg("beta1_grid"), py::arg("beta2_grid"), py::arg("n_threads") = 1,
          py::call_guard<py::gil_scoped_release>());

    py::class_<SlopeField>(m, "SlopeField")
        .def_readonly("b1_nodes", &SlopeField::b1_nodes)
        .def_readonly("b2_nodes", &SlopeField::b2_nodes)
        .def_readonly("slope", &SlopeField::slope)
        .def_readonly("flag", &SlopeField::flag)
        .def("interpolate", [](const SlopeField& f, double b1, double b2) {
            return f.filled().interpolate(b1, b2);
        });

    m.def("slope_field",
          [](const FrapSimulator& sim, const RegionConfig& region,
             const std::vector<double>& b1_nodes, const std::vector<double>& b2_nodes,
             const std::vector<double>& times, double h, int n_threads) {
              SlopeFieldOptions opts;
              opts.h = h;
              opts.n_threads = n_threads;
              return slope_field(sim, region, b1_nodes, b2_nodes, times, opts);
          },
          py::arg("sim"), py::arg("region"), py::arg("b1_nodes"), py::arg("b2_nodes"),
          py::arg("times"), py::arg("h") = 0.1, py::arg("n_threads") = 1,
          py::call_guard<py::gil_scoped_release>());

    m.def("s_profile", &s_profile, py::arg("data"), py::arg("sigma"), py::arg("sim"),
          py::arg("region"), py::arg("s_grid"), py::arg("profile_cD") = true,
          py::arg("options") = ProfileOptions{}, py::arg("tau_offset") = -6.0,
          py::call_guard<py::gil_scoped_release>());

    py::class_<ContourTrace>(m, "ContourTrace")
        .def_readonly("beta1_log10", &ContourTrace::beta1_log10)
        .def_readonly("beta2_log10", &ContourTrace::beta2_log10)
        .def_readonly("lse", &ContourTrace::lse)
        .def_readonly("start_index", &ContourTrace::start_index);

    m.def("trace_contour",
          [](const SlopeField& field, std::pair<double, double> start, const FrapSimulator& sim,
             const RegionConfig& region, const FrapCurve& reference, double step) {
              TraceOptions opts;
              opts.step = step;
              return trace_contour(field, start, sim, region, reference, opts);
          },
          py::arg("field"), py::arg("start"), py::arg("sim"), py::arg("region"),
          py::arg("reference"), py::arg("step") = 0.05,
          py::call_guard<py::gil_scoped_release>());

    py::class_<PipelineConfig>(m, "PipelineConfig")
        .def(py::init<>())
        .def_readwrite("domain_l", &PipelineConfig::domain_l)
        .def_readwrite("grid_n", &PipelineConfig::grid_n)
        .def_readwrite("horizon", &PipelineConfig::horizon)
        .def_readwrite("n_times", &PipelineConfig::n_times)
        .def_readwrite("noise_sigma", &PipelineConfig::noise_sigma)
        .def_readwrite("seed", &PipelineConfig::seed)
        .def_readwrite("profile_points", &PipelineConfig::profile_points)
        .def_readwrite("surface_points", &PipelineConfig::surface_points)
        .def_readwrite("lse_points", &PipelineConfig::lse_points)
        .def_readwrite("field_nodes", &PipelineConfig::field_nodes)
        .def_readwrite("s_points", &PipelineConfig::s_points)
        .def_readwrite("n_threads", &PipelineConfig::n_threads);

    m.def("full_config", &full_config);
    m.def("desk_config", &desk_config);
    m.def("load_config_json", &load_config_json, py::arg("path"));
    m.def("save_config_json", &save_config_json, py::arg("path"), py::arg("config"));

    m.def("run_pipeline",
          [](const RegionConfig& region, const std::string& data_source,
             const PipelineConfig& cfg, const std::string& out_dir) {
              return report_to_json(run_pipeline(region, data_source, cfg, out_dir));
          },
          py::arg("region"), py::arg("data_source"), py::arg("config"), py::arg("out_dir"),
          py::call_guard<py::gil_scoped_release>(),
          "Runs the four-step pipeline and returns the report as a JSON string.");

    m.def("load_curve_csv", &load_curve_csv, py::arg("path"));
    m.def("save_curve_csv", &save_curve_csv, py::arg("path"), py::arg("curve"));
}
