#include "frapident/relationships.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "frapident/parallel.hpp"

namespace frapident {

namespace {

ModelParams with_betas(const ModelParams& base, double b1_log10, double b2_log10) {
    ModelParams p = base;
    p.beta1 = std::pow(10.0, b1_log10);
    p.beta2 = std::pow(10.0, b2_log10);
    return p;
}

// 1-parameter optimization of log10(beta2) at fixed beta1, c, D.
struct Beta2Opt {
    double beta2_log10 = 0.0;
    double sse = std::numeric_limits<double>::quiet_NaN();
    bool failed = false;
};

Beta2Opt optimize_beta2(const FrapCurve& data, const FrapSimulator& sim, const ModelParams& base,
                        double b1_log10, const std::vector<double>& b2_starts_log10,
                        const FitOptions& opts) {
    Beta2Opt out;
    try {
        const SseObjective objective = [&](const ModelParams& p) {
            return sse(data, sim.simulate(p, data.times));
        };
        std::vector<ModelParams> starts;
        starts.reserve(b2_starts_log10.size());
        for (double b2 : b2_starts_log10) starts.push_back(with_betas(base, b1_log10, b2));
        FitOptions point_opts = opts;
        point_opts.n_threads = 1;
        const FitResult r =
            fit_objective(objective, starts, {false, false, false, true}, point_opts);
        out.beta2_log10 = std::log10(r.params.beta2);
        out.sse = r.sse;
    } catch (const Error&) {
        out.failed = true;
    }
    return out;
}

}  // namespace

SubsetProfile subset_profile(const FrapCurve& data, double sigma, const FrapSimulator& sim,
                             const RegionConfig& region, const std::vector<double>& beta1_grid,
                             const ProfileOptions& opts) {
    if (beta1_grid.empty()) throw InvalidArgument("subset_profile: empty grid");
    if (!std::is_sorted(beta1_grid.begin(), beta1_grid.end()))
        throw InvalidArgument("subset_profile: grid must be sorted");

    SubsetProfile out;
    out.beta1_log10 = beta1_grid;
    out.beta2_opt_log10.resize(beta1_grid.size());
    out.loglik.resize(beta1_grid.size());

    const double cold = std::log10(std::clamp(region.baseline.beta2, opts.fit.bounds.beta2_lo,
                                              opts.fit.bounds.beta2_hi));

    std::optional<double> warm;
    for (std::size_t i = 0; i < beta1_grid.size(); ++i) {
        std::vector<double> starts;
        if (opts.warm_start && warm.has_value()) starts.push_back(*warm);
        starts.push_back(cold);
        const Beta2Opt r =
            optimize_beta2(data, sim, region.baseline, beta1_grid[i], starts, opts.fit);
        if (r.failed) {
            out.failed.push_back(static_cast<int>(i));
            out.beta2_opt_log10[i] = std::numeric_limits<double>::quiet_NaN();
            out.loglik[i] = std::numeric_limits<double>::quiet_NaN();
        } else {
            out.beta2_opt_log10[i] = r.beta2_log10;
            out.loglik[i] = log_likelihood_from_sse(r.sse, sigma);
            warm = r.beta2_log10;
        }
    }
    return out;
}

std::vector<double> lse_grid(const FrapCurve& reference, const FrapSimulator& sim,
                             const RegionConfig& region, const std::vector<double>& beta1_grid,
                             const std::vector<double>& beta2_grid, int n_threads) {
    if (beta1_grid.empty() || beta2_grid.empty()) throw InvalidArgument("lse_grid: empty grid");
    std::vector<double> grid(beta1_grid.size() * beta2_grid.size());
    parallel_for(grid.size(), n_threads, [&](std::size_t idx) {
        const std::size_t i = idx / beta2_grid.size();
        const std::size_t j = idx % beta2_grid.size();
        const ModelParams p = with_betas(region.baseline, beta1_grid[i], beta2_grid[j]);
        grid[idx] = sse(reference, sim.simulate(p, reference.times));
    });
    return grid;
}

SlopeField SlopeField::filled() const {
    SlopeField out = *this;
    for (std::size_t i = 0; i < b1_nodes.size(); ++i) {
        for (std::size_t j = 0; j < b2_nodes.size(); ++j) {
            const std::size_t idx = index(i, j);
            if (!flag[idx]) continue;
            double best_d2 = std::numeric_limits<double>::infinity();
            double best_slope = 0.0;
            for (std::size_t a = 0; a < b1_nodes.size(); ++a) {
                for (std::size_t b = 0; b < b2_nodes.size(); ++b) {
                    const std::size_t src = index(a, b);
                    if (flag[src]) continue;
                    const double di = static_cast<double>(a) - static_cast<double>(i);
                    const double dj = static_cast<double>(b) - static_cast<double>(j);
                    const double d2 = di * di + dj * dj;
                    if (d2 < best_d2) {
                        best_d2 = d2;
                        best_slope = slope[src];
                    }
                }
            }
            out.slope[idx] = best_slope;
            out.flag[idx] = 0;
        }
    }
    return out;
}

bool SlopeField::contains(double b1, double b2) const {
    return b1 >= b1_nodes.front() && b1 <= b1_nodes.back() && b2 >= b2_nodes.front() &&
           b2 <= b2_nodes.back();
}

double SlopeField::interpolate(double b1, double b2) const {
    if (!contains(b1, b2)) throw ExitedField("interpolation point outside the slope field");
    const auto cell = [](const std::vector<double>& nodes, double x) {
        std::size_t k = std::upper_bound(nodes.begin(), nodes.end(), x) - nodes.begin();
        if (k == 0) k = 1;
        if (k >= nodes.size()) k = nodes.size() - 1;
        return k - 1;
    };
    const std::size_t i = cell(b1_nodes, b1);
    const std::size_t j = cell(b2_nodes, b2);
    const double tx = (b1 - b1_nodes[i]) / (b1_nodes[i + 1] - b1_nodes[i]);
    const double ty = (b2 - b2_nodes[j]) / (b2_nodes[j + 1] - b2_nodes[j]);
    const double s00 = slope[index(i, j)];
    const double s10 = slope[index(i + 1, j)];
    const double s01 = slope[index(i, j + 1)];
    const double s11 = slope[index(i + 1, j + 1)];
    return (1 - tx) * (1 - ty) * s00 + tx * (1 - ty) * s10 + (1 - tx) * ty * s01 + tx * ty * s11;
}

SlopeField slope_field(const FrapSimulator& sim, const RegionConfig& region,
                       const std::vector<double>& b1_nodes, const std::vector<double>& b2_nodes,
                       const std::vector<double>& times, const SlopeFieldOptions& opts) {
    if (b1_nodes.size() < 2 || b2_nodes.size() < 2)
        throw InvalidArgument("slope_field: need at least a 2x2 node grid");
    if (!(opts.h > 0.0)) throw InvalidArgument("slope_field: h must be > 0");

    SlopeField field;
    field.b1_nodes = b1_nodes;
    field.b2_nodes = b2_nodes;
    field.slope.assign(b1_nodes.size() * b2_nodes.size(), 0.0);
    field.flag.assign(field.slope.size(), 0);

    parallel_for(field.slope.size(), opts.n_threads, [&](std::size_t idx) {
        const std::size_t i = idx / b2_nodes.size();
        const std::size_t j = idx % b2_nodes.size();
        const double b1 = b1_nodes[i];
        const double b2 = b2_nodes[j];
        try {
            const ModelParams truth = with_betas(region.baseline, b1, b2);
            const FrapCurve node_data = sim.simulate(truth, times);
            const std::vector<double> starts{b2};
            const Beta2Opt lo = optimize_beta2(node_data, sim, region.baseline, b1 - opts.h,
                                               starts, opts.profile.fit);
            const Beta2Opt hi = optimize_beta2(node_data, sim, region.baseline, b1 + opts.h,
                                               starts, opts.profile.fit);
            if (lo.failed || hi.failed) {
                field.flag[idx] = 1;
            } else {
                field.slope[idx] = (hi.beta2_log10 - lo.beta2_log10) / (2.0 * opts.h);
            }
        } catch (const Error&) {
            field.flag[idx] = 1;
        }
    });
    return field;
}

std::pair<double, double> tau_point(double s, double offset) {
    const double root = std::sqrt(s * s + 1.0);
    return {s + root + offset, -s + root + offset};
}

TauCurve tau_curve(const std::vector<double>& s_grid, double offset) {
    TauCurve tau;
    tau.offset = offset;
    tau.s = s_grid;
    tau.beta1_log10.reserve(s_grid.size());
    tau.beta2_log10.reserve(s_grid.size());
    for (double s : s_grid) {
        const auto [b1, b2] = tau_point(s, offset);
        tau.beta1_log10.push_back(b1);
        tau.beta2_log10.push_back(b2);
    }
    return tau;
}

ProfileResult s_profile(const FrapCurve& data, double sigma, const FrapSimulator& sim,
                        const RegionConfig& region, const std::vector<double>& s_grid,
                        bool profile_cD, const ProfileOptions& opts, double tau_offset) {
    if (s_grid.empty()) throw InvalidArgument("s_profile: empty grid");
    if (!std::is_sorted(s_grid.begin(), s_grid.end()))
        throw InvalidArgument("s_profile: grid must be sorted");

    ProfileResult result;
    result.interest = "s";
    result.grid = s_grid;
    result.sigma = sigma;
    result.threshold = likelihood_threshold(sigma, opts.delta_alpha);
    result.loglik_threshold = std::log(result.threshold);
    result.loglik.resize(s_grid.size());
    result.likelihood.resize(s_grid.size());
    result.optima.resize(s_grid.size());

    const std::array<bool, 4> free_mask{profile_cD, profile_cD, false, false};
    FitOptions point_opts = opts.fit;
    point_opts.n_threads = 1;

    std::optional<ModelParams> warm;
    auto run_point = [&](std::size_t i) {
        const auto [b1, b2] = tau_point(s_grid[i], tau_offset);
        ModelParams tau_params = with_betas(region.baseline, b1, b2);
        const SseObjective objective = [&](const ModelParams& p) {
            ModelParams q = tau_params;
            q.c = p.c;
            q.D = p.D;
            return sse(data, sim.simulate(q, data.times));
        };
        std::vector<ModelParams> starts;
        if (profile_cD && opts.warm_start && warm.has_value()) {
            ModelParams w = tau_params;
            w.c = warm->c;
            w.D = warm->D;
            starts.push_back(w);
        }
        starts.push_back(tau_params);
        try {
            double point_sse;
            ModelParams optimum = tau_params;
            if (profile_cD) {
                const FitResult r = fit_objective(objective, starts, free_mask, point_opts);
                point_sse = r.sse;
                optimum.c = r.params.c;
                optimum.D = r.params.D;
                warm = optimum;
            } else {
                point_sse = objective(tau_params);
            }
            result.optima[i] = optimum;
            result.loglik[i] = log_likelihood_from_sse(point_sse, sigma);
            result.likelihood[i] = std::exp(result.loglik[i]);
        } catch (const Error&) {
            result.failed.push_back(static_cast<int>(i));
            result.optima[i] = tau_params;
            result.loglik[i] = std::numeric_limits<double>::quiet_NaN();
            result.likelihood[i] = std::numeric_limits<double>::quiet_NaN();
        }
    };
    for (std::size_t i = 0; i < s_grid.size(); ++i) run_point(i);

    std::vector<double> clean;
    for (double value : result.loglik)
        if (std::isfinite(value)) clean.push_back(value);
    result.classification = clean.size() >= 5
                                ? classify(clean, result.loglik_threshold, opts.flatness_tol)
                                : Identifiability::StructurallyNonIdentifiable;
    return result;
}

std::vector<std::size_t> plateau_points(const ProfileResult& profile, double flatness_tol) {
    double best = -std::numeric_limits<double>::infinity();
    for (double value : profile.loglik)
        if (std::isfinite(value)) best = std::max(best, value);
    std::vector<std::size_t> points;
    for (std::size_t i = 0; i < profile.loglik.size(); ++i)
        if (std::isfinite(profile.loglik[i]) && best - profile.loglik[i] <= flatness_tol)
            points.push_back(i);
    return points;
}

ContourTrace trace_contour(const SlopeField& field, std::pair<double, double> start,
                           const FrapSimulator& sim, const RegionConfig& region,
                           const FrapCurve& reference, const TraceOptions& opts) {
    if (!field.contains(start.first, start.second))
        throw ExitedField("trace_contour: start point outside the slope field");
    if (!(opts.step > 0.0)) throw InvalidArgument("trace_contour: step must be > 0");

    const SlopeField smooth = field.filled();

    auto march = [&](double direction) {
        std::vector<std::pair<double, double>> points;
        double b1 = start.first;
        double b2 = start.second;
        for (int n = 0; n < opts.max_steps; ++n) {
            const double slope = smooth.interpolate(b1, b2);
            // Unit step along (1, slope), so consecutive points keep the
            // configured arc-length spacing even where the field is steep.
            const double norm = std::sqrt(1.0 + slope * slope);
            b1 += direction * opts.step / norm;
            b2 += direction * opts.step * slope / norm;
            if (!smooth.contains(b1, b2)) break;
            points.emplace_back(b1, b2);
        }
        return points;
    };

    const auto backward = march(-1.0);
    const auto forward = march(+1.0);

    ContourTrace trace;
    trace.beta1_log10.reserve(backward.size() + forward.size() + 1);
    trace.beta2_log10.reserve(backward.size() + forward.size() + 1);
    for (auto it = backward.rbegin(); it != backward.rend(); ++it) {
        trace.beta1_log10.push_back(it->first);
        trace.beta2_log10.push_back(it->second);
    }
    trace.start_index = trace.beta1_log10.size();
    trace.beta1_log10.push_back(start.first);
    trace.beta2_log10.push_back(start.second);
    for (const auto& pt : forward) {
        trace.beta1_log10.push_back(pt.first);
        trace.beta2_log10.push_back(pt.second);
    }

    trace.lse.resize(trace.beta1_log10.size());
    parallel_for(trace.lse.size(), opts.n_threads, [&](std::size_t i) {
        const ModelParams p =
            with_betas(region.baseline, trace.beta1_log10[i], trace.beta2_log10[i]);
        trace.lse[i] = sse(reference, sim.simulate(p, reference.times));
    });
    return trace;
}

}  // namespace frapident
