#include "frapident/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "frapident/parallel.hpp"

namespace frapident {

double log_likelihood_from_sse(double sse_value, double sigma) {
    if (!(sigma > 0.0)) throw InvalidArgument("log_likelihood: sigma must be > 0");
    const double var = sigma * sigma;
    return -0.5 * std::log(2.0 * std::numbers::pi * var) - sse_value / (2.0 * var);
}

double gaussian_likelihood(const FrapCurve& y, const FrapCurve& ysim, double sigma) {
    return std::exp(log_likelihood(y, ysim, sigma));
}

double log_likelihood(const FrapCurve& y, const FrapCurve& ysim, double sigma) {
    return log_likelihood_from_sse(sse(y, ysim), sigma);
}

double likelihood_threshold(double sigma, double delta_alpha) {
    if (!(sigma > 0.0)) throw InvalidArgument("threshold: sigma must be > 0");
    return std::exp(-0.5 * delta_alpha) / std::sqrt(2.0 * std::numbers::pi * sigma * sigma);
}

const char* to_string(Identifiability c) {
    switch (c) {
        case Identifiability::Identifiable: return "Identifiable";
        case Identifiability::PracticallyNonIdentifiable: return "PracticallyNonIdentifiable";
        case Identifiability::StructurallyNonIdentifiable: return "StructurallyNonIdentifiable";
    }
    return "?";
}

Identifiability classify(const std::vector<double>& loglik, double loglik_threshold,
                         double flatness_tol) {
    if (loglik.size() < 5) throw InvalidArgument("classify: need at least 5 grid points");
    const auto [min_it, max_it] = std::minmax_element(loglik.begin(), loglik.end());
    if (*max_it - *min_it < flatness_tol) return Identifiability::StructurallyNonIdentifiable;

    const std::size_t peak = std::distance(loglik.begin(),
                                           std::max_element(loglik.begin(), loglik.end()));
    bool below_left = false, below_right = false;
    for (std::size_t i = 0; i < peak; ++i)
        if (loglik[i] < loglik_threshold) below_left = true;
    for (std::size_t i = peak + 1; i < loglik.size(); ++i)
        if (loglik[i] < loglik_threshold) below_right = true;
    if (below_left && below_right) return Identifiability::Identifiable;
    return Identifiability::PracticallyNonIdentifiable;
}

std::size_t ProfileResult::argmax() const {
    std::size_t best = 0;
    bool have = false;
    for (std::size_t i = 0; i < loglik.size(); ++i) {
        if (!std::isfinite(loglik[i])) continue;
        if (!have || loglik[i] > loglik[best]) {
            best = i;
            have = true;
        }
    }
    return best;
}

std::optional<double> FixedParams::get(ParamId id) const {
    switch (id) {
        case ParamId::C: return c;
        case ParamId::Diff: return D;
        case ParamId::Beta1: return beta1;
        case ParamId::Beta2: return beta2;
    }
    return std::nullopt;
}

FitOptions clamp_beta_bounds(const FitOptions& opts, const ModelParams& baseline,
                             double decades) {
    if (!(decades > 0.0) || !std::isfinite(decades)) return opts;
    FitOptions clamped = opts;
    const double factor = std::pow(10.0, decades);
    clamped.bounds.beta1_lo =
        std::clamp(baseline.beta1 / factor, opts.bounds.beta1_lo, opts.bounds.beta1_hi);
    clamped.bounds.beta1_hi =
        std::clamp(baseline.beta1 * factor, opts.bounds.beta1_lo, opts.bounds.beta1_hi);
    clamped.bounds.beta2_lo =
        std::clamp(baseline.beta2 / factor, opts.bounds.beta2_lo, opts.bounds.beta2_hi);
    clamped.bounds.beta2_hi =
        std::clamp(baseline.beta2 * factor, opts.bounds.beta2_lo, opts.bounds.beta2_hi);
    return clamped;
}

namespace {

bool is_beta(ParamId id) { return id == ParamId::Beta1 || id == ParamId::Beta2; }

double scan_to_value(ParamId id, double scan) { return is_beta(id) ? std::pow(10.0, scan) : scan; }

// Optimizes the free nuisances at one fixed interest value, from the given
// starts; returns the best full parameter vector and its sse.
struct PointResult {
    ModelParams params;
    double sse = 0.0;
    bool failed = false;
};

PointResult optimize_point(const SseObjective& objective, const std::vector<ModelParams>& starts,
                           const std::array<bool, 4>& free_mask, const FitOptions& opts) {
    PointResult out;
    bool any_free = false;
    for (bool f : free_mask) any_free = any_free || f;
    try {
        if (!any_free) {
            // Pure likelihood slice: nothing to optimize.
            out.params = starts.front();
            out.sse = objective(out.params);
        } else {
            const FitResult r = fit_objective(objective, starts, free_mask, opts);
            out.params = r.params;
            out.sse = r.sse;
        }
    } catch (const Error&) {
        out.failed = true;
        out.params = starts.front();
        out.sse = std::numeric_limits<double>::quiet_NaN();
    }
    return out;
}

}  // namespace

ProfileResult profile_1d(const FrapCurve& data, double sigma, const FrapSimulator& sim,
                         ParamId interest, const std::vector<double>& grid,
                         const ModelParams& baseline, const FixedParams& fixed,
                         const ProfileOptions& opts) {
    if (grid.empty()) throw InvalidArgument("profile_1d: empty grid");
    if (!std::is_sorted(grid.begin(), grid.end()))
        throw InvalidArgument("profile_1d: grid must be sorted");
    if (fixed.get(interest).has_value())
        throw InvalidArgument("profile_1d: interest parameter cannot be fixed");

    // Free = everything except the interest and explicitly fixed parameters.
    std::array<bool, 4> free_mask{true, true, true, true};
    free_mask[static_cast<int>(interest)] = false;
    ModelParams cold = baseline;
    for (int d = 0; d < 4; ++d) {
        const ParamId id = static_cast<ParamId>(d);
        if (const auto v = fixed.get(id); v.has_value()) {
            free_mask[d] = false;
            set_param(cold, id, *v);
        }
    }

    ProfileResult result;
    result.interest = param_name(interest);
    result.grid = grid;
    result.sigma = sigma;
    result.threshold = likelihood_threshold(sigma, opts.delta_alpha);
    result.loglik_threshold = std::log(result.threshold);
    result.loglik.resize(grid.size());
    result.likelihood.resize(grid.size());
    result.optima.resize(grid.size());

    const SseObjective base_objective = [&](const ModelParams& p) {
        return sse(data, sim.simulate(p, data.times));
    };

    FitOptions point_opts = clamp_beta_bounds(opts.fit, cold, opts.nuisance_beta_decades);
    point_opts.n_threads = 1;

    auto scan_point = [&](std::size_t idx, const std::optional<ModelParams>& warm) {
        const double value = scan_to_value(interest, grid[idx]);
        auto with_interest = [&](ModelParams p) {
            set_param(p, interest, value);
            return p;
        };
        const SseObjective objective = [&](const ModelParams& p) {
            return base_objective(with_interest(p));
        };
        std::vector<ModelParams> starts;
        if (warm.has_value()) starts.push_back(with_interest(*warm));
        starts.push_back(with_interest(cold));
        return optimize_point(objective, starts, free_mask, point_opts);
    };

    auto record = [&](std::size_t idx, const PointResult& pr) {
        result.optima[idx] = pr.params;
        set_param(result.optima[idx], interest, scan_to_value(interest, grid[idx]));
        if (pr.failed) {
            result.failed.push_back(static_cast<int>(idx));
            result.loglik[idx] = std::numeric_limits<double>::quiet_NaN();
            result.likelihood[idx] = std::numeric_limits<double>::quiet_NaN();
        } else {
            result.loglik[idx] = log_likelihood_from_sse(pr.sse, sigma);
            result.likelihood[idx] = std::exp(result.loglik[idx]);
        }
    };

    if (opts.warm_start) {
        // March outward from the grid point nearest the baseline so warm
        // starts always originate from the best-constrained region.
        const double base_scan = is_beta(interest)
                                     ? std::log10(std::max(get_param(baseline, interest),
                                                           opts.fit.bounds.lo(interest)))
                                     : get_param(baseline, interest);
        std::size_t anchor = 0;
        for (std::size_t i = 1; i < grid.size(); ++i)
            if (std::abs(grid[i] - base_scan) < std::abs(grid[anchor] - base_scan)) anchor = i;

        std::optional<ModelParams> warm;
        PointResult anchor_result = scan_point(anchor, warm);
        record(anchor, anchor_result);

        warm = anchor_result.failed ? std::optional<ModelParams>{} : anchor_result.params;
        for (std::size_t i = anchor + 1; i < grid.size(); ++i) {
            const PointResult pr = scan_point(i, warm);
            record(i, pr);
            if (!pr.failed) warm = pr.params;
        }
        warm = anchor_result.failed ? std::optional<ModelParams>{} : anchor_result.params;
        for (std::size_t i = anchor; i-- > 0;) {
            const PointResult pr = scan_point(i, warm);
            record(i, pr);
            if (!pr.failed) warm = pr.params;
        }
    } else {
        std::vector<PointResult> points(grid.size());
        parallel_for(grid.size(), opts.n_threads,
                     [&](std::size_t i) { points[i] = scan_point(i, std::nullopt); });
        for (std::size_t i = 0; i < grid.size(); ++i) record(i, points[i]);
        std::sort(result.failed.begin(), result.failed.end());
    }

    // Classification ignores failed points.
    std::vector<double> clean;
    clean.reserve(result.loglik.size());
    for (double value : result.loglik)
        if (std::isfinite(value)) clean.push_back(value);
    result.classification = clean.size() >= 5
                                ? classify(clean, result.loglik_threshold, opts.flatness_tol)
                                : Identifiability::StructurallyNonIdentifiable;
    return result;
}

std::vector<double> default_profile_grid(ParamId interest, const ModelParams& baseline,
                                         const FitBounds& bounds, int n_points,
                                         double beta_decades) {
    if (n_points < 2) throw InvalidArgument("default_profile_grid: need >= 2 points");
    const double base = get_param(baseline, interest);
    if (is_beta(interest)) {
        const double center =
            std::log10(std::clamp(base, bounds.lo(interest), bounds.hi(interest)));
        const double lo = std::max(center - beta_decades, std::log10(bounds.lo(interest)));
        const double hi = std::min(center + beta_decades, std::log10(bounds.hi(interest)));
        return linspace(lo, hi, n_points);
    }
    const double lo = std::max(0.2 * base, bounds.lo(interest));
    const double hi = std::min(3.0 * base, bounds.hi(interest));
    return linspace(lo, hi, n_points);
}

std::pair<std::size_t, std::size_t> Surface2D::argmax_cell() const {
    std::size_t flat = 0;
    bool have = false;
    for (std::size_t i = 0; i < loglik.size(); ++i) {
        if (!std::isfinite(loglik[i])) continue;
        if (!have || loglik[i] > loglik[flat]) {
            flat = i;
            have = true;
        }
    }
    return {flat / D_grid.size(), flat % D_grid.size()};
}

Surface2D profile_2d(const FrapCurve& data, double sigma, const FrapSimulator& sim,
                     const std::vector<double>& c_grid, const std::vector<double>& D_grid,
                     const ModelParams& baseline, const ProfileOptions& opts) {
    if (c_grid.empty() || D_grid.empty()) throw InvalidArgument("profile_2d: empty grid");

    Surface2D surf;
    surf.c_grid = c_grid;
    surf.D_grid = D_grid;
    surf.sigma = sigma;
    surf.threshold = likelihood_threshold(sigma, opts.delta_alpha);
    surf.loglik_threshold = std::log(surf.threshold);
    const std::size_t n = c_grid.size() * D_grid.size();
    surf.loglik.resize(n);
    surf.likelihood.resize(n);
    surf.optima.resize(n);
    std::vector<int> failed_flags(n, 0);

    const std::array<bool, 4> free_mask{false, false, true, true};
    FitOptions point_opts = clamp_beta_bounds(opts.fit, baseline, opts.nuisance_beta_decades);
    point_opts.n_threads = 1;

    // Rows (fixed c) are independent; within a row the optimum warm-starts
    // the next cell, with a cold start from baseline alongside.
    parallel_for(c_grid.size(), opts.n_threads, [&](std::size_t i) {
        std::optional<ModelParams> warm;
        for (std::size_t j = 0; j < D_grid.size(); ++j) {
            ModelParams cell = baseline;
            cell.c = c_grid[i];
            cell.D = D_grid[j];
            const SseObjective objective = [&](const ModelParams& p) {
                ModelParams q = p;
                q.c = cell.c;
                q.D = cell.D;
                return sse(data, sim.simulate(q, data.times));
            };
            std::vector<ModelParams> starts;
            if (warm.has_value()) {
                ModelParams w = *warm;
                w.c = cell.c;
                w.D = cell.D;
                starts.push_back(w);
            }
            starts.push_back(cell);
            const PointResult pr = optimize_point(objective, starts, free_mask, point_opts);
            const std::size_t idx = surf.index(i, j);
            surf.optima[idx] = pr.params;
            surf.optima[idx].c = cell.c;
            surf.optima[idx].D = cell.D;
            if (pr.failed) {
                failed_flags[idx] = 1;
                surf.loglik[idx] = std::numeric_limits<double>::quiet_NaN();
                surf.likelihood[idx] = std::numeric_limits<double>::quiet_NaN();
            } else {
                surf.loglik[idx] = log_likelihood_from_sse(pr.sse, sigma);
                surf.likelihood[idx] = std::exp(surf.loglik[idx]);
                warm = pr.params;
            }
        }
    });

    for (std::size_t idx = 0; idx < n; ++idx)
        if (failed_flags[idx]) surf.failed.push_back(static_cast<int>(idx));
    return surf;
}

std::vector<double> linspace(double lo, double hi, int n) {
    if (n < 1) throw InvalidArgument("linspace: need n >= 1");
    if (n == 1) return {lo};
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = lo + (hi - lo) * i / (n - 1);
    return out;
}

}  // namespace frapident
