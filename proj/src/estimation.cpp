#include "frapident/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "frapident/nelder_mead.hpp"
#include "frapident/parallel.hpp"

namespace frapident {

double sse(const FrapCurve& data, const FrapCurve& model) {
    require_same_time_grid(data, model);
    double total = 0.0;
    for (std::size_t i = 0; i < data.values.size(); ++i) {
        const double r = data.values[i] - model.values[i];
        total += r * r;
    }
    return total;
}

double estimate_sigma(const FrapCurve& data, const FrapCurve& model) {
    if (data.size() == 0) throw InvalidArgument("estimate_sigma: empty curve");
    return std::sqrt(sse(data, model) / static_cast<double>(data.size()));
}

ParamId param_from_name(const std::string& name) {
    if (name == "c") return ParamId::C;
    if (name == "D") return ParamId::Diff;
    if (name == "beta1") return ParamId::Beta1;
    if (name == "beta2") return ParamId::Beta2;
    throw InvalidArgument("unknown parameter name: " + name);
}

const char* param_name(ParamId id) {
    switch (id) {
        case ParamId::C: return "c";
        case ParamId::Diff: return "D";
        case ParamId::Beta1: return "beta1";
        case ParamId::Beta2: return "beta2";
    }
    throw InvalidArgument("bad ParamId");
}

double get_param(const ModelParams& p, ParamId id) {
    switch (id) {
        case ParamId::C: return p.c;
        case ParamId::Diff: return p.D;
        case ParamId::Beta1: return p.beta1;
        case ParamId::Beta2: return p.beta2;
    }
    throw InvalidArgument("bad ParamId");
}

void set_param(ModelParams& p, ParamId id, double value) {
    switch (id) {
        case ParamId::C: p.c = value; return;
        case ParamId::Diff: p.D = value; return;
        case ParamId::Beta1: p.beta1 = value; return;
        case ParamId::Beta2: p.beta2 = value; return;
    }
    throw InvalidArgument("bad ParamId");
}

double FitBounds::lo(ParamId id) const {
    switch (id) {
        case ParamId::C: return c_lo;
        case ParamId::Diff: return D_lo;
        case ParamId::Beta1: return beta1_lo;
        default: return beta2_lo;
    }
}

double FitBounds::hi(ParamId id) const {
    switch (id) {
        case ParamId::C: return c_hi;
        case ParamId::Diff: return D_hi;
        case ParamId::Beta1: return beta1_hi;
        default: return beta2_hi;
    }
}

ModelParams FitBounds::clip(const ModelParams& p) const {
    ModelParams q = p;
    q.c = std::clamp(q.c, c_lo, c_hi);
    q.D = std::clamp(q.D, D_lo, D_hi);
    q.beta1 = std::clamp(q.beta1, beta1_lo, beta1_hi);
    q.beta2 = std::clamp(q.beta2, beta2_lo, beta2_hi);
    return q;
}

namespace {

constexpr std::array<ParamId, 4> kAllParams = {ParamId::C, ParamId::Diff, ParamId::Beta1,
                                               ParamId::Beta2};

// Optimizer coordinates: c and D as-is, betas in log10.
double to_coord(ParamId id, double value, const FitBounds& b) {
    const double clipped = std::clamp(value, b.lo(id), b.hi(id));
    if (id == ParamId::Beta1 || id == ParamId::Beta2) return std::log10(clipped);
    return clipped;
}

double from_coord(ParamId id, double coord, const FitBounds& b) {
    double value = coord;
    if (id == ParamId::Beta1 || id == ParamId::Beta2) value = std::pow(10.0, coord);
    return std::clamp(value, b.lo(id), b.hi(id));
}

double coord_range(ParamId id, const FitBounds& b) {
    if (id == ParamId::Beta1 || id == ParamId::Beta2)
        return std::log10(b.hi(id)) - std::log10(b.lo(id));
    return b.hi(id) - b.lo(id);
}

}  // namespace

FitResult fit_objective(const SseObjective& objective, const std::vector<ModelParams>& starts,
                        const std::array<bool, 4>& free_mask, const FitOptions& opts) {
    if (starts.empty()) throw InvalidArgument("fit_objective: no starts");

    std::vector<ParamId> free_ids;
    for (ParamId id : kAllParams)
        if (free_mask[static_cast<int>(id)]) free_ids.push_back(id);
    if (free_ids.empty()) throw InvalidArgument("fit_objective: no free parameters");

    struct StartResult {
        ModelParams params;
        double sse = std::numeric_limits<double>::infinity();
        int n_evals = 0;
        bool converged = false;
        std::vector<std::pair<ModelParams, double>> trace;
    };
    std::vector<StartResult> results(starts.size());

    auto run_start = [&](std::size_t s) {
        const ModelParams& start = starts[s];
        ModelParams base = opts.bounds.clip(start);

        auto decode = [&](const std::vector<double>& x) {
            ModelParams p = base;
            for (std::size_t d = 0; d < free_ids.size(); ++d)
                set_param(p, free_ids[d], from_coord(free_ids[d], x[d], opts.bounds));
            return p;
        };

        StartResult& out = results[s];
        auto f = [&](const std::vector<double>& x) {
            const ModelParams p = decode(x);
            const double value = objective(p);
            if (opts.keep_trace && (out.trace.empty() || value < out.trace.back().second))
                out.trace.emplace_back(p, value);
            return value;
        };

        std::vector<double> x0(free_ids.size()), step(free_ids.size());
        for (std::size_t d = 0; d < free_ids.size(); ++d) {
            x0[d] = to_coord(free_ids[d], get_param(base, free_ids[d]), opts.bounds);
            step[d] = opts.init_step_frac * coord_range(free_ids[d], opts.bounds);
        }

        NelderMeadOptions nm;
        nm.simplex_tol = opts.simplex_tol;
        nm.f_tol = opts.f_tol;
        nm.max_evals = opts.max_evals;
        const NelderMeadResult r = nelder_mead(f, x0, step, nm);

        out.params = decode(r.x);
        out.sse = r.f;
        out.n_evals = r.n_evals;
        out.converged = r.converged;
    };

    parallel_for(starts.size(), opts.n_threads, run_start);

    FitResult best;
    best.sse = std::numeric_limits<double>::infinity();
    bool have_best = false;
    for (const auto& r : results) {
        best.n_evals += r.n_evals;
        const bool better =
            !have_best || r.sse < best.sse - 1e-14 ||
            (std::abs(r.sse - best.sse) < 1e-14 &&
             r.params.beta1 + r.params.beta2 < best.params.beta1 + best.params.beta2);
        if (better) {
            best.params = r.params;
            best.sse = r.sse;
            best.converged = r.converged;
            best.trace = r.trace;
            have_best = true;
        }
    }

    return best;
}

FitResult fit(const FrapCurve& data, const FrapSimulator& sim, const ModelParams& guess,
              const FitOptions& opts) {
    require_valid(guess);
    validate_curve(data);

    const SseObjective objective = [&](const ModelParams& p) {
        return sse(data, sim.simulate(p, data.times));
    };

    std::vector<ModelParams> starts;
    starts.push_back(guess);
    if (opts.n_starts > 1) {
        const auto lhs = latin_hypercube_starts(opts.n_starts - 1, opts.bounds, opts.seed);
        starts.insert(starts.end(), lhs.begin(), lhs.end());
    }
    return fit_objective(objective, starts, {true, true, true, true}, opts);
}

FrapCurve generate_synthetic(const ModelParams& p, const SpatialGrid& grid,
                             const BleachSpec& bleach, const std::vector<double>& times,
                             double sigma, std::uint64_t seed, double u_fraction) {
    if (sigma < 0.0) throw NonNegativityViolation("sigma");
    FrapCurve curve = simulate_frap(p, grid, bleach, times, u_fraction);
    if (sigma > 0.0) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> noise(0.0, sigma);
        for (double& v : curve.values) v += noise(rng);
    }
    return curve;
}

std::vector<ModelParams> latin_hypercube_starts(int n, const FitBounds& bounds,
                                                std::uint64_t seed) {
    if (n <= 0) return {};
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::array<std::vector<int>, 4> strata;
    for (auto& s : strata) {
        s.resize(n);
        for (int i = 0; i < n; ++i) s[i] = i;
        std::shuffle(s.begin(), s.end(), rng);
    }

    std::vector<ModelParams> starts(n);
    for (int i = 0; i < n; ++i) {
        ModelParams p;
        for (ParamId id : kAllParams) {
            const int d = static_cast<int>(id);
            const double frac = (strata[d][i] + unit(rng)) / n;
            double lo = bounds.lo(id), hi = bounds.hi(id);
            double value;
            if (id == ParamId::Beta1 || id == ParamId::Beta2) {
                const double llo = std::log10(lo), lhi = std::log10(hi);
                value = std::pow(10.0, llo + frac * (lhi - llo));
            } else {
                value = lo + frac * (hi - lo);
            }
            set_param(p, id, value);
        }
        starts[i] = p;
    }
    return starts;
}

}  // namespace frapident
