#ifndef FRAPIDENT_ESTIMATION_HPP
#define FRAPIDENT_ESTIMATION_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "frapident/model.hpp"
#include "frapident/solver.hpp"

namespace frapident {

// Sum of squared residuals between two curves on an identical time grid.
double sse(const FrapCurve& data, const FrapCurve& model);

// Root-mean-square residual: sqrt(sse / N).
double estimate_sigma(const FrapCurve& data, const FrapCurve& model);

enum class ParamId : int { C = 0, Diff = 1, Beta1 = 2, Beta2 = 3 };

ParamId param_from_name(const std::string& name);
const char* param_name(ParamId id);

double get_param(const ModelParams& p, ParamId id);
void set_param(ModelParams& p, ParamId id, double value);

// Optimization box. c and D are searched on a linear scale, beta1/beta2 on
// log10 scale; the defaults bracket all reported parameter sets with at
// least a decade of margin.
struct FitBounds {
    double c_lo = 0.0, c_hi = 1.0;
    double D_lo = 1e-3, D_hi = 10.0;
    double beta1_lo = 1e-8, beta1_hi = 1.0;
    double beta2_lo = 1e-8, beta2_hi = 1.0;

    double lo(ParamId id) const;
    double hi(ParamId id) const;
    ModelParams clip(const ModelParams& p) const;
};

struct FitOptions {
    FitBounds bounds;
    int max_evals = 400;    // per start
    int n_starts = 8;       // Latin-hypercube multi-start (start 0 = guess)
    std::uint64_t seed = 0;
    double simplex_tol = 1e-6;
    double f_tol = 1e-12;
    double init_step_frac = 0.05;  // initial simplex edge, fraction of range
    int n_threads = 1;
    bool keep_trace = false;
};

struct FitResult {
    ModelParams params;
    double sse = 0.0;
    int n_evals = 0;
    bool converged = false;
    std::vector<std::pair<ModelParams, double>> trace;
};

using SseObjective = std::function<double(const ModelParams&)>;

// Minimizes `objective` over the parameters flagged in `free_mask`, running
// one Nelder-Mead per start and keeping the best (ties within 1e-14 broken
// by smaller beta1+beta2). Fixed parameters are taken from each start.
FitResult fit_objective(const SseObjective& objective, const std::vector<ModelParams>& starts,
                        const std::array<bool, 4>& free_mask, const FitOptions& opts);

// Least-squares fit of all four parameters to `data` using forward
// simulations from `sim`. Start 0 is `guess`; the remaining starts are
// Latin-hypercube samples of the bounds box.
FitResult fit(const FrapCurve& data, const FrapSimulator& sim, const ModelParams& guess,
              const FitOptions& opts = {});

// Simulated curve plus i.i.d. Gaussian noise from a seeded generator.
// sigma = 0 reproduces simulate_frap exactly.
FrapCurve generate_synthetic(const ModelParams& p, const SpatialGrid& grid,
                             const BleachSpec& bleach, const std::vector<double>& times,
                             double sigma, std::uint64_t seed, double u_fraction = 0.5);

// Latin-hypercube sample of the bounds box (betas stratified in log10).
std::vector<ModelParams> latin_hypercube_starts(int n, const FitBounds& bounds,
                                                std::uint64_t seed);

}  // namespace frapident

#endif
