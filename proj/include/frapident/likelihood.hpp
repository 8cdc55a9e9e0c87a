#ifndef FRAPIDENT_LIKELIHOOD_HPP
#define FRAPIDENT_LIKELIHOOD_HPP

#include <optional>
#include <string>
#include <vector>

#include "frapident/estimation.hpp"
#include "frapident/model.hpp"
#include "frapident/solver.hpp"

namespace frapident {

// chi-square(1) 95% quantile used for the confidence threshold.
inline constexpr double kDeltaAlpha95 = 3.841;

// LL = -0.5*ln(2*pi*sigma^2) - sse/(2*sigma^2). The whole curve is treated
// as a single observation; the convention cancels from threshold crossings.
double log_likelihood_from_sse(double sse_value, double sigma);

// p = (2*pi*sigma^2)^(-1/2) * exp(-sse/(2*sigma^2))
double gaussian_likelihood(const FrapCurve& y, const FrapCurve& ysim, double sigma);
double log_likelihood(const FrapCurve& y, const FrapCurve& ysim, double sigma);

// Likelihood value below which a parameter value falls outside the
// confidence region: (2*pi*sigma^2)^(-1/2) * exp(-delta_alpha/2).
double likelihood_threshold(double sigma, double delta_alpha = kDeltaAlpha95);

enum class Identifiability {
    Identifiable,
    PracticallyNonIdentifiable,
    StructurallyNonIdentifiable,
};

const char* to_string(Identifiability c);

// Flat profile (max-min loglik < flatness_tol) -> structural; otherwise
// identifiable when the profile drops below the threshold on both sides of
// the argmax; otherwise practical. Needs >= 5 grid points.
Identifiability classify(const std::vector<double>& loglik, double loglik_threshold,
                         double flatness_tol = 0.05);

// 1D profile-likelihood scan. `grid` holds scan values in the interest
// parameter's native scan units (linear for c and D, log10 for the betas).
struct ProfileResult {
    std::string interest;
    std::vector<double> grid;
    std::vector<double> loglik;
    std::vector<double> likelihood;
    std::vector<ModelParams> optima;  // full parameter vector per grid point
    std::vector<int> failed;          // grid indices whose optimization threw
    double sigma = 0.0;
    double threshold = 0.0;          // likelihood units
    double loglik_threshold = 0.0;
    Identifiability classification = Identifiability::StructurallyNonIdentifiable;

    std::size_t argmax() const;
};

// Optional fixed values for nuisance parameters (the interest parameter may
// not appear here).
struct FixedParams {
    std::optional<double> c;
    std::optional<double> D;
    std::optional<double> beta1;
    std::optional<double> beta2;

    std::optional<double> get(ParamId id) const;
};

struct ProfileOptions {
    FitOptions fit;               // nuisance optimization settings
    double flatness_tol = 0.05;   // loglik units
    double delta_alpha = kDeltaAlpha95;
    bool warm_start = true;       // warm-start nuisances from the neighbor point
    // Nuisance rate parameters move at most this many decades from their
    // baseline during a profile scan (clipped to the global bounds). This
    // keeps the scan measuring local compensation structure instead of
    // jumping to fast-exchange corners of the box.
    double nuisance_beta_decades = 1.0;
    int n_threads = 1;            // used only when warm_start is false
};

// fit options with the beta box clamped around the baseline rates
FitOptions clamp_beta_bounds(const FitOptions& opts, const ModelParams& baseline,
                             double decades);

// Scan values in native units. For betas the grid is log10(beta).
ProfileResult profile_1d(const FrapCurve& data, double sigma, const FrapSimulator& sim,
                         ParamId interest, const std::vector<double>& grid,
                         const ModelParams& baseline, const FixedParams& fixed = {},
                         const ProfileOptions& opts = {});

// Default scan grids: linear [0.2x, 3x] baseline for c and D; log10
// baseline +- `beta_decades` for betas, clipped to the bounds box.
std::vector<double> default_profile_grid(ParamId interest, const ModelParams& baseline,
                                         const FitBounds& bounds, int n_points = 49,
                                         double beta_decades = 3.0);

// Two-dimensional (c, D) profile with beta1, beta2 re-optimized per cell.
struct Surface2D {
    std::vector<double> c_grid;
    std::vector<double> D_grid;
    std::vector<double> loglik;      // row-major |c_grid| x |D_grid|
    std::vector<double> likelihood;
    std::vector<ModelParams> optima;
    std::vector<int> failed;
    double sigma = 0.0;
    double threshold = 0.0;
    double loglik_threshold = 0.0;

    std::size_t index(std::size_t i, std::size_t j) const { return i * D_grid.size() + j; }
    std::pair<std::size_t, std::size_t> argmax_cell() const;
};

Surface2D profile_2d(const FrapCurve& data, double sigma, const FrapSimulator& sim,
                     const std::vector<double>& c_grid, const std::vector<double>& D_grid,
                     const ModelParams& baseline, const ProfileOptions& opts = {});

std::vector<double> linspace(double lo, double hi, int n);

}  // namespace frapident

#endif
