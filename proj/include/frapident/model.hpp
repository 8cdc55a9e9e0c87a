#ifndef FRAPIDENT_MODEL_HPP
#define FRAPIDENT_MODEL_HPP

#include <string>
#include <utility>
#include <vector>

#include "frapident/errors.hpp"

namespace frapident {

// Kinetic/transport parameters of the two-species model.
//   c     transport speed along microtubules, um/s
//   D     diffusion coefficient of the free species, um^2/s
//   beta1 unbinding rate (transported -> diffusing), 1/s
//   beta2 binding rate (diffusing -> transported), 1/s
struct ModelParams {
    double c = 0.0;
    double D = 0.0;
    double beta1 = 0.0;
    double beta2 = 0.0;
};

enum class ValidationIssue { None, NonNegativityViolation, NonFinite };

struct ValidationResult {
    ValidationIssue issue = ValidationIssue::None;
    std::string field;
    bool ok() const { return issue == ValidationIssue::None; }
};

// All four parameters must be finite and >= 0. Pure predicate.
ValidationResult validate_params(const ModelParams& p);

// Throwing variant for internal preconditions.
void require_valid(const ModelParams& p);

// Rate threshold below which the reaction subsystem is treated as degenerate.
inline constexpr double kDegenerateRateEps = 1e-12;

// Steady-state mass fractions of the reaction subsystem (beta1*u = beta2*v):
// fu = beta2/(beta1+beta2), fv = 1 - fu. When beta1+beta2 <= eps the split is
// undefined and `fallback` is used for fu. The pair always sums to 1 exactly.
std::pair<double, double> equilibrium_fractions(const ModelParams& p, double fallback = 0.5);

// Circular bleach region. Center in um, diameter in um, depth = fraction of
// fluorescence destroyed inside the spot (1 = complete bleach).
struct BleachSpec {
    double center_x = 0.0;
    double center_y = 0.0;
    double diameter = 5.0;
    double depth = 1.0;
};

// Normalized fluorescence recovery curve. times start at 0 (bleach instant),
// strictly increasing; values are dimensionless (pre-bleach spot integral = 1).
struct FrapCurve {
    std::vector<double> times;
    std::vector<double> values;

    std::size_t size() const { return times.size(); }
};

// Strict validation used by loaders of experimental data: matching lengths,
// times[0] == 0, strictly increasing, all values finite and >= 0.
void validate_curve(const FrapCurve& curve);

// Throws TimeGridMismatch unless both curves share an identical time vector.
void require_same_time_grid(const FrapCurve& a, const FrapCurve& b);

// One oocyte region: baseline parameter set plus the noise level estimated
// for that region's averaged FRAP data.
struct RegionConfig {
    int region_id = 0;
    ModelParams baseline;
    double sigma = 0.0;
    std::string description;
};

// Built-in region table (regions 1-3) with their sigma estimates.
const std::vector<RegionConfig>& default_regions();

// Lookup by id in a region list; throws InvalidArgument when absent.
const RegionConfig& find_region(const std::vector<RegionConfig>& regions, int region_id);

// JSON config IO (schema_version 1: {"schema_version":1,"regions":[...]}).
std::vector<RegionConfig> load_regions_json(const std::string& path);
void save_regions_json(const std::string& path, const std::vector<RegionConfig>& regions);

}  // namespace frapident

#endif
