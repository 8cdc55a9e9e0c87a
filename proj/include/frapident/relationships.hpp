#ifndef FRAPIDENT_RELATIONSHIPS_HPP
#define FRAPIDENT_RELATIONSHIPS_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "frapident/likelihood.hpp"
#include "frapident/model.hpp"
#include "frapident/solver.hpp"

namespace frapident {

// Optimal beta2 per fixed beta1, with c and D held at the region baseline.
// All beta axes are log10.
struct SubsetProfile {
    std::vector<double> beta1_log10;
    std::vector<double> beta2_opt_log10;
    std::vector<double> loglik;
    std::vector<int> failed;
};

SubsetProfile subset_profile(const FrapCurve& data, double sigma, const FrapSimulator& sim,
                             const RegionConfig& region, const std::vector<double>& beta1_grid,
                             const ProfileOptions& opts = {});

// Least-squares error between the reference curve and the forward model on a
// (log10 beta1, log10 beta2) grid, c and D at baseline. Row-major
// |beta1_grid| x |beta2_grid|.
std::vector<double> lse_grid(const FrapCurve& reference, const FrapSimulator& sim,
                             const RegionConfig& region, const std::vector<double>& beta1_grid,
                             const std::vector<double>& beta2_grid, int n_threads = 1);

// Local subset-profile slope d(log10 beta2_opt)/d(log10 beta1) on a node
// grid over the (log10 beta1, log10 beta2) plane. flag != 0 marks nodes
// whose optimization failed; they are excluded from interpolation.
struct SlopeField {
    std::vector<double> b1_nodes;
    std::vector<double> b2_nodes;
    std::vector<double> slope;       // row-major |b1_nodes| x |b2_nodes|
    std::vector<std::uint8_t> flag;

    std::size_t index(std::size_t i, std::size_t j) const { return i * b2_nodes.size() + j; }

    // Copy with flagged slopes replaced by the nearest unflagged node.
    SlopeField filled() const;

    // Bilinear interpolation at (b1, b2); requires the point inside the node
    // box and the field free of flags (use filled()).
    double interpolate(double b1, double b2) const;

    bool contains(double b1, double b2) const;
};

struct SlopeFieldOptions {
    double h = 0.1;           // central-difference step, decades
    ProfileOptions profile;   // 1-parameter optimization settings
    int n_threads = 1;
};

// Per node: noiseless synthetic data are generated at (c_base, D_base,
// 10^b1, 10^b2) and the subset-profile slope is estimated by a central
// difference of the optimal beta2 at b1 -+ h.
SlopeField slope_field(const FrapSimulator& sim, const RegionConfig& region,
                       const std::vector<double>& b1_nodes, const std::vector<double>& b2_nodes,
                       const std::vector<double>& times, const SlopeFieldOptions& opts = {});

// Analytic curve transverse to the slope field:
//   log10 beta1 = s + sqrt(s^2+1) + offset
//   log10 beta2 = -s + sqrt(s^2+1) + offset
// Every point satisfies (x-offset)*(y-offset) = 1.
struct TauCurve {
    std::vector<double> s;
    std::vector<double> beta1_log10;
    std::vector<double> beta2_log10;
    double offset = -6.0;
};

TauCurve tau_curve(const std::vector<double>& s_grid, double offset = -6.0);

std::pair<double, double> tau_point(double s, double offset = -6.0);

// Profile likelihood along tau as a function of s. With profile_cD set, c
// and D are re-optimized per point, otherwise held at the region baseline.
ProfileResult s_profile(const FrapCurve& data, double sigma, const FrapSimulator& sim,
                        const RegionConfig& region, const std::vector<double>& s_grid,
                        bool profile_cD, const ProfileOptions& opts = {},
                        double tau_offset = -6.0);

// Grid points whose loglik lies within flatness_tol of the maximum.
std::vector<std::size_t> plateau_points(const ProfileResult& profile, double flatness_tol = 0.05);

// Streamline of the slope field through Q, marched in both b1 directions by
// arc-length-normalized forward Euler steps until the trace leaves the node
// box. lse holds the least-squares error of the forward model at each point
// against the reference curve.
struct ContourTrace {
    std::vector<double> beta1_log10;
    std::vector<double> beta2_log10;
    std::vector<double> lse;
    std::size_t start_index = 0;  // position of Q in the polyline
};

struct TraceOptions {
    double step = 0.05;  // decades of arc length per Euler step
    int max_steps = 4000;  // per direction
    int n_threads = 1;
};

ContourTrace trace_contour(const SlopeField& field, std::pair<double, double> start,
                           const FrapSimulator& sim, const RegionConfig& region,
                           const FrapCurve& reference, const TraceOptions& opts = {});

}  // namespace frapident

#endif
