#ifndef FRAPIDENT_IO_HPP
#define FRAPIDENT_IO_HPP

#include <string>
#include <vector>

#include "frapident/likelihood.hpp"
#include "frapident/model.hpp"
#include "frapident/relationships.hpp"

namespace frapident {

// All writers print numbers with 12 significant digits; loaders re-read the
// files without loss beyond that precision.
std::string format_number(double value);

// Curve CSV: header `time_s,intensity`.
void save_curve_csv(const std::string& path, const FrapCurve& curve);
FrapCurve load_curve_csv(const std::string& path);

// Profile CSV: `interest,value,loglik,likelihood,threshold,c,D,beta1,beta2`.
void save_profile_csv(const std::string& path, const ProfileResult& profile);

// Surface CSV (long format): `c,D,loglik,likelihood,beta1_opt,beta2_opt`.
void save_surface_csv(const std::string& path, const Surface2D& surface);

// Subset-profile CSV: `log10_beta1,log10_beta2_opt,loglik`.
void save_subset_csv(const std::string& path, const SubsetProfile& subset);

// LSE grid CSV (long format): `log10_beta1,log10_beta2,lse`.
void save_lse_csv(const std::string& path, const std::vector<double>& beta1_grid,
                  const std::vector<double>& beta2_grid, const std::vector<double>& lse);

// Slope-field CSV: `log10_beta1,log10_beta2,slope,flag`.
void save_field_csv(const std::string& path, const SlopeField& field);

// Tau CSV: `s,log10_beta1,log10_beta2`.
void save_tau_csv(const std::string& path, const TauCurve& tau);

// Trace CSV: `log10_beta1,log10_beta2,lse`.
void save_trace_csv(const std::string& path, const ContourTrace& trace);

}  // namespace frapident

#endif
