#ifndef FRAPIDENT_NELDER_MEAD_HPP
#define FRAPIDENT_NELDER_MEAD_HPP

#include <functional>
#include <vector>

namespace frapident {

struct NelderMeadOptions {
    double simplex_tol = 1e-6;  // max vertex spread, per coordinate
    double f_tol = 1e-12;       // best-worst function spread
    int max_evals = 400;
};

struct NelderMeadResult {
    std::vector<double> x;
    double f = 0.0;
    int n_evals = 0;
    bool converged = false;
};

// Derivative-free simplex minimization (reflection 1, expansion 2,
// contraction 0.5, shrink 0.5). `step` sets the initial simplex edge per
// coordinate. Terminates when the simplex collapses below simplex_tol or the
// function spread falls below f_tol.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             const std::vector<double>& x0, const std::vector<double>& step,
                             const NelderMeadOptions& opts = {});

}  // namespace frapident

#endif
