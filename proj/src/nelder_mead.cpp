#include "frapident/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "frapident/errors.hpp"

namespace frapident {

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             const std::vector<double>& x0, const std::vector<double>& step,
                             const NelderMeadOptions& opts) {
    const std::size_t dim = x0.size();
    if (dim == 0) throw InvalidArgument("nelder_mead: empty start point");
    if (step.size() != dim) throw InvalidArgument("nelder_mead: step size mismatch");

    NelderMeadResult result;
    std::vector<std::vector<double>> verts(dim + 1, x0);
    std::vector<double> fv(dim + 1);

    auto eval = [&](const std::vector<double>& x) {
        ++result.n_evals;
        const double y = f(x);
        return std::isfinite(y) ? y : std::numeric_limits<double>::max();
    };

    for (std::size_t i = 0; i < dim; ++i) verts[i + 1][i] += (step[i] != 0.0 ? step[i] : 1e-3);
    for (std::size_t i = 0; i <= dim; ++i) fv[i] = eval(verts[i]);

    std::vector<std::size_t> order(dim + 1);
    std::vector<double> centroid(dim), xr(dim), xe(dim), xc(dim);

    while (result.n_evals < opts.max_evals) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        const std::size_t best = order[0];
        const std::size_t worst = order[dim];
        const std::size_t second_worst = order[dim - 1];

        double spread = 0.0;
        for (std::size_t i = 0; i <= dim; ++i)
            for (std::size_t d = 0; d < dim; ++d)
                spread = std::max(spread, std::abs(verts[i][d] - verts[best][d]));
        if (spread < opts.simplex_tol || fv[worst] - fv[best] < opts.f_tol) {
            result.converged = true;
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= dim; ++i) {
            if (i == worst) continue;
            for (std::size_t d = 0; d < dim; ++d) centroid[d] += verts[i][d];
        }
        for (double& cd : centroid) cd /= static_cast<double>(dim);

        for (std::size_t d = 0; d < dim; ++d) xr[d] = centroid[d] + (centroid[d] - verts[worst][d]);
        const double fr = eval(xr);

        if (fr < fv[best]) {
            for (std::size_t d = 0; d < dim; ++d)
                xe[d] = centroid[d] + 2.0 * (centroid[d] - verts[worst][d]);
            const double fe = eval(xe);
            if (fe < fr) {
                verts[worst] = xe;
                fv[worst] = fe;
            } else {
                verts[worst] = xr;
                fv[worst] = fr;
            }
        } else if (fr < fv[second_worst]) {
            verts[worst] = xr;
            fv[worst] = fr;
        } else {
            const bool outside = fr < fv[worst];
            const std::vector<double>& towards = outside ? xr : verts[worst];
            for (std::size_t d = 0; d < dim; ++d)
                xc[d] = centroid[d] + 0.5 * (towards[d] - centroid[d]);
            const double fc = eval(xc);
            if (fc < std::min(fr, fv[worst])) {
                verts[worst] = xc;
                fv[worst] = fc;
            } else {
                // shrink towards the best vertex
                for (std::size_t i = 0; i <= dim; ++i) {
                    if (i == best) continue;
                    for (std::size_t d = 0; d < dim; ++d)
                        verts[i][d] = verts[best][d] + 0.5 * (verts[i][d] - verts[best][d]);
                    fv[i] = eval(verts[i]);
                }
            }
        }
    }

    const std::size_t best =
        std::distance(fv.begin(), std::min_element(fv.begin(), fv.end()));
    result.x = verts[best];
    result.f = fv[best];
    return result;
}

}  // namespace frapident
