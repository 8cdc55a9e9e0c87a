#ifndef FRAPIDENT_TESTS_ORACLE_HPP
#define FRAPIDENT_TESTS_ORACLE_HPP

// Independent oracles for solver tests. These deliberately avoid the solver
// code paths: Bessel evaluations go through an integral quadrature and mode
// decay through direct exponentials.

#include <cmath>
#include <numbers>

namespace oracle {

// exp(-x) * I_n(x) via the integral representation
//   I_n(x) = (1/pi) * int_0^pi exp(x cos t) cos(n t) dt
// evaluated with Simpson's rule; the exp(x(cos t - 1)) form keeps every
// integrand value in [0, 1] so nothing overflows.
inline double scaled_bessel_i(int n, double x, int panels = 4000) {
    const double h = std::numbers::pi / panels;
    double sum = 0.0;
    for (int k = 0; k <= panels; ++k) {
        const double t = k * h;
        const double w = (k == 0 || k == panels) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
        sum += w * std::exp(x * (std::cos(t) - 1.0)) * std::cos(n * t);
    }
    return sum * h / (3.0 * std::numbers::pi);
}

// Ideal-disk uniform-bleach pure-diffusion recovery on an infinite plane:
//   F(t) = exp(-xi) * (I0(xi) + I1(xi)),  xi = 2 * tau_D / t,
//   tau_D = r^2 / (4 D).
inline double disk_diffusion_recovery(double t, double diffusion, double radius) {
    if (t <= 0.0) return 0.0;
    const double tau_d = radius * radius / (4.0 * diffusion);
    const double xi = 2.0 * tau_d / t;
    return scaled_bessel_i(0, xi) + scaled_bessel_i(1, xi);
}

}  // namespace oracle

#endif
