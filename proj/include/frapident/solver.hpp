#ifndef FRAPIDENT_SOLVER_HPP
#define FRAPIDENT_SOLVER_HPP

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "frapident/grid.hpp"
#include "frapident/model.hpp"

namespace frapident {

using cplx = std::complex<double>;

// 2x2 complex matrix, row-major: [m00 m01; m10 m11].
struct Mat2c {
    cplx m00, m01, m10, m11;
};

// Fourier symbol of the transport model:
//   L = [ i*c*ky_adv - b1        b2        ]
//       [ b1                 -D*k2 - b2    ]
// ky_adv is the wavenumber entering the odd (advection) derivative; callers
// zero it on the Nyquist row so real fields stay real. k2 = kx^2 + ky^2.
Mat2c mode_symbol(double ky_adv, double k_squared, const ModelParams& p);

// Advection wavenumber convention: ky with the Nyquist entry zeroed.
double adv_wavenumber(const SpatialGrid& grid, int jy);

// exp(L*dt) for a 2x2 matrix via closed-form eigen-decomposition, with a
// scaled Taylor-series branch when the eigenvalues are within
// 1e-8*max(|l1|,|l2|,1) of coalescing.
Mat2c mat2_exp(const Mat2c& L, double dt);

// Per-mode exact propagators P_k = exp(L_k*dt) over the full Nx x Ny mode set.
struct SpectralPropagator {
    int Nx = 0;
    int Ny = 0;
    double dt = 0.0;
    std::vector<Mat2c> P;  // row-major, one per (kx_i, ky_j)
};

SpectralPropagator build_propagator(const SpatialGrid& grid, const ModelParams& p, double dt);

// Post-bleach state: (u, v) = (u_fraction, 1-u_fraction) outside the spot,
// both species scaled by (1-depth) inside. The default is an equal split of
// the pre-bleach fluorescence between the two pools; pass
// equilibrium_fractions(p).first to start from the reaction steady state.
// Throws GridTooCoarse when the grid does not resolve the spot.
FieldState initial_condition(const SpatialGrid& grid, const ModelParams& p,
                             const BleachSpec& bleach, double u_fraction = 0.5);

// One exact step: FFT -> per-mode multiply -> inverse FFT. The imaginary
// residue of the round-trip is checked (<= 1e-10 relative) before being
// discarded. Throws ShapeMismatch when the state does not match the
// propagator's grid.
FieldState advance(const FieldState& state, const SpectralPropagator& prop,
                   const SpatialGrid& grid);

// One ETDRK4 step treating the diagonal advection/diffusion symbol as the
// stiff linear part and the beta-coupling as the nonlinear term. phi-function
// coefficients are evaluated by contour averaging (radius-1 circle, 32
// points) to avoid cancellation.
FieldState etdrk4_advance(const FieldState& state, const ModelParams& p,
                          const SpatialGrid& grid, double dt);

struct EtdrkOptions {
    double dt = 0.05;  // internal step, s
};

// Forward FRAP simulation. Holds the grid, bleach mask and its spectrum, the
// pre-bleach split convention, and FFT plans; propagators are cached per
// distinct output-time gap. Concurrent simulate() calls on one instance are
// safe (the spectral state lives on the stack of each call).
class FrapSimulator {
  public:
    FrapSimulator(const SpatialGrid& grid, const BleachSpec& bleach, double u_fraction = 0.5);
    ~FrapSimulator();

    FrapSimulator(const FrapSimulator&) = delete;
    FrapSimulator& operator=(const FrapSimulator&) = delete;

    // F(t) at the requested times via the exact per-mode propagator.
    // times must be strictly increasing from 0. The optional override
    // replaces the instance's pre-bleach transported-pool share.
    FrapCurve simulate(const ModelParams& p, const std::vector<double>& times,
                       std::optional<double> u_fraction = std::nullopt) const;

    // Same curve via the ETDRK4 integrator (independent cross-check).
    FrapCurve simulate_etdrk4(const ModelParams& p, const std::vector<double>& times,
                              const EtdrkOptions& opts = {},
                              std::optional<double> u_fraction = std::nullopt) const;

    const SpatialGrid& grid() const { return grid_; }
    const BleachSpec& bleach() const { return bleach_; }
    double u_fraction() const { return u_fraction_; }
    std::size_t spot_pixel_count() const { return spot_pixels_; }

  private:
    struct Impl;
    SpatialGrid grid_;
    BleachSpec bleach_;
    double u_fraction_ = 0.5;
    std::size_t spot_pixels_ = 0;
    std::unique_ptr<Impl> impl_;
};

// Convenience wrapper constructing a simulator per call.
FrapCurve simulate_frap(const ModelParams& p, const SpatialGrid& grid, const BleachSpec& bleach,
                        const std::vector<double>& times, double u_fraction = 0.5);

// Uniformly spaced output times [0, horizon] with n samples (default 41 over 200 s).
std::vector<double> uniform_times(double horizon = 200.0, int n = 41);

}  // namespace frapident

#endif
