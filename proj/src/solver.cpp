#include "frapident/solver.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <mutex>
#include <numbers>

#include <fftw3.h>

#include "frapident/parallel.hpp"

namespace frapident {

namespace {

// FFTW plan creation/destruction is not thread-safe; execution is.
std::mutex& fftw_mutex() {
    static std::mutex m;
    return m;
}

struct PlanDeleter {
    void operator()(fftw_plan p) const {
        if (p) {
            std::lock_guard<std::mutex> lock(fftw_mutex());
            fftw_destroy_plan(p);
        }
    }
};

using PlanPtr = std::unique_ptr<std::remove_pointer_t<fftw_plan>, PlanDeleter>;

fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

// sinh(z)/z, series branch for small |z|.
cplx sinch(cplx z, bool force_series) {
    const double az = std::abs(z);
    if (force_series || az < 1e-4) {
        const cplx z2 = z * z;
        return 1.0 + z2 / 6.0 * (1.0 + z2 / 20.0 * (1.0 + z2 / 42.0));
    }
    return std::sinh(z) / z;
}

constexpr int kContourPoints = 32;

// ETDRK4 scalar coefficients for one diagonal symbol value L, step dt.
// phi-type combinations are averaged over a radius-1 contour around z = L*dt
// (trapezoid rule, exact to ~1/32! for entire integrands) to avoid the
// cancellation that plagues direct evaluation near z = 0.
struct EtdrkCoeffs {
    cplx E, E2;        // exp(z), exp(z/2)
    cplx Q, f1, f2, f3;
};

EtdrkCoeffs etdrk4_coeffs(cplx L, double dt) {
    const cplx z = L * dt;
    EtdrkCoeffs c;
    c.E = std::exp(z);
    c.E2 = std::exp(0.5 * z);
    cplx q{}, f1{}, f2{}, f3{};
    for (int m = 0; m < kContourPoints; ++m) {
        const double theta = 2.0 * std::numbers::pi * (m + 0.5) / kContourPoints;
        const cplx r = z + std::polar(1.0, theta);
        const cplx er = std::exp(r);
        const cplx r2 = r * r;
        const cplx r3 = r2 * r;
        q += (std::exp(0.5 * r) - 1.0) / r;
        f1 += (-4.0 - r + er * (4.0 - 3.0 * r + r2)) / r3;
        f2 += (2.0 + r + er * (-2.0 + r)) / r3;
        f3 += (-4.0 - 3.0 * r - r2 + er * (4.0 - r)) / r3;
    }
    const double inv = dt / kContourPoints;
    c.Q = q * inv;
    c.f1 = f1 * inv;
    c.f2 = f2 * inv;
    c.f3 = f3 * inv;
    return c;
}

struct Vec2c {
    cplx u, v;
};

inline Vec2c apply(const Mat2c& m, const Vec2c& w) {
    return {m.m00 * w.u + m.m01 * w.v, m.m10 * w.u + m.m11 * w.v};
}

void check_times(const std::vector<double>& times) {
    if (times.empty()) throw InvalidArgument("times: empty");
    if (times.front() != 0.0) throw InvalidArgument("times: must start at 0");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1]))
            throw InvalidArgument("times: must be strictly increasing");
}

}  // namespace

double adv_wavenumber(const SpatialGrid& grid, int jy) {
    return jy == grid.Ny / 2 ? 0.0 : grid.ky[jy];
}

Mat2c mode_symbol(double ky_adv, double k_squared, const ModelParams& p) {
    return {cplx(-p.beta1, p.c * ky_adv), cplx(p.beta2, 0.0),
            cplx(p.beta1, 0.0), cplx(-p.D * k_squared - p.beta2, 0.0)};
}

Mat2c mat2_exp(const Mat2c& L, double dt) {
    const cplx mean = 0.5 * (L.m00 + L.m11);
    const cplx half_diff = 0.5 * (L.m00 - L.m11);
    const cplx q = std::sqrt(half_diff * half_diff + L.m01 * L.m10);

    // Eigenvalues are mean +- q; fall back to the series when they nearly
    // coalesce (defective or near-defective matrix).
    const double l1 = std::abs(mean + q);
    const double l2 = std::abs(mean - q);
    const bool near_defective = std::abs(2.0 * q) < 1e-8 * std::max({l1, l2, 1.0});

    cplx ch, sh_over_q;
    if (near_defective) {
        const cplx scale = std::exp(mean * dt);
        ch = scale * std::cosh(q * dt);
        sh_over_q = scale * dt * sinch(q * dt, true);
    } else {
        // assemble from the eigenvalue exponentials; for dissipative modes
        // both factors stay bounded where exp(mean*dt)*cosh(q*dt) would
        // overflow into 0 * inf
        const cplx e1 = std::exp((mean + q) * dt);
        const cplx e2 = std::exp((mean - q) * dt);
        ch = 0.5 * (e1 + e2);
        sh_over_q = 0.5 * (e1 - e2) / q;
    }

    return {ch + sh_over_q * half_diff, sh_over_q * L.m01,
            sh_over_q * L.m10, ch - sh_over_q * half_diff};
}

SpectralPropagator build_propagator(const SpatialGrid& grid, const ModelParams& p, double dt) {
    require_valid(p);
    if (!(dt > 0.0)) throw InvalidArgument("build_propagator: dt must be > 0");
    SpectralPropagator prop;
    prop.Nx = grid.Nx;
    prop.Ny = grid.Ny;
    prop.dt = dt;
    prop.P.resize(grid.n_cells());
    for (int i = 0; i < grid.Nx; ++i) {
        const double kx2 = grid.kx[i] * grid.kx[i];
        for (int j = 0; j < grid.Ny; ++j) {
            const double k2 = kx2 + grid.ky[j] * grid.ky[j];
            prop.P[grid.index(i, j)] = mat2_exp(mode_symbol(adv_wavenumber(grid, j), k2, p), dt);
        }
    }
    return prop;
}

FieldState initial_condition(const SpatialGrid& grid, const ModelParams& p,
                             const BleachSpec& bleach, double u_fraction) {
    grid.require_resolves(bleach);
    require_valid(p);
    if (!(u_fraction >= 0.0 && u_fraction <= 1.0))
        throw InvalidArgument("initial_condition: u_fraction must lie in [0,1]");
    const double fu = u_fraction;
    const double fv = 1.0 - u_fraction;
    const std::vector<double> mask = bleach_mask(grid, bleach);
    FieldState state;
    state.t = 0.0;
    state.u.resize(grid.n_cells());
    state.v.resize(grid.n_cells());
    for (std::size_t i = 0; i < mask.size(); ++i) {
        const double factor = 1.0 - bleach.depth * mask[i];
        state.u[i] = fu * factor;
        state.v[i] = fv * factor;
    }
    return state;
}

namespace {

// Full c2c round-trip used by the single-step public operations.
class C2cTransform {
  public:
    C2cTransform(int nx, int ny)
        : nx_(nx), ny_(ny), buf_(static_cast<std::size_t>(nx) * ny) {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        fwd_.reset(fftw_plan_dft_2d(nx, ny, as_fftw(buf_.data()), as_fftw(buf_.data()),
                                    FFTW_FORWARD, FFTW_ESTIMATE));
        bwd_.reset(fftw_plan_dft_2d(nx, ny, as_fftw(buf_.data()), as_fftw(buf_.data()),
                                    FFTW_BACKWARD, FFTW_ESTIMATE));
    }

    std::vector<cplx> forward(const std::vector<double>& real_in) {
        for (std::size_t i = 0; i < buf_.size(); ++i) buf_[i] = real_in[i];
        fftw_execute(fwd_.get());
        return buf_;
    }

    // Inverse transform; checks the imaginary residue then discards it.
    std::vector<double> backward_real(const std::vector<cplx>& spec, const char* what) {
        buf_ = spec;
        fftw_execute(bwd_.get());
        const double norm = 1.0 / (static_cast<double>(nx_) * ny_);
        double max_abs = 0.0, max_imag = 0.0;
        std::vector<double> out(buf_.size());
        for (std::size_t i = 0; i < buf_.size(); ++i) {
            const cplx value = buf_[i] * norm;
            out[i] = value.real();
            max_abs = std::max(max_abs, std::abs(value));
            max_imag = std::max(max_imag, std::abs(value.imag()));
        }
        if (max_imag > 1e-10 * std::max(max_abs, 1e-300))
            throw Error(std::string(what) + ": spectral round-trip left imaginary residue");
        return out;
    }

  private:
    int nx_, ny_;
    std::vector<cplx> buf_;
    PlanPtr fwd_, bwd_;
};

}  // namespace

FieldState advance(const FieldState& state, const SpectralPropagator& prop,
                   const SpatialGrid& grid) {
    if (grid.Nx != prop.Nx || grid.Ny != prop.Ny)
        throw ShapeMismatch("advance: grid does not match propagator");
    if (state.u.size() != grid.n_cells() || state.v.size() != grid.n_cells())
        throw ShapeMismatch("advance: state does not match grid");

    C2cTransform fft(grid.Nx, grid.Ny);
    std::vector<cplx> uh = fft.forward(state.u);
    std::vector<cplx> vh = fft.forward(state.v);
    for (std::size_t i = 0; i < uh.size(); ++i) {
        const Vec2c w = apply(prop.P[i], {uh[i], vh[i]});
        uh[i] = w.u;
        vh[i] = w.v;
    }
    FieldState next;
    next.u = fft.backward_real(uh, "advance");
    next.v = fft.backward_real(vh, "advance");
    next.t = state.t + prop.dt;
    return next;
}

namespace {

// One spectral ETDRK4 step on a full c2c mode set.
void etdrk4_step_modes(std::vector<cplx>& uh, std::vector<cplx>& vh,
                       const std::vector<EtdrkCoeffs>& cu, const std::vector<EtdrkCoeffs>& cv,
                       const ModelParams& p) {
    for (std::size_t i = 0; i < uh.size(); ++i) {
        const EtdrkCoeffs& a = cu[i];
        const EtdrkCoeffs& b = cv[i];
        const Vec2c w{uh[i], vh[i]};
        auto coupling = [&p](const Vec2c& s) -> Vec2c {
            return {-p.beta1 * s.u + p.beta2 * s.v, p.beta1 * s.u - p.beta2 * s.v};
        };
        const Vec2c n0 = coupling(w);
        const Vec2c wa{a.E2 * w.u + a.Q * n0.u, b.E2 * w.v + b.Q * n0.v};
        const Vec2c na = coupling(wa);
        const Vec2c wb{a.E2 * w.u + a.Q * na.u, b.E2 * w.v + b.Q * na.v};
        const Vec2c nb = coupling(wb);
        const Vec2c wc{a.E2 * wa.u + a.Q * (2.0 * nb.u - n0.u),
                       b.E2 * wa.v + b.Q * (2.0 * nb.v - n0.v)};
        const Vec2c nc = coupling(wc);
        uh[i] = a.E * w.u + a.f1 * n0.u + 2.0 * a.f2 * (na.u + nb.u) + a.f3 * nc.u;
        vh[i] = b.E * w.v + b.f1 * n0.v + 2.0 * b.f2 * (na.v + nb.v) + b.f3 * nc.v;
    }
}

}  // namespace

FieldState etdrk4_advance(const FieldState& state, const ModelParams& p,
                          const SpatialGrid& grid, double dt) {
    require_valid(p);
    if (!(dt > 0.0)) throw InvalidArgument("etdrk4_advance: dt must be > 0");
    if (state.u.size() != grid.n_cells() || state.v.size() != grid.n_cells())
        throw ShapeMismatch("etdrk4_advance: state does not match grid");

    std::vector<EtdrkCoeffs> cu(grid.n_cells()), cv(grid.n_cells());
    for (int i = 0; i < grid.Nx; ++i) {
        const double kx2 = grid.kx[i] * grid.kx[i];
        for (int j = 0; j < grid.Ny; ++j) {
            const std::size_t idx = grid.index(i, j);
            const double k2 = kx2 + grid.ky[j] * grid.ky[j];
            cu[idx] = etdrk4_coeffs(cplx(0.0, p.c * adv_wavenumber(grid, j)), dt);
            cv[idx] = etdrk4_coeffs(cplx(-p.D * k2, 0.0), dt);
        }
    }

    C2cTransform fft(grid.Nx, grid.Ny);
    std::vector<cplx> uh = fft.forward(state.u);
    std::vector<cplx> vh = fft.forward(state.v);
    etdrk4_step_modes(uh, vh, cu, cv, p);

    FieldState next;
    next.u = fft.backward_real(uh, "etdrk4_advance");
    next.v = fft.backward_real(vh, "etdrk4_advance");
    next.t = state.t + dt;
    return next;
}

// ---------------------------------------------------------------------------
// FrapSimulator: half-spectrum (r2c layout) engine. The initial spectrum is
// assembled analytically from the mask transform, propagation is per-mode,
// and F(t) is evaluated by Parseval against the mask spectrum, so the hot
// path needs no per-step FFTs.
// ---------------------------------------------------------------------------

struct FrapSimulator::Impl {
    int nx = 0, ny = 0, nyh = 0;      // nyh = ny/2 + 1 stored columns
    std::vector<cplx> mask_hat;       // nx * nyh
    std::vector<double> ky_adv;       // per stored column
    std::vector<double> k2;           // nx * nyh
    std::vector<double> parseval_w;   // 1 for self-conjugate columns, else 2
    double n_cells = 0.0;

    std::size_t n_modes() const { return static_cast<std::size_t>(nx) * nyh; }

    std::size_t mode_index(int i, int j) const { return static_cast<std::size_t>(i) * nyh + j; }

    // Initial spectrum of one species: amplitude * (1 - depth * mask).
    void initial_spectrum(double amplitude, double depth, std::vector<cplx>& out) const {
        out.resize(n_modes());
        for (std::size_t m = 0; m < out.size(); ++m) out[m] = -amplitude * depth * mask_hat[m];
        out[0] += amplitude * n_cells;
    }

    // Spot sum of (u+v) from the half-spectrum state.
    double spot_sum(const std::vector<cplx>& uh, const std::vector<cplx>& vh) const {
        double total = 0.0;
        for (std::size_t m = 0; m < uh.size(); ++m) {
            const cplx s = uh[m] + vh[m];
            const cplx& mk = mask_hat[m];
            // Re(s * conj(mask))
            total += parseval_w[m] * (s.real() * mk.real() + s.imag() * mk.imag());
        }
        return total / n_cells;
    }
};

FrapSimulator::FrapSimulator(const SpatialGrid& grid, const BleachSpec& bleach,
                             double u_fraction)
    : grid_(grid), bleach_(bleach), u_fraction_(u_fraction), impl_(std::make_unique<Impl>()) {
    grid.require_resolves(bleach);
    if (!(u_fraction_ >= 0.0 && u_fraction_ <= 1.0))
        throw InvalidArgument("FrapSimulator: u_fraction must lie in [0,1]");

    impl_->nx = grid.Nx;
    impl_->ny = grid.Ny;
    impl_->nyh = grid.Ny / 2 + 1;
    impl_->n_cells = static_cast<double>(grid.n_cells());

    std::vector<double> mask = bleach_mask(grid, bleach);
    spot_pixels_ = 0;
    for (double m : mask)
        if (m > 0.5) ++spot_pixels_;
    if (spot_pixels_ == 0) throw GridTooCoarse("bleach spot covers no grid cells");

    impl_->mask_hat.resize(impl_->n_modes());
    {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        fftw_plan plan = fftw_plan_dft_r2c_2d(grid.Nx, grid.Ny, mask.data(),
                                              as_fftw(impl_->mask_hat.data()), FFTW_ESTIMATE);
        fftw_execute(plan);
        fftw_destroy_plan(plan);
    }

    impl_->ky_adv.resize(impl_->nyh);
    impl_->parseval_w.resize(impl_->n_modes());
    impl_->k2.resize(impl_->n_modes());
    for (int j = 0; j < impl_->nyh; ++j) impl_->ky_adv[j] = adv_wavenumber(grid, j);
    for (int i = 0; i < grid.Nx; ++i) {
        const double kx2 = grid.kx[i] * grid.kx[i];
        for (int j = 0; j < impl_->nyh; ++j) {
            const std::size_t m = impl_->mode_index(i, j);
            impl_->k2[m] = kx2 + grid.ky[j] * grid.ky[j];
            impl_->parseval_w[m] = (j == 0 || j == grid.Ny / 2) ? 1.0 : 2.0;
        }
    }
}

FrapSimulator::~FrapSimulator() = default;

FrapCurve FrapSimulator::simulate(const ModelParams& p, const std::vector<double>& times,
                                  std::optional<double> u_fraction) const {
    require_valid(p);
    check_times(times);
    const double fu = u_fraction.value_or(u_fraction_);
    if (!(fu >= 0.0 && fu <= 1.0))
        throw InvalidArgument("simulate: u_fraction must lie in [0,1]");
    const double fv = 1.0 - fu;

    std::vector<cplx> uh, vh;
    impl_->initial_spectrum(fu, bleach_.depth, uh);
    impl_->initial_spectrum(fv, bleach_.depth, vh);

    FrapCurve curve;
    curve.times = times;
    curve.values.reserve(times.size());

    const double pre_bleach = static_cast<double>(spot_pixels_);
    curve.values.push_back(impl_->spot_sum(uh, vh) / pre_bleach);

    // One propagator per distinct output gap, keyed by the gap's bit pattern.
    std::map<std::uint64_t, std::vector<Mat2c>> cache;
    for (std::size_t step = 1; step < times.size(); ++step) {
        const double gap = times[step] - times[step - 1];
        const std::uint64_t key = std::bit_cast<std::uint64_t>(gap);
        auto it = cache.find(key);
        if (it == cache.end()) {
            std::vector<Mat2c> prop(impl_->n_modes());
            for (std::size_t m = 0; m < prop.size(); ++m) {
                const int j = static_cast<int>(m % impl_->nyh);
                prop[m] = mat2_exp(mode_symbol(impl_->ky_adv[j], impl_->k2[m], p), gap);
            }
            it = cache.emplace(key, std::move(prop)).first;
        }
        const std::vector<Mat2c>& prop = it->second;
        for (std::size_t m = 0; m < uh.size(); ++m) {
            const Vec2c w = apply(prop[m], {uh[m], vh[m]});
            uh[m] = w.u;
            vh[m] = w.v;
        }
        curve.values.push_back(impl_->spot_sum(uh, vh) / pre_bleach);
    }
    return curve;
}

FrapCurve FrapSimulator::simulate_etdrk4(const ModelParams& p, const std::vector<double>& times,
                                         const EtdrkOptions& opts,
                                         std::optional<double> u_fraction) const {
    require_valid(p);
    check_times(times);
    if (!(opts.dt > 0.0)) throw InvalidArgument("etdrk4: dt must be > 0");
    const double fu = u_fraction.value_or(u_fraction_);
    if (!(fu >= 0.0 && fu <= 1.0))
        throw InvalidArgument("simulate_etdrk4: u_fraction must lie in [0,1]");
    const double fv = 1.0 - fu;

    std::vector<cplx> uh, vh;
    impl_->initial_spectrum(fu, bleach_.depth, uh);
    impl_->initial_spectrum(fv, bleach_.depth, vh);

    const std::size_t n_modes = impl_->n_modes();
    std::vector<EtdrkCoeffs> cu(n_modes), cv(n_modes);

    FrapCurve curve;
    curve.times = times;
    curve.values.reserve(times.size());
    const double pre_bleach = static_cast<double>(spot_pixels_);
    curve.values.push_back(impl_->spot_sum(uh, vh) / pre_bleach);

    double coeff_dt = -1.0;
    for (std::size_t seg = 1; seg < times.size(); ++seg) {
        const double gap = times[seg] - times[seg - 1];
        const int n_steps = std::max(1, static_cast<int>(std::ceil(gap / opts.dt - 1e-12)));
        const double dt = gap / n_steps;
        if (dt != coeff_dt) {
            for (std::size_t m = 0; m < n_modes; ++m) {
                const int j = static_cast<int>(m % impl_->nyh);
                cu[m] = etdrk4_coeffs(cplx(0.0, p.c * impl_->ky_adv[j]), dt);
                cv[m] = etdrk4_coeffs(cplx(-p.D * impl_->k2[m], 0.0), dt);
            }
            coeff_dt = dt;
        }
        for (int s = 0; s < n_steps; ++s) etdrk4_step_modes(uh, vh, cu, cv, p);
        curve.values.push_back(impl_->spot_sum(uh, vh) / pre_bleach);
    }
    return curve;
}

FrapCurve simulate_frap(const ModelParams& p, const SpatialGrid& grid, const BleachSpec& bleach,
                        const std::vector<double>& times, double u_fraction) {
    FrapSimulator sim(grid, bleach, u_fraction);
    return sim.simulate(p, times);
}

std::vector<double> uniform_times(double horizon, int n) {
    if (n < 2 || !(horizon > 0.0)) throw InvalidArgument("uniform_times: need n >= 2, horizon > 0");
    std::vector<double> t(n);
    for (int i = 0; i < n; ++i) t[i] = horizon * i / (n - 1);
    return t;
}

}  // namespace frapident
