#include "frapident/grid.hpp"

#include <cmath>
#include <numbers>

namespace frapident {

namespace {

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

std::vector<double> wavenumbers(int n, double length) {
    std::vector<double> k(n);
    const double base = 2.0 * std::numbers::pi / length;
    for (int m = 0; m < n; ++m) {
        const int shifted = (m <= n / 2) ? m : m - n;
        k[m] = base * shifted;
    }
    return k;
}

}  // namespace

void SpatialGrid::init() {
    if (!(Lx > 0.0) || !(Ly > 0.0)) throw InvalidArgument("grid: domain lengths must be > 0");
    if (Nx < 16 || Ny < 16 || !is_pow2(Nx) || !is_pow2(Ny))
        throw InvalidArgument("grid: Nx, Ny must be powers of two and >= 16");
    kx = wavenumbers(Nx, Lx);
    ky = wavenumbers(Ny, Ly);
}

void SpatialGrid::require_resolves(const BleachSpec& bleach) const {
    const double radius = bleach.diameter / 2.0;
    if (!(dx() < radius / 4.0) || !(dy() < radius / 4.0))
        throw GridTooCoarse("grid spacing " + std::to_string(dx()) + " um does not resolve spot radius " +
                            std::to_string(radius) + " um (need spacing < radius/4)");
}

std::vector<double> bleach_mask(const SpatialGrid& grid, const BleachSpec& bleach) {
    if (!(bleach.diameter > 0.0) || bleach.diameter >= std::min(grid.Lx, grid.Ly) / 2.0)
        throw InvalidArgument("bleach: diameter must lie in (0, min(Lx,Ly)/2)");
    if (bleach.depth < 0.0 || bleach.depth > 1.0)
        throw InvalidArgument("bleach: depth must lie in [0,1]");

    std::vector<double> mask(grid.n_cells(), 0.0);
    const double r2 = bleach.diameter * bleach.diameter / 4.0;
    for (int ix = 0; ix < grid.Nx; ++ix) {
        const double x = (ix + 0.5) * grid.dx() - bleach.center_x;
        // nearest periodic image
        const double px = x - grid.Lx * std::round(x / grid.Lx);
        for (int iy = 0; iy < grid.Ny; ++iy) {
            const double y = (iy + 0.5) * grid.dy() - bleach.center_y;
            const double py = y - grid.Ly * std::round(y / grid.Ly);
            if (px * px + py * py <= r2) mask[grid.index(ix, iy)] = 1.0;
        }
    }
    return mask;
}

double total_mass(const FieldState& state, const SpatialGrid& grid) {
    if (state.u.size() != grid.n_cells() || state.v.size() != grid.n_cells())
        throw ShapeMismatch("field state does not match grid");
    double sum = 0.0;
    for (std::size_t i = 0; i < state.u.size(); ++i) sum += state.u[i] + state.v[i];
    return sum * grid.cell_area();
}

}  // namespace frapident
