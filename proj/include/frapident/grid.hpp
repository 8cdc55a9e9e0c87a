#ifndef FRAPIDENT_GRID_HPP
#define FRAPIDENT_GRID_HPP

#include <cstddef>
#include <vector>

#include "frapident/errors.hpp"
#include "frapident/model.hpp"

namespace frapident {

// Periodic rectangular domain with a uniform Nx x Ny grid. Nx, Ny must be
// powers of two and >= 16. Wavenumbers follow the 2*pi-periodic convention
// k = 2*pi*m/L with m in [0..N/2, -N/2+1..-1].
struct SpatialGrid {
    double Lx = 80.0;
    double Ly = 80.0;
    int Nx = 256;
    int Ny = 256;
    std::vector<double> kx;  // size Nx
    std::vector<double> ky;  // size Ny

    SpatialGrid() { init(); }
    SpatialGrid(double lx, double ly, int nx, int ny) : Lx(lx), Ly(ly), Nx(nx), Ny(ny) { init(); }

    double dx() const { return Lx / Nx; }
    double dy() const { return Ly / Ny; }
    double cell_area() const { return dx() * dy(); }
    std::size_t n_cells() const { return static_cast<std::size_t>(Nx) * Ny; }

    // Row-major index: x runs over rows (slow), y over columns (fast).
    std::size_t index(int ix, int iy) const { return static_cast<std::size_t>(ix) * Ny + iy; }

    // Throws GridTooCoarse unless dx and dy resolve the spot radius with
    // at least ~5 cells (spacing < radius/4).
    void require_resolves(const BleachSpec& bleach) const;

  private:
    void init();
};

// Pixel-center indicator of the bleach disk: 1 inside, 0 outside.
std::vector<double> bleach_mask(const SpatialGrid& grid, const BleachSpec& bleach);

// Concentration fields of the two species at time t. Arrays are row-major
// Nx x Ny matching the grid layout.
struct FieldState {
    std::vector<double> u;  // transported species
    std::vector<double> v;  // diffusing species
    double t = 0.0;
};

// Sum over the domain of (u+v)*dx*dy.
double total_mass(const FieldState& state, const SpatialGrid& grid);

}  // namespace frapident

#endif
