#pragma once

#include <cstddef>
#include <vector>

namespace sgm {

// Scalar field samples on the grid, row-major: index = iy * nx + ix.
using Field = std::vector<double>;

// Uniform tensor grid on [0, lx] (dim 1) or [0, lx] x [0, ly] (dim 2),
// nodes at the cell corners including both endpoints.
struct SpatialGrid {
    int dim = 1;
    int nx = 2;
    int ny = 1;
    double lx = 1.0;
    double ly = 1.0; // unused when dim == 1

    double hx() const { return lx / (nx - 1); }
    double hy() const { return ly / (ny - 1); }
    std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }
    double measure() const { return dim == 1 ? lx : lx * ly; }
    double x(int ix) const { return ix * hx(); }
    double y(int iy) const { return iy * hy(); }
};

// Builders validate node counts (>= 2 per direction) and lengths (> 0).
SpatialGrid make_grid_1d(int nx, double lx);
SpatialGrid make_grid_2d(int nx, int ny, double lx, double ly);

// Trapezoid quadrature weight of node i (tensor product in 2D).
double node_weight(const SpatialGrid& g, std::size_t i);

// Trapezoid-rule integral of f over the domain.
double integrate(const SpatialGrid& g, const Field& f);

// (1/|D|) * integral of f.
double mean_value(const SpatialGrid& g, const Field& f);

// (1/|D|) * integral of f^e for f >= 0.  Throws std::domain_error on a
// negative sample (fractional powers of negatives are undefined).  Exponents
// within 1e-12 of a small integer take an exact repeated-squaring path.
double mean_power(const SpatialGrid& g, const Field& f, double e);

double sup_norm(const Field& f);

// x^e with the same integer fast path as mean_power; x >= 0 expected.
double pow_checked(double x, double e);

} // namespace sgm
