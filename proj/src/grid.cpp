#include "sgm/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace sgm {
namespace {

void check_sizes(const SpatialGrid& g, const Field& f) {
    if (f.size() != g.size())
        throw std::invalid_argument("field size does not match grid");
}

// Exponents that are integers up to 1e-12 use repeated squaring; the hot
// loops all have small integer exponents (p, q, r, s) in practice.
bool near_integer(double e, long long* n) {
    const double rounded = std::nearbyint(e);
    if (std::abs(e - rounded) < 1e-12 && std::abs(rounded) <= 64.0) {
        *n = static_cast<long long>(rounded);
        return true;
    }
    return false;
}

double powi(double x, long long n) {
    if (n < 0) return 1.0 / powi(x, -n);
    double acc = 1.0;
    double base = x;
    while (n > 0) {
        if (n & 1) acc *= base;
        base *= base;
        n >>= 1;
    }
    return acc;
}

} // namespace

SpatialGrid make_grid_1d(int nx, double lx) {
    if (nx < 2) throw std::invalid_argument("grid needs at least 2 nodes");
    if (!(lx > 0.0)) throw std::invalid_argument("domain length must be > 0");
    SpatialGrid g;
    g.dim = 1;
    g.nx = nx;
    g.ny = 1;
    g.lx = lx;
    g.ly = 1.0;
    return g;
}

SpatialGrid make_grid_2d(int nx, int ny, double lx, double ly) {
    if (nx < 2 || ny < 2) throw std::invalid_argument("grid needs at least 2 nodes per direction");
    if (!(lx > 0.0) || !(ly > 0.0)) throw std::invalid_argument("domain lengths must be > 0");
    SpatialGrid g;
    g.dim = 2;
    g.nx = nx;
    g.ny = ny;
    g.lx = lx;
    g.ly = ly;
    return g;
}

double node_weight(const SpatialGrid& g, std::size_t i) {
    const int ix = static_cast<int>(i % g.nx);
    const double wx = g.hx() * ((ix == 0 || ix == g.nx - 1) ? 0.5 : 1.0);
    if (g.dim == 1) return wx;
    const int iy = static_cast<int>(i / g.nx);
    const double wy = g.hy() * ((iy == 0 || iy == g.ny - 1) ? 0.5 : 1.0);
    return wx * wy;
}

double integrate(const SpatialGrid& g, const Field& f) {
    check_sizes(g, f);
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) acc += node_weight(g, i) * f[i];
    return acc;
}

double mean_value(const SpatialGrid& g, const Field& f) {
    return integrate(g, f) / g.measure();
}

double mean_power(const SpatialGrid& g, const Field& f, double e) {
    check_sizes(g, f);
    long long n = 0;
    const bool integer_exp = near_integer(e, &n);
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double v = f[i];
        if (v < 0.0)
            throw std::domain_error("mean_power requires nonnegative samples");
        acc += node_weight(g, i) * (integer_exp ? powi(v, n) : std::pow(v, e));
    }
    return acc / g.measure();
}

double sup_norm(const Field& f) {
    double m = 0.0;
    for (double v : f) {
        const double av = std::abs(v);
        if (av > m) m = av;
    }
    return m;
}

double pow_checked(double x, double e) {
    long long n = 0;
    if (near_integer(e, &n)) return powi(x, n);
    return std::pow(x, e);
}

} // namespace sgm
