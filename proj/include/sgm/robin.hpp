#pragma once

#include "sgm/grid.hpp"

#include <vector>

namespace sgm {

namespace detail {

// One spatial direction of the operator: a tridiagonal acting along grid
// lines (count lines of n nodes each, nodes `stride` apart, consecutive
// lines `line_stride` apart).
struct TriDirection {
    int n = 0;
    int count = 1;
    int stride = 1;
    int line_stride = 0;
    double h = 0.0;
    std::vector<double> lo, di, up;
};

// Thomas factorization of I + theta * T for a fixed theta.
struct TriFactor {
    std::vector<double> mlo, cp, piv_inv;
};

} // namespace detail

// Discretization of L = -eps^2 Lap + I on the grid, with the boundary flux
// condition  eps dA/dnu + a A = 0  closed by mirror ghost nodes:
// A_ghost = A_inner - 2 h (a/eps) A_boundary.  In 2D the identity shift is
// split evenly between the two directional factors, which commute, so
// exp(-t L) factorizes exactly into per-direction sweeps.
class RobinOperator {
public:
    RobinOperator(const SpatialGrid& g, double epsilon, double a);

    const SpatialGrid& grid() const { return grid_; }
    double epsilon() const { return eps_; }
    double boundary_coefficient() const { return a_; }

    // Matvec with the operator.
    void apply(const Field& f, Field& out) const;
    Field apply(const Field& f) const;

    // exp(-t L) f.  Crank-Nicolson substeps starting at the positivity-safe
    // count, doubled until two consecutive refinements agree to rel_tol in
    // relative sup norm.  Preserves nonnegativity up to roundoff.
    Field semigroup(double t, const Field& f, double rel_tol = 1e-9) const;

    // Largest substep for which a Crank-Nicolson sweep provably maps
    // nonnegative data to nonnegative data: the spacing bound h^2/(2 eps^2)
    // capped by 2 / (largest row diagonal), per direction.
    double cn_positivity_limit() const;

    const std::vector<detail::TriDirection>& directions() const { return dirs_; }

private:
    SpatialGrid grid_;
    double eps_;
    double a_;
    std::vector<detail::TriDirection> dirs_;
};

enum class SweepScheme { crank_nicolson, implicit_euler };

// Frozen factorization for advancing fields by one fixed step dt, so the
// production loop pays a constant number of tridiagonal sweeps per step.
// Uses a single Crank-Nicolson substep when dt is within the positivity
// limit, otherwise sub-stepped implicit Euler (unconditionally positive,
// sup-norm contracting).
class SemigroupPlan {
public:
    SemigroupPlan(const RobinOperator& op, double dt);

    // Crank-Nicolson with at least min_substeps substeps (raised further if
    // needed to stay within the positivity limit).  Used where a fixed map
    // with extra accuracy is wanted, e.g. the fixed-point solver.
    static SemigroupPlan cn_substepped(const RobinOperator& op, double dt, int min_substeps);

    // f <- (approx) exp(-dt L) f
    void advance(Field& f) const;
    Field apply(const Field& f) const;

    SweepScheme scheme() const { return scheme_; }
    int substeps() const { return substeps_; }
    double step() const { return dt_; }

private:
    struct DirPlan {
        detail::TriDirection dir;
        detail::TriFactor fac;
    };
    double dt_ = 0.0;
    SweepScheme scheme_ = SweepScheme::crank_nicolson;
    int substeps_ = 1;
    double theta_explicit_ = 0.0; // dt_sub/2 for CN, 0 for implicit Euler
    std::vector<DirPlan> dirs_;
};

} // namespace sgm
