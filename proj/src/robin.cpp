#include "sgm/robin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sgm {
namespace {

using detail::TriDirection;
using detail::TriFactor;

void build_direction(TriDirection& d, double eps, double a, double shift) {
    const double c = eps * eps / (d.h * d.h);
    const double edge = 2.0 * a * eps / d.h;
    d.lo.assign(d.n, 0.0);
    d.di.assign(d.n, 0.0);
    d.up.assign(d.n, 0.0);
    for (int i = 0; i < d.n; ++i) {
        if (i == 0) {
            d.di[i] = shift + 2.0 * c + edge;
            d.up[i] = -2.0 * c;
        } else if (i == d.n - 1) {
            d.di[i] = shift + 2.0 * c + edge;
            d.lo[i] = -2.0 * c;
        } else {
            d.lo[i] = -c;
            d.di[i] = shift + 2.0 * c;
            d.up[i] = -c;
        }
    }
}

TriFactor make_factor(const TriDirection& d, double theta) {
    TriFactor f;
    f.mlo.resize(d.n);
    f.cp.resize(d.n);
    f.piv_inv.resize(d.n);
    double prev_cp = 0.0;
    for (int i = 0; i < d.n; ++i) {
        f.mlo[i] = theta * d.lo[i];
        const double mdi = 1.0 + theta * d.di[i];
        const double mup = theta * d.up[i];
        const double piv = (i == 0) ? mdi : mdi - f.mlo[i] * prev_cp;
        f.piv_inv[i] = 1.0 / piv;
        f.cp[i] = mup * f.piv_inv[i];
        prev_cp = f.cp[i];
    }
    return f;
}

void solve_line(const TriFactor& f, double* x, int stride, int n, std::vector<double>& work) {
    work[0] = x[0] * f.piv_inv[0];
    for (int i = 1; i < n; ++i)
        work[i] = (x[i * stride] - f.mlo[i] * work[i - 1]) * f.piv_inv[i];
    x[(n - 1) * stride] = work[n - 1];
    for (int i = n - 2; i >= 0; --i)
        x[i * stride] = work[i] - f.cp[i] * x[(i + 1) * stride];
}

// One substep along one direction: x <- (I + theta_i T)^{-1} (I - theta_e T) x
// per line.  theta_e = 0 gives implicit Euler, theta_e = theta_i gives CN.
void sweep(const TriDirection& d, const TriFactor& fac, double theta_e, Field& field,
           std::vector<double>& rhs, std::vector<double>& work) {
    const int n = d.n;
    const int st = d.stride;
    for (int line = 0; line < d.count; ++line) {
        double* x = field.data() + static_cast<std::size_t>(line) * d.line_stride;
        if (theta_e != 0.0) {
            for (int i = 0; i < n; ++i) {
                double v = d.di[i] * x[i * st];
                if (i > 0) v += d.lo[i] * x[(i - 1) * st];
                if (i + 1 < n) v += d.up[i] * x[(i + 1) * st];
                rhs[i] = x[i * st] - theta_e * v;
            }
            for (int i = 0; i < n; ++i) x[i * st] = rhs[i];
        }
        solve_line(fac, x, st, n, work);
    }
}

} // namespace

RobinOperator::RobinOperator(const SpatialGrid& g, double epsilon, double a)
    : grid_(g), eps_(epsilon), a_(a) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
    if (!(a >= 0.0)) throw std::invalid_argument("boundary coefficient must be >= 0");
    const double shift = (g.dim == 2) ? 0.5 : 1.0;
    TriDirection dx;
    dx.n = g.nx;
    dx.count = (g.dim == 2) ? g.ny : 1;
    dx.stride = 1;
    dx.line_stride = g.nx;
    dx.h = g.hx();
    build_direction(dx, epsilon, a, shift);
    dirs_.push_back(std::move(dx));
    if (g.dim == 2) {
        TriDirection dy;
        dy.n = g.ny;
        dy.count = g.nx;
        dy.stride = g.nx;
        dy.line_stride = 1;
        dy.h = g.hy();
        build_direction(dy, epsilon, a, shift);
        dirs_.push_back(std::move(dy));
    }
}

void RobinOperator::apply(const Field& f, Field& out) const {
    if (f.size() != grid_.size())
        throw std::invalid_argument("field size does not match grid");
    out.assign(f.size(), 0.0);
    for (const auto& d : dirs_) {
        for (int line = 0; line < d.count; ++line) {
            const double* src = f.data() + static_cast<std::size_t>(line) * d.line_stride;
            double* dst = out.data() + static_cast<std::size_t>(line) * d.line_stride;
            for (int i = 0; i < d.n; ++i) {
                double v = d.di[i] * src[i * d.stride];
                if (i > 0) v += d.lo[i] * src[(i - 1) * d.stride];
                if (i + 1 < d.n) v += d.up[i] * src[(i + 1) * d.stride];
                dst[i * d.stride] += v;
            }
        }
    }
}

Field RobinOperator::apply(const Field& f) const {
    Field out;
    apply(f, out);
    return out;
}

double RobinOperator::cn_positivity_limit() const {
    double limit = std::numeric_limits<double>::infinity();
    for (const auto& d : dirs_) {
        const double spacing_bound = d.h * d.h / (2.0 * eps_ * eps_);
        double max_di = 0.0;
        for (double v : d.di) max_di = std::max(max_di, v);
        limit = std::min({limit, spacing_bound, 2.0 / max_di});
    }
    return limit;
}

Field RobinOperator::semigroup(double t, const Field& f, double rel_tol) const {
    if (!(t >= 0.0)) throw std::invalid_argument("semigroup time must be >= 0");
    if (f.size() != grid_.size())
        throw std::invalid_argument("field size does not match grid");
    if (t == 0.0) return f;

    auto advance_cn = [&](long m) {
        const double sub = t / static_cast<double>(m);
        const double theta = sub / 2.0;
        std::vector<TriFactor> facs;
        facs.reserve(dirs_.size());
        for (const auto& d : dirs_) facs.push_back(make_factor(d, theta));
        int nmax = 0;
        for (const auto& d : dirs_) nmax = std::max(nmax, d.n);
        std::vector<double> rhs(nmax), work(nmax);
        Field u = f;
        for (long k = 0; k < m; ++k)
            for (std::size_t j = 0; j < dirs_.size(); ++j)
                sweep(dirs_[j], facs[j], theta, u, rhs, work);
        return u;
    };

    long m = std::max<long>(1, static_cast<long>(std::ceil(t / cn_positivity_limit())));
    Field prev = advance_cn(m);
    for (int round = 0; round < 26; ++round) {
        m *= 2;
        Field cur = advance_cn(m);
        double diff = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < cur.size(); ++i) {
            diff = std::max(diff, std::abs(cur[i] - prev[i]));
            scale = std::max(scale, std::abs(cur[i]));
        }
        if (diff <= rel_tol * std::max(scale, 1e-300)) return cur;
        prev = std::move(cur);
    }
    return prev;
}

SemigroupPlan::SemigroupPlan(const RobinOperator& op, double dt) : dt_(dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("plan step must be > 0");
    const double limit = op.cn_positivity_limit();
    if (dt <= limit) {
        scheme_ = SweepScheme::crank_nicolson;
        substeps_ = 1;
    } else {
        scheme_ = SweepScheme::implicit_euler;
        substeps_ = static_cast<int>(std::ceil(dt / limit));
    }
    const double sub = dt / substeps_;
    theta_explicit_ = (scheme_ == SweepScheme::crank_nicolson) ? sub / 2.0 : 0.0;
    const double theta_implicit = (scheme_ == SweepScheme::crank_nicolson) ? sub / 2.0 : sub;
    for (const auto& d : op.directions()) {
        DirPlan dp;
        dp.dir = d;
        dp.fac = make_factor(d, theta_implicit);
        dirs_.push_back(std::move(dp));
    }
}

SemigroupPlan SemigroupPlan::cn_substepped(const RobinOperator& op, double dt, int min_substeps) {
    if (!(dt > 0.0)) throw std::invalid_argument("plan step must be > 0");
    if (min_substeps < 1) throw std::invalid_argument("need at least one substep");
    SemigroupPlan plan(op, dt > op.cn_positivity_limit() ? op.cn_positivity_limit() : dt);
    plan.dt_ = dt;
    plan.scheme_ = SweepScheme::crank_nicolson;
    plan.substeps_ = std::max(min_substeps,
                              static_cast<int>(std::ceil(dt / op.cn_positivity_limit())));
    const double sub = dt / plan.substeps_;
    plan.theta_explicit_ = sub / 2.0;
    plan.dirs_.clear();
    for (const auto& d : op.directions()) {
        DirPlan dp;
        dp.dir = d;
        dp.fac = make_factor(d, sub / 2.0);
        plan.dirs_.push_back(std::move(dp));
    }
    return plan;
}

void SemigroupPlan::advance(Field& f) const {
    int nmax = 0;
    for (const auto& dp : dirs_) nmax = std::max(nmax, dp.dir.n);
    std::vector<double> rhs(nmax), work(nmax);
    for (int k = 0; k < substeps_; ++k)
        for (const auto& dp : dirs_)
            sweep(dp.dir, dp.fac, theta_explicit_, f, rhs, work);
}

Field SemigroupPlan::apply(const Field& f) const {
    Field g = f;
    advance(g);
    return g;
}

} // namespace sgm
