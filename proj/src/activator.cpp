#include "sgm/activator.hpp"

#include "sgm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace sgm {
namespace {

// Shared post-step validation: blow-up (including non-finite values), then
// positivity beyond the -1e-12 tolerance, then zeroing of roundoff-scale
// negatives so downstream fractional powers stay defined.
void postcheck(Field& A, double threshold) {
    double sup = 0.0;
    double mn = 0.0;
    bool finite = true;
    for (double v : A) {
        finite = finite && std::isfinite(v);
        sup = std::max(sup, std::abs(v));
        mn = std::min(mn, v);
    }
    if (!finite || sup >= threshold)
        throw BlowUpError(finite ? sup : std::numeric_limits<double>::infinity());
    if (mn < -1e-12)
        throw PositivityError("activator step produced negative value " + std::to_string(mn));
    for (double& v : A)
        if (v < 0.0) v = 0.0;
}

Field reaction_stage(const Field& A, double gamma, double dt, const ModelParams& mp) {
    if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be > 0");
    Field stage = A;
    const double denom = pow_checked(gamma, mp.q) + mp.b;
    for (std::size_t i = 0; i < A.size(); ++i)
        stage[i] += dt * pow_checked(A[i], mp.p) / denom;
    return stage;
}

} // namespace

void reaction_term(const Field& A, double gamma, const ModelParams& mp, Field& out) {
    if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be > 0");
    out.resize(A.size());
    const double denom = pow_checked(gamma, mp.q) + mp.b;
    for (std::size_t i = 0; i < A.size(); ++i)
        out[i] = pow_checked(A[i], mp.p) / denom;
}

Field reaction_term(const Field& A, double gamma, const ModelParams& mp) {
    Field out;
    reaction_term(A, gamma, mp, out);
    return out;
}

Field imex_step(const SemigroupPlan& plan, const Field& A, double gamma_new,
                const ModelParams& mp, double blow_up_threshold) {
    Field next = reaction_stage(A, gamma_new, plan.step(), mp);
    plan.advance(next);
    postcheck(next, blow_up_threshold);
    return next;
}

Field imex_step(const RobinOperator& op, const Field& A, double gamma_new, double dt,
                const ModelParams& mp, double blow_up_threshold) {
    Field next = op.semigroup(dt, reaction_stage(A, gamma_new, dt, mp));
    postcheck(next, blow_up_threshold);
    return next;
}

Field mild_convolution(const RobinOperator& op, const Field& A0,
                       const std::vector<Field>& sources, double dt, std::size_t k) {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
    if (sources.size() < k) throw std::invalid_argument("need k frozen sources");
    Field out = op.semigroup(k * dt, A0);
    for (std::size_t j = 0; j < k; ++j) {
        const Field term = op.semigroup((k - j) * dt, sources[j]);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += dt * term[i];
    }
    return out;
}

PicardWindow picard_window(const ModelParams& mp, double sup_A0, double gamma0,
                           double K, double safety) {
    if (!(sup_A0 >= 0.0)) throw std::invalid_argument("sup A0 must be >= 0");
    if (!(gamma0 > 0.0)) throw std::invalid_argument("gamma0 must be > 0");
    if (!(K > 0.0)) throw std::invalid_argument("barrier level must be > 0");
    if (!(safety >= 1.0)) throw std::invalid_argument("safety factor must be >= 1");
    PicardWindow w;
    w.L = safety * (2.0 + sup_A0 + std::exp(K) * gamma0);
    const double lp = std::pow(w.L, -mp.p);
    w.T1 = mp.b * lp;
    w.T2 = std::exp(-1.5 * mp.s - K * mp.s - 2.0 * K) * lp;
    w.T_hat = std::min(w.T1, w.T2);
    return w;
}

PicardResult picard_solve(const RobinOperator& op, const ModelParams& mp, const Field& A0,
                          double gamma0, const BrownianPath& path, const PicardOptions& opt) {
    if (mp.tau != 1.0 || mp.eta != 1.0)
        throw std::invalid_argument("fixed-point solve requires tau == 1 and eta == 1");
    if (!(gamma0 > 0.0)) throw std::invalid_argument("gamma0 must be > 0");
    if (A0.size() != op.grid().size())
        throw std::invalid_argument("initial field does not match grid");
    if (!(opt.window > 0.0)) throw std::invalid_argument("window must be > 0");
    if (opt.history_nodes < 2) throw std::invalid_argument("need at least two history nodes");
    if (path.horizon() < opt.window * (1.0 - 1e-12))
        throw std::invalid_argument("path does not cover the window");

    std::size_t m = opt.history_nodes;
    const double delta = opt.window / static_cast<double>(m - 1);

    PicardResult res;
    res.t.resize(m);
    res.B.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
        res.t[k] = static_cast<double>(k) * delta;
        res.B[k] = path.value_at(res.t[k]);
        if (opt.barrier_K > 0.0 && std::abs(res.B[k]) >= opt.barrier_K) {
            m = k + 1;
            res.t.resize(m);
            res.B.resize(m);
            res.truncated_at_barrier = true;
            break;
        }
    }
    if (m < 2)
        throw std::invalid_argument("barrier truncated the window below two nodes");

    const SemigroupPlan plan = SemigroupPlan::cn_substepped(op, delta, 4);
    const std::size_t n = A0.size();
    const SpatialGrid& grid = op.grid();

    std::vector<Field> A(m, A0);
    std::vector<double> g(m, gamma0);
    std::vector<Field> src(m);
    std::vector<double> gsrc(m);
    int bad_streak = 0;

    for (int it = 0; it < opt.max_iterations; ++it) {
        for (std::size_t k = 0; k < m; ++k) {
            reaction_term(A[k], g[k], mp, src[k]);
            gsrc[k] = mean_power(grid, A[k], mp.r) / pow_checked(g[k], mp.s);
        }

        // Activator map: iterate S(delta) against the left-rectangle source.
        std::vector<Field> An(m);
        An[0] = A0;
        Field hom = A0;
        Field inh(n, 0.0);
        for (std::size_t k = 1; k < m; ++k) {
            for (std::size_t i = 0; i < n; ++i) inh[i] += delta * src[k - 1][i];
            plan.advance(inh);
            plan.advance(hom);
            An[k] = hom;
            for (std::size_t i = 0; i < n; ++i) An[k][i] += inh[i];
        }

        // Inhibitor map: stochastic-exponential kernel against the frozen source.
        std::vector<double> gn(m);
        gn[0] = gamma0;
        for (std::size_t k = 1; k < m; ++k) {
            double acc = 0.0;
            for (std::size_t j = 0; j < k; ++j)
                acc += std::exp(-1.5 * (res.t[k] - res.t[j]) + (res.B[k] - res.B[j])) * gsrc[j];
            gn[k] = std::exp(-1.5 * res.t[k] + res.B[k]) * gamma0 + delta * acc;
        }

        double da = 0.0, dg = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            for (std::size_t i = 0; i < n; ++i)
                da = std::max(da, std::abs(An[k][i] - A[k][i]));
            dg = std::max(dg, std::abs(gn[k] - g[k]));
        }
        const double dist = da + dg;
        res.distances.push_back(dist);
        A.swap(An);
        g.swap(gn);

        const std::size_t nd = res.distances.size();
        const bool decayed = std::isfinite(dist) &&
                             (nd < 2 || dist < res.distances[nd - 2]);
        if (decayed) {
            bad_streak = 0;
        } else if (++bad_streak >= 3) {
            throw NonContractionError(
                "successive iterate distances failed to decay three times in a row "
                "(last distance " + std::to_string(dist) + ")");
        }
        if (std::isfinite(dist) && dist < opt.tol && it >= 1) {
            res.converged = true;
            break;
        }
    }

    res.iterations = static_cast<int>(res.distances.size());
    for (std::size_t i = 0; i + 1 < res.distances.size(); ++i)
        res.ratios.push_back(res.distances[i + 1] / res.distances[i]);
    res.A = std::move(A);
    res.gamma = std::move(g);
    return res;
}

} // namespace sgm
