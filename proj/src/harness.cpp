#include "sgm/harness.hpp"

#include "sgm/activator.hpp"
#include "sgm/errors.hpp"
#include "sgm/inhibitor.hpp"
#include "sgm/monitor.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>
#include <utility>

namespace sgm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Slack allowed when checking the pathwise lower bound: the transform scheme
// respects it exactly in real arithmetic, so anything below this is a bug,
// not roundoff.
constexpr double kFloorTolerance = 1e-9;

// Negative values of this size can appear in the diffusion-only update from
// rounding near nodes where the field vanishes. They are clamped to zero;
// anything more negative indicates a genuine scheme failure.
constexpr double kNegativeRounding = 1e-12;

double step_gamma(double gamma, double mean_r, double dt, double dB, const RunSpec& spec) {
    switch (spec.scheme) {
    case Scheme::em:
        return em_step(gamma, mean_r, dt, dB, spec.model);
    case Scheme::transform:
        return transform_step(gamma, mean_r, dt, dB, spec.model);
    case Scheme::ode:
        return ode_step(gamma, mean_r, dt, spec.model);
    }
    throw std::logic_error("unhandled inhibitor scheme");
}

// Lower bound for the inhibitor at time t given the running sup of |B|.
// Deterministic runs use the noise-free envelope; the normalized stochastic
// model uses the sup form, and other (tau, eta) fall back to the general one.
double floor_at(const RunSpec& spec, double t, double b_star) {
    if (spec.scheme == Scheme::ode || spec.model.eta == 0.0)
        return gamma_floor_sup(t, 0.0, spec.gamma0);
    if (spec.model.tau == 1.0 && spec.model.eta == 1.0)
        return gamma_floor_sup(t, b_star, spec.gamma0);
    return gamma_floor_general(t, b_star, spec.gamma0, spec.model);
}

std::string format_num(double v) {
    if (!std::isfinite(v))
        return "n/a";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

nlohmann::ordered_json json_num(double v) {
    if (!std::isfinite(v))
        return nullptr;
    return v;
}

} // namespace

const char* to_string(Scheme s) {
    switch (s) {
    case Scheme::em: return "em";
    case Scheme::transform: return "transform";
    case Scheme::ode: return "ode";
    }
    return "?";
}

const char* to_string(RunMode m) {
    return m == RunMode::full ? "full" : "localized";
}

const char* to_string(TrajectoryStatus st) {
    switch (st) {
    case TrajectoryStatus::completed: return "completed";
    case TrajectoryStatus::stopped_at_barrier: return "stopped_at_barrier";
    case TrajectoryStatus::blew_up: return "blew_up";
    case TrajectoryStatus::positivity_failed: return "positivity_failed";
    }
    return "?";
}

const char* to_string(InitialData::Kind k) {
    switch (k) {
    case InitialData::Kind::zero: return "zero";
    case InitialData::Kind::constant: return "constant";
    case InitialData::Kind::cosine: return "cosine";
    }
    return "?";
}

Field build_initial_field(const SpatialGrid& grid, const InitialData& init) {
    Field f(grid.size(), 0.0);
    switch (init.kind) {
    case InitialData::Kind::zero:
        break;
    case InitialData::Kind::constant:
        std::fill(f.begin(), f.end(), init.scale);
        break;
    case InitialData::Kind::cosine: {
        // Smooth bump with mass near the left/lower corner, zero normal
        // derivative at every wall, scaled so the sup equals init.scale.
        const double pi = 3.14159265358979323846;
        if (grid.dim == 1) {
            for (int i = 0; i < grid.nx; ++i)
                f[static_cast<std::size_t>(i)] =
                    0.5 * init.scale * (1.0 + std::cos(pi * grid.x(i) / grid.lx));
        } else {
            for (int j = 0; j < grid.ny; ++j) {
                const double wy = 1.0 + std::cos(pi * grid.y(j) / grid.ly);
                for (int i = 0; i < grid.nx; ++i)
                    f[static_cast<std::size_t>(j) * grid.nx + i] =
                        0.25 * init.scale * (1.0 + std::cos(pi * grid.x(i) / grid.lx)) * wy;
            }
        }
        break;
    }
    }
    return f;
}

void validate_spec(const RunSpec& spec) {
    std::string why;
    if (!params_valid(spec.model, &why))
        throw ConfigError("model: " + why);
    if (spec.grid.dim != 1 && spec.grid.dim != 2)
        throw ConfigError("grid dimension must be 1 or 2");
    if (spec.grid.nx < 2 || (spec.grid.dim == 2 && spec.grid.ny < 2))
        throw ConfigError("grid needs at least two nodes per direction");
    if (!(spec.grid.lx > 0.0) || (spec.grid.dim == 2 && !(spec.grid.ly > 0.0)))
        throw ConfigError("domain side lengths must be positive");
    if (!(spec.dt > 0.0) || !std::isfinite(spec.dt))
        throw ConfigError("dt must be positive and finite");
    if (!(spec.horizon >= spec.dt) || !std::isfinite(spec.horizon))
        throw ConfigError("horizon must be finite and at least one step long");
    const double steps = spec.horizon / spec.dt;
    if (std::abs(steps - std::round(steps)) > 1e-6 * std::max(1.0, steps))
        throw ConfigError("horizon must be an integer multiple of dt");
    if (spec.paths == 0)
        throw ConfigError("need at least one trajectory");
    if (spec.scheme == Scheme::transform && (spec.model.tau != 1.0 || spec.model.eta != 1.0))
        throw ConfigError("the transform scheme requires tau = 1 and eta = 1");
    if (spec.scheme == Scheme::ode && spec.model.eta != 0.0)
        throw ConfigError("the ode scheme requires eta = 0");
    if (spec.scheme != Scheme::ode && spec.model.eta == 0.0)
        throw ConfigError("eta = 0 runs must use the ode scheme");
    if (!(spec.barrier_K > 0.0))
        throw ConfigError("barrier level must be positive");
    if (spec.mode == RunMode::localized && !std::isfinite(spec.barrier_K))
        throw ConfigError("localized runs need a finite barrier level");
    if (!(spec.gamma0 > 0.0) || !std::isfinite(spec.gamma0))
        throw ConfigError("initial inhibitor value must be positive and finite");
    if (!(spec.initial.scale >= 0.0) || !std::isfinite(spec.initial.scale))
        throw ConfigError("initial activator scale must be nonnegative and finite");
    if (!(spec.monitor.alpha > 1.0))
        throw ConfigError("monitor exponent alpha must exceed 1");
    if (!(spec.monitor.beta >= 0.0))
        throw ConfigError("monitor exponent beta must be nonnegative");
    if (!(spec.monitor.ell >= 1.0))
        throw ConfigError("monitor norm index ell must be at least 1");
    if (!(spec.monitor.blow_up_threshold > 0.0))
        throw ConfigError("blow-up threshold must be positive");
    if (spec.record_stride == 0)
        throw ConfigError("record stride must be at least 1");
    if (spec.workers < 1)
        throw ConfigError("need at least one worker");
    if (spec.max_halvings < 0)
        throw ConfigError("max_halvings must be nonnegative");
}

void coupled_step(Field& A, double& gamma, double dB, double dt, const SemigroupPlan& plan,
                  const RunSpec& spec, const StepContext& ctx) {
    const ModelParams& mp = spec.model;
    try {
        // Advance the inhibitor with the activator frozen at the step start,
        // then feed the updated value into the activator's reaction term.
        // Neither state is committed until both sub-steps succeed.
        const double mean_r = mean_power(spec.grid, A, mp.r);
        const double gamma_new = step_gamma(gamma, mean_r, dt, dB, spec);
        Field A_new;
        if (spec.reaction_enabled) {
            A_new = imex_step(plan, A, gamma_new, mp, spec.monitor.blow_up_threshold);
        } else {
            A_new = plan.apply(A);
            for (double& v : A_new) {
                if (v < 0.0) {
                    if (v < -kNegativeRounding)
                        throw PositivityError("diffusion-only update produced " + std::to_string(v));
                    v = 0.0;
                }
            }
        }
        gamma = gamma_new;
        A = std::move(A_new);
    } catch (const PositivityError& e) {
        throw PositivityError(std::string(e.what()) + " [trajectory " + std::to_string(ctx.trajectory) +
                              ", t=" + std::to_string(ctx.t) + "]");
    } catch (const BlowUpError& e) {
        throw BlowUpError(e.sup_norm,
                          "trajectory " + std::to_string(ctx.trajectory) + ", t=" + std::to_string(ctx.t));
    }
}

namespace {

// Runs one trajectory on a fixed Brownian path, filling `rec` from scratch.
// Throws PositivityError when the gamma step loses positivity; the caller
// decides whether to retry on a refined path.
void integrate_path(const RunSpec& spec, const BrownianPath& path, std::uint64_t index,
                    bool keep_rows, TrajectoryRecord& rec) {
    const ModelParams& mp = spec.model;
    const SpatialGrid& grid = spec.grid;
    const MonitorConfig& mon = spec.monitor;
    const double dt = path.dt;
    const std::size_t steps = path.steps();
    const double measure = grid.measure();

    rec = TrajectoryRecord{};
    rec.index = index;
    rec.dt_used = dt;
    rec.lb_asserted = (spec.scheme == Scheme::transform);

    const EstimateConfig est = make_estimate_config(mp, grid.dim);
    rec.estimates_active = est.usable();

    const RobinOperator op(grid, mp.epsilon, mp.a);
    const SemigroupPlan plan(op, dt);

    Field A = build_initial_field(grid, spec.initial);
    double gamma = spec.gamma0;

    double ito_sum = 0.0;      // running left-point sum of gamma^{-delta} dB
    double sup_ito = 0.0;      // sup over grid times of |ito_sum|
    double h_integral = 0.0;   // left-rectangle integral of h_delta
    double min_lb = kInf;
    double max_hab = 0.0, max_g1 = 0.0, max_g2 = 0.0;
    bool finite = true;

    // Evaluates every monitor at grid node k and appends a row when due.
    // Returns h_delta so the caller can extend the running integral.
    const auto observe = [&](std::size_t k) {
        const double t = path.times[k];
        const double b_star = path.running_sup[k];
        const double mean_r = mean_power(grid, A, mp.r);
        const double integral_r = mean_r * measure;
        const double h_delta = rec.estimates_active ? concentration_h(integral_r, gamma, mp, est) : kNaN;
        const double hab = ratio_functional(grid, A, gamma, mon.alpha, mon.beta);
        const double v = rec.estimates_active ? interpolation_v(h_delta, est) : kNaN;
        const double g1 = std::pow(mean_power(grid, A, mp.p * mon.ell) * measure, 1.0 / mon.ell) /
                          (pow_checked(gamma, mp.q) + mp.b);
        const double g2 = std::pow(mean_power(grid, A, mp.r * mon.ell) * measure, 1.0 / mon.ell) /
                          pow_checked(gamma, mp.s);
        const double lb = gamma - floor_at(spec, t, b_star);
        double bound_margin = kNaN;
        if (rec.estimates_active) {
            const double bound = integrated_h_bound(t, sup_ito, spec.gamma0, spec.barrier_K, mp, est);
            bound_margin = bound - h_integral;
        }

        max_hab = std::max(max_hab, hab);
        max_g1 = std::max(max_g1, g1);
        max_g2 = std::max(max_g2, g2);
        finite = finite && std::isfinite(hab) && std::isfinite(g1) && std::isfinite(g2) &&
                 (!rec.estimates_active || (std::isfinite(h_delta) && std::isfinite(v)));
        min_lb = std::min(min_lb, lb);
        if (rec.lb_asserted && lb < -kFloorTolerance)
            ++rec.lb_violations;

        if (keep_rows && (k % spec.record_stride == 0 || k == steps)) {
            rec.rows.push_back(StepRow{t, gamma, mean_r, sup_norm(A), h_delta, h_integral,
                                       hab, v, lb, bound_margin});
        }
        return h_delta;
    };

    std::size_t stop_index = steps;
    std::size_t k = 0;
    for (; k < steps; ++k) {
        if (spec.mode == RunMode::localized && path.running_sup[k] >= spec.barrier_K) {
            // First grid time at which |B| has reached the barrier. The state
            // here is still valid but outside the localization window, so it
            // is not recorded.
            rec.status = TrajectoryStatus::stopped_at_barrier;
            stop_index = k;
            break;
        }
        const double h_delta = observe(k);
        if (rec.estimates_active) {
            ito_sum += pow_checked(gamma, -est.delta) * path.increment(k);
            sup_ito = std::max(sup_ito, std::abs(ito_sum));
            h_integral += h_delta * dt;
        }
        try {
            coupled_step(A, gamma, path.increment(k), dt, plan, spec,
                         StepContext{path.times[k], index});
        } catch (const BlowUpError& e) {
            rec.status = TrajectoryStatus::blew_up;
            rec.final_sup_A = e.sup_norm;
            stop_index = k + 1;
            break;
        }
    }
    if (rec.status == TrajectoryStatus::completed)
        observe(steps);

    rec.stop_time = path.times[stop_index];
    rec.b_star_end = path.running_sup[stop_index];
    rec.restricted = rec.b_star_end < spec.barrier_K;
    if (rec.status != TrajectoryStatus::blew_up)
        rec.final_sup_A = sup_norm(A);
    rec.final_gamma = gamma;
    rec.h_delta_integral_end = h_integral;
    rec.sup_ito = sup_ito;
    if (rec.estimates_active) {
        const double bound = integrated_h_bound(rec.stop_time, sup_ito, spec.gamma0,
                                                spec.barrier_K, mp, est);
        rec.integrated_bound_margin = bound - h_integral;
    } else {
        rec.integrated_bound_margin = kNaN;
    }
    rec.max_h_alpha_beta = max_hab;
    rec.max_g1_ell = max_g1;
    rec.max_g2_ell = max_g2;
    rec.monitors_finite = finite;
    rec.min_lb_margin = std::isfinite(min_lb) ? min_lb : kNaN;
}

} // namespace

TrajectoryRecord run_trajectory(const RunSpec& spec, std::uint64_t index, bool keep_rows) {
    validate_spec(spec);
    const auto steps = static_cast<std::size_t>(std::llround(spec.horizon / spec.dt));
    BrownianPath path = generate_path(spec.master_seed, index, spec.horizon, steps);

    TrajectoryRecord rec;
    for (int halving = 0;; ++halving) {
        try {
            integrate_path(spec, path, index, keep_rows, rec);
            rec.halvings = halving;
            return rec;
        } catch (const PositivityError&) {
            if (halving >= spec.max_halvings) {
                // Give up on this trajectory rather than poison the ensemble.
                rec = TrajectoryRecord{};
                rec.index = index;
                rec.status = TrajectoryStatus::positivity_failed;
                rec.dt_used = path.dt;
                rec.halvings = halving;
                rec.monitors_finite = false;
                rec.min_lb_margin = kNaN;
                rec.integrated_bound_margin = kNaN;
                rec.final_gamma = kNaN;
                rec.final_sup_A = kNaN;
                return rec;
            }
            // Same Brownian path, finer sampling: the retry stays on the
            // trajectory that failed instead of drawing a fresh one.
            path = refine_path(path, 2);
        }
    }
}

EnsembleReport run_ensemble(const RunSpec& spec) {
    validate_spec(spec);
    const std::size_t n = spec.paths;
    std::vector<TrajectoryRecord> records(n);

    const std::size_t workers = std::min(static_cast<std::size_t>(std::max(spec.workers, 1)), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            records[i] = run_trajectory(spec, i, false);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr first_error;
        std::mutex error_mutex;
        const auto work = [&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n)
                    return;
                try {
                    records[i] = run_trajectory(spec, i, false);
                } catch (...) {
                    const std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error)
                        first_error = std::current_exception();
                    return;
                }
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back(work);
        for (auto& th : pool)
            th.join();
        if (first_error)
            std::rethrow_exception(first_error);
    }

    // Aggregation walks the records in index order, so the report is
    // identical no matter how many workers produced them.
    EnsembleReport rep;
    rep.n_paths = n;
    const RegimeCheck regime = check_global_regime(spec.model, spec.grid.dim);
    rep.regime_global = regime.global;
    rep.regime_margin = regime.margin;

    std::vector<double> cts;
    cts.reserve(n);
    std::size_t exceed = 0;
    for (const TrajectoryRecord& r : records) {
        switch (r.status) {
        case TrajectoryStatus::completed: ++rep.completed; break;
        case TrajectoryStatus::stopped_at_barrier: ++rep.stopped_at_barrier; break;
        case TrajectoryStatus::blew_up: ++rep.blew_up; break;
        case TrajectoryStatus::positivity_failed: ++rep.positivity_failed; break;
        }
        if (r.status == TrajectoryStatus::positivity_failed)
            continue;
        if (!r.restricted)
            ++exceed;
        if (r.lb_asserted) {
            ++rep.asserted_paths;
            if (r.lb_violations > 0)
                ++rep.lb_violating_paths;
        }
        if (r.restricted && r.estimates_active) {
            ++rep.restricted_paths;
            if (!(r.integrated_bound_margin >= 0.0))
                ++rep.margin_violating_paths;
        }
        if (r.monitors_finite)
            cts.push_back(r.max_h_alpha_beta);
        else
            ++rep.monitors_nonfinite;
        if (std::isfinite(r.max_g1_ell))
            rep.max_g1_ell = std::max(rep.max_g1_ell, r.max_g1_ell);
        if (std::isfinite(r.max_g2_ell))
            rep.max_g2_ell = std::max(rep.max_g2_ell, r.max_g2_ell);
    }
    rep.fraction_bstar_exceeds = static_cast<double>(exceed) / static_cast<double>(n);
    rep.fraction_lb_violating = rep.asserted_paths
        ? static_cast<double>(rep.lb_violating_paths) / static_cast<double>(rep.asserted_paths)
        : 0.0;
    rep.fraction_margin_violating = rep.restricted_paths
        ? static_cast<double>(rep.margin_violating_paths) / static_cast<double>(rep.restricted_paths)
        : 0.0;
    if (!cts.empty()) {
        std::sort(cts.begin(), cts.end());
        rep.ct_min = cts.front();
        rep.ct_max = cts.back();
        const std::size_t m = cts.size();
        rep.ct_median = (m % 2 == 1) ? cts[m / 2] : 0.5 * (cts[m / 2 - 1] + cts[m / 2]);
    }
    rep.trajectories = std::move(records);
    return rep;
}

namespace {

// Final inhibitor value on a fixed path, no monitors. Shared by the
// refinement study where only the endpoint error matters.
double integrate_final_gamma(const RunSpec& spec, const BrownianPath& path) {
    const RobinOperator op(spec.grid, spec.model.epsilon, spec.model.a);
    const SemigroupPlan plan(op, path.dt);
    Field A = build_initial_field(spec.grid, spec.initial);
    double gamma = spec.gamma0;
    const std::size_t steps = path.steps();
    for (std::size_t k = 0; k < steps; ++k)
        coupled_step(A, gamma, path.increment(k), path.dt, plan, spec,
                     StepContext{path.times[k], 0});
    return gamma;
}

} // namespace

ConvergenceResult convergence_study(const RunSpec& spec, int levels) {
    validate_spec(spec);
    if (levels < 3)
        throw std::invalid_argument("refinement study needs at least 3 levels");
    const auto steps0 = static_cast<std::size_t>(std::llround(spec.horizon / spec.dt));

    ConvergenceResult res;
    const Field A0 = build_initial_field(spec.grid, spec.initial);
    // With a vanishing activator and unit relaxation/noise scales the
    // inhibitor is an exact geometric Brownian motion, so every level can be
    // compared against the closed form. Otherwise the finest level serves as
    // the reference and drops out of the fit.
    res.exact_reference = (sup_norm(A0) == 0.0) && spec.model.tau == 1.0 && spec.model.eta == 1.0;
    const int fit_levels = res.exact_reference ? levels : levels - 1;

    std::vector<double> error_sums(static_cast<std::size_t>(fit_levels), 0.0);
    std::size_t used = 0;
    std::size_t excluded = 0;
    for (std::uint64_t j = 0; j < spec.paths; ++j) {
        BrownianPath path = generate_path(spec.master_seed, j, spec.horizon, steps0);
        std::vector<double> finals(static_cast<std::size_t>(levels), 0.0);
        bool ok = true;
        for (int lev = 0; lev < levels; ++lev) {
            try {
                finals[static_cast<std::size_t>(lev)] = integrate_final_gamma(spec, path);
            } catch (const PositivityError&) {
                ok = false;
            } catch (const BlowUpError&) {
                ok = false;
            }
            if (!ok)
                break;
            if (lev + 1 < levels)
                path = refine_path(path, 2);
        }
        if (!ok) {
            ++excluded;
            continue;
        }
        const double reference = res.exact_reference
            ? spec.gamma0 * std::exp(-1.5 * spec.horizon + path.values.back())
            : finals[static_cast<std::size_t>(levels - 1)];
        for (int lev = 0; lev < fit_levels; ++lev)
            error_sums[static_cast<std::size_t>(lev)] +=
                std::abs(finals[static_cast<std::size_t>(lev)] - reference);
        ++used;
    }
    if (used == 0)
        throw std::runtime_error("every path was excluded from the refinement study");
    res.paths_used = used;
    res.paths_excluded = excluded;

    for (int lev = 0; lev < fit_levels; ++lev) {
        res.dts.push_back(spec.dt / static_cast<double>(std::size_t{1} << lev));
        res.errors.push_back(error_sums[static_cast<std::size_t>(lev)] / static_cast<double>(used));
    }

    // Least-squares slope of log2(error) against log2(dt). Errors are floored
    // far below anything observable so an exact scheme cannot produce -inf.
    const std::size_t m = res.dts.size();
    double mx = 0.0, my = 0.0;
    std::vector<double> xs(m), ys(m);
    for (std::size_t i = 0; i < m; ++i) {
        xs[i] = std::log2(res.dts[i]);
        ys[i] = std::log2(std::max(res.errors[i], 1e-300));
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(m);
    my /= static_cast<double>(m);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    res.slope = sxy / sxx;
    return res;
}

void write_csv(const TrajectoryRecord& rec, std::ostream& os) {
    os << "t,gamma,mean_r,sup_A,h_delta,h_delta_integral,h_alpha_beta,v,lb_margin,lemma32_margin\n";
    for (const StepRow& r : rec.rows) {
        os << format_num(r.t) << ',' << format_num(r.gamma) << ',' << format_num(r.mean_r) << ','
           << format_num(r.sup_A) << ',' << format_num(r.h_delta) << ','
           << format_num(r.h_delta_integral) << ',' << format_num(r.h_alpha_beta) << ','
           << format_num(r.v) << ',' << format_num(r.lb_margin) << ','
           << format_num(r.integrated_bound_margin) << '\n';
    }
}

namespace {

// The report deliberately omits the worker count and output paths: the same
// experiment must produce byte-identical output however it was scheduled.
void append_spec_lines(const RunSpec& spec, std::ostream& os) {
    const ModelParams& mp = spec.model;
    os << "scheme=" << to_string(spec.scheme) << '\n'
       << "mode=" << to_string(spec.mode) << '\n'
       << "p=" << format_num(mp.p) << '\n'
       << "q=" << format_num(mp.q) << '\n'
       << "r=" << format_num(mp.r) << '\n'
       << "s=" << format_num(mp.s) << '\n'
       << "epsilon=" << format_num(mp.epsilon) << '\n'
       << "tau=" << format_num(mp.tau) << '\n'
       << "eta=" << format_num(mp.eta) << '\n'
       << "a=" << format_num(mp.a) << '\n'
       << "b=" << format_num(mp.b) << '\n'
       << "dim=" << spec.grid.dim << '\n'
       << "nx=" << spec.grid.nx << '\n'
       << "ny=" << (spec.grid.dim == 2 ? spec.grid.ny : 1) << '\n'
       << "lx=" << format_num(spec.grid.lx) << '\n'
       << "ly=" << format_num(spec.grid.dim == 2 ? spec.grid.ly : 0.0) << '\n'
       << "initial=" << to_string(spec.initial.kind) << '\n'
       << "initial_scale=" << format_num(spec.initial.scale) << '\n'
       << "gamma0=" << format_num(spec.gamma0) << '\n'
       << "dt=" << format_num(spec.dt) << '\n'
       << "horizon=" << format_num(spec.horizon) << '\n'
       << "paths=" << spec.paths << '\n'
       << "master_seed=" << spec.master_seed << '\n'
       << "barrier_K=" << (std::isfinite(spec.barrier_K) ? format_num(spec.barrier_K) : "none") << '\n'
       << "alpha=" << format_num(spec.monitor.alpha) << '\n'
       << "beta=" << format_num(spec.monitor.beta) << '\n'
       << "ell=" << format_num(spec.monitor.ell) << '\n'
       << "blow_up_threshold=" << format_num(spec.monitor.blow_up_threshold) << '\n';
}

} // namespace

void write_report_text(const EnsembleReport& rep, const RunSpec& spec, std::ostream& os) {
    append_spec_lines(spec, os);
    os << "n_paths=" << rep.n_paths << '\n'
       << "completed=" << rep.completed << '\n'
       << "stopped_at_barrier=" << rep.stopped_at_barrier << '\n'
       << "blew_up=" << rep.blew_up << '\n'
       << "positivity_failed=" << rep.positivity_failed << '\n'
       << "regime_global=" << (rep.regime_global ? "true" : "false") << '\n'
       << "regime_margin=" << format_num(rep.regime_margin) << '\n'
       << "fraction_bstar_exceeds=" << format_num(rep.fraction_bstar_exceeds) << '\n'
       << "asserted_paths=" << rep.asserted_paths << '\n'
       << "lb_violating_paths=" << rep.lb_violating_paths << '\n'
       << "fraction_lb_violating=" << format_num(rep.fraction_lb_violating) << '\n'
       << "restricted_paths=" << rep.restricted_paths << '\n'
       << "margin_violating_paths=" << rep.margin_violating_paths << '\n'
       << "fraction_margin_violating=" << format_num(rep.fraction_margin_violating) << '\n'
       << "monitors_nonfinite=" << rep.monitors_nonfinite << '\n'
       << "ct_min=" << format_num(rep.ct_min) << '\n'
       << "ct_median=" << format_num(rep.ct_median) << '\n'
       << "ct_max=" << format_num(rep.ct_max) << '\n'
       << "max_g1_ell=" << format_num(rep.max_g1_ell) << '\n'
       << "max_g2_ell=" << format_num(rep.max_g2_ell) << '\n';
}

void write_report_json(const EnsembleReport& rep, const RunSpec& spec, std::ostream& os) {
    using json = nlohmann::ordered_json;
    json root;

    json& sp = root["spec"];
    const ModelParams& mp = spec.model;
    sp["scheme"] = to_string(spec.scheme);
    sp["mode"] = to_string(spec.mode);
    sp["model"] = {{"p", mp.p}, {"q", mp.q}, {"r", mp.r}, {"s", mp.s},
                   {"epsilon", mp.epsilon}, {"tau", mp.tau}, {"eta", mp.eta},
                   {"a", mp.a}, {"b", mp.b}};
    sp["grid"] = {{"dim", spec.grid.dim}, {"nx", spec.grid.nx},
                  {"ny", spec.grid.dim == 2 ? spec.grid.ny : 1},
                  {"lx", spec.grid.lx}, {"ly", spec.grid.dim == 2 ? spec.grid.ly : 0.0}};
    sp["initial"] = {{"kind", to_string(spec.initial.kind)}, {"scale", spec.initial.scale}};
    sp["gamma0"] = spec.gamma0;
    sp["dt"] = spec.dt;
    sp["horizon"] = spec.horizon;
    sp["paths"] = spec.paths;
    sp["master_seed"] = spec.master_seed;
    sp["barrier_K"] = json_num(spec.barrier_K);
    sp["monitor"] = {{"alpha", spec.monitor.alpha}, {"beta", spec.monitor.beta},
                     {"ell", spec.monitor.ell},
                     {"blow_up_threshold", spec.monitor.blow_up_threshold}};

    json& sm = root["summary"];
    sm["n_paths"] = rep.n_paths;
    sm["completed"] = rep.completed;
    sm["stopped_at_barrier"] = rep.stopped_at_barrier;
    sm["blew_up"] = rep.blew_up;
    sm["positivity_failed"] = rep.positivity_failed;
    sm["regime_global"] = rep.regime_global;
    sm["regime_margin"] = json_num(rep.regime_margin);
    sm["fraction_bstar_exceeds"] = json_num(rep.fraction_bstar_exceeds);
    sm["asserted_paths"] = rep.asserted_paths;
    sm["lb_violating_paths"] = rep.lb_violating_paths;
    sm["fraction_lb_violating"] = json_num(rep.fraction_lb_violating);
    sm["restricted_paths"] = rep.restricted_paths;
    sm["margin_violating_paths"] = rep.margin_violating_paths;
    sm["fraction_margin_violating"] = json_num(rep.fraction_margin_violating);
    sm["monitors_nonfinite"] = rep.monitors_nonfinite;
    sm["ct_min"] = json_num(rep.ct_min);
    sm["ct_median"] = json_num(rep.ct_median);
    sm["ct_max"] = json_num(rep.ct_max);
    sm["max_g1_ell"] = json_num(rep.max_g1_ell);
    sm["max_g2_ell"] = json_num(rep.max_g2_ell);

    json traj = json::array();
    for (const TrajectoryRecord& r : rep.trajectories) {
        traj.push_back({{"index", r.index},
                        {"status", to_string(r.status)},
                        {"stop_time", json_num(r.stop_time)},
                        {"b_star_end", json_num(r.b_star_end)},
                        {"restricted", r.restricted},
                        {"dt_used", json_num(r.dt_used)},
                        {"halvings", r.halvings},
                        {"final_gamma", json_num(r.final_gamma)},
                        {"final_sup_A", json_num(r.final_sup_A)},
                        {"max_h_alpha_beta", json_num(r.max_h_alpha_beta)},
                        {"min_lb_margin", json_num(r.min_lb_margin)},
                        {"lb_violations", r.lb_violations},
                        {"integrated_bound_margin", json_num(r.integrated_bound_margin)}});
    }
    root["trajectories"] = std::move(traj);
    os << root.dump(2) << '\n';
}

} // namespace sgm
