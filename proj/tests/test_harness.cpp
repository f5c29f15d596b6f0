#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "sgm/brownian.hpp"
#include "sgm/errors.hpp"
#include "sgm/harness.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "json.hpp"

using namespace sgm;

namespace {

RunSpec small_spec() {
    RunSpec spec;
    spec.grid = make_grid_1d(32, 1.0);
    spec.horizon = 0.5;
    spec.dt = 1.0 / 128.0;
    spec.paths = 8;
    spec.master_seed = 404;
    return spec;
}

} // namespace

TEST_CASE("spec validation catches inconsistent requests") {
    RunSpec spec = small_spec();
    CHECK_NOTHROW(validate_spec(spec));

    SUBCASE("horizon must be a step multiple") {
        spec.horizon = 0.5 + 0.3 * spec.dt;
        CHECK_THROWS_AS(validate_spec(spec), ConfigError);
    }
    SUBCASE("transform scheme needs the normalized model") {
        spec.model.eta = 0.5;
        CHECK_THROWS_AS(validate_spec(spec), ConfigError);
    }
    SUBCASE("noise-free runs must use the deterministic integrator") {
        spec.model.eta = 0.0;
        spec.scheme = Scheme::em;
        CHECK_THROWS_AS(validate_spec(spec), ConfigError);
        spec.scheme = Scheme::ode;
        CHECK_NOTHROW(validate_spec(spec));
    }
    SUBCASE("localized mode needs a finite barrier") {
        spec.mode = RunMode::localized;
        spec.barrier_K = std::numeric_limits<double>::infinity();
        CHECK_THROWS_AS(validate_spec(spec), ConfigError);
    }
    SUBCASE("model violations surface as configuration errors") {
        spec.model.b = 0.0;
        CHECK_THROWS_AS(validate_spec(spec), ConfigError);
    }
}

TEST_CASE("initial profiles") {
    const SpatialGrid g = make_grid_1d(9, 1.0);
    InitialData id;

    id.kind = InitialData::Kind::zero;
    for (double v : build_initial_field(g, id))
        CHECK(v == 0.0);

    id.kind = InitialData::Kind::constant;
    id.scale = 1.7;
    for (double v : build_initial_field(g, id))
        CHECK(v == 1.7);

    id.kind = InitialData::Kind::cosine;
    id.scale = 2.0;
    const Field f = build_initial_field(g, id);
    CHECK(f.front() == doctest::Approx(2.0)); // sup at the left wall
    CHECK(f.back() == doctest::Approx(0.0));
    CHECK(mean_value(g, f) == doctest::Approx(1.0).epsilon(1e-13)); // cosine mass cancels

    const SpatialGrid g2 = make_grid_2d(7, 5, 1.0, 1.0);
    const Field f2 = build_initial_field(g2, id);
    CHECK(f2.front() == doctest::Approx(2.0)); // corner carries the sup
    CHECK(sup_norm(f2) == doctest::Approx(2.0));
}

TEST_CASE("diffusion-only mass decays like exp(-t)") {
    // With reaction off, no wall leakage, and trapezoid weights, the mean of
    // the activator is damped by exactly ((1-dt/2)/(1+dt/2)) per CN step.
    RunSpec spec;
    spec.grid = make_grid_1d(32, 1.0);
    spec.model.r = 1.0; // row's mean_r then reports the plain mean
    spec.model.eta = 0.0;
    spec.scheme = Scheme::ode;
    spec.model.a = 0.0;
    spec.reaction_enabled = false;
    spec.horizon = 1.0;
    spec.dt = 1e-4;
    spec.initial.kind = InitialData::Kind::cosine;
    spec.initial.scale = 2.0;

    const TrajectoryRecord rec = run_trajectory(spec, 0);
    REQUIRE(rec.status == TrajectoryStatus::completed);
    REQUIRE(!rec.rows.empty());
    CHECK(rec.rows.front().mean_r == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(rec.rows.back().mean_r == doctest::Approx(std::exp(-1.0)).epsilon(1e-8));
}

TEST_CASE("row bookkeeping on a short transform run") {
    RunSpec spec = small_spec();
    spec.record_stride = 7;
    spec.horizon = 100.0 * spec.dt;

    const TrajectoryRecord rec = run_trajectory(spec, 3);
    REQUIRE(rec.status == TrajectoryStatus::completed);
    // nodes 0,7,...,98 plus the forced final node 100
    CHECK(rec.rows.size() == 16);
    CHECK(rec.rows.front().t == 0.0);
    CHECK(rec.rows.back().t == doctest::Approx(spec.horizon).epsilon(1e-12));

    CHECK(rec.lb_asserted);
    CHECK(rec.lb_violations == 0);
    CHECK(rec.estimates_active);
    double prev_integral = -1.0;
    for (const StepRow& row : rec.rows) {
        CHECK(row.lb_margin >= -1e-9);
        CHECK(row.h_delta >= 0.0);
        CHECK(row.h_delta_integral >= prev_integral);
        prev_integral = row.h_delta_integral;
        CHECK(std::isfinite(row.v));
    }
    CHECK(rec.min_lb_margin >= -1e-9);

    // ensemble runs do not keep rows
    const TrajectoryRecord bare = run_trajectory(spec, 3, false);
    CHECK(bare.rows.empty());
    CHECK(bare.final_gamma == rec.final_gamma);
}

TEST_CASE("localized runs stop at the barrier and never record beyond it") {
    RunSpec spec = small_spec();
    spec.mode = RunMode::localized;
    spec.barrier_K = 0.5;
    spec.horizon = 4.0;
    spec.dt = 1.0 / 256.0;
    spec.initial.kind = InitialData::Kind::zero;

    bool found_stopped = false;
    for (std::uint64_t idx = 0; idx < 10 && !found_stopped; ++idx) {
        const TrajectoryRecord rec = run_trajectory(spec, idx);
        if (rec.status != TrajectoryStatus::stopped_at_barrier)
            continue;
        found_stopped = true;
        CHECK(rec.b_star_end >= spec.barrier_K);
        CHECK_FALSE(rec.restricted);
        CHECK(rec.stop_time > 0.0);
        CHECK(rec.stop_time < spec.horizon);

        // replay the noise: every recorded time lies strictly inside the
        // localization window and the stop node is the first one outside
        const auto steps = static_cast<std::size_t>(std::llround(spec.horizon / spec.dt));
        const BrownianPath path = generate_path(spec.master_seed, idx, spec.horizon, steps);
        for (const StepRow& row : rec.rows) {
            const auto k = static_cast<std::size_t>(std::llround(row.t / spec.dt));
            CHECK(path.running_sup[k] < spec.barrier_K);
        }
        const auto stop = static_cast<std::size_t>(std::llround(rec.stop_time / spec.dt));
        CHECK(path.running_sup[stop] >= spec.barrier_K);
        CHECK(path.running_sup[stop - 1] < spec.barrier_K);
        REQUIRE(!rec.rows.empty());
        CHECK(rec.rows.back().t < rec.stop_time);
    }
    CHECK(found_stopped);
}

TEST_CASE("blow-up is recorded, not rethrown") {
    RunSpec spec;
    spec.grid = make_grid_1d(16, 1.0);
    spec.model.p = 3.0;
    spec.model.q = 2.5;
    spec.model.r = 1.0;
    spec.model.s = 0.0;
    spec.model.b = 0.1;
    spec.model.a = 0.0;
    spec.model.eta = 0.0;
    spec.scheme = Scheme::ode;
    spec.gamma0 = 0.5;
    spec.initial.kind = InitialData::Kind::constant;
    spec.initial.scale = 5.0;
    spec.horizon = 0.05;
    spec.dt = 1e-4;

    const TrajectoryRecord rec = run_trajectory(spec, 0);
    CHECK(rec.status == TrajectoryStatus::blew_up);
    CHECK(rec.final_sup_A >= spec.monitor.blow_up_threshold);
    CHECK(rec.stop_time > 0.004);
    CHECK(rec.stop_time < 0.01);
    REQUIRE(!rec.rows.empty());
    CHECK(rec.rows.back().t < rec.stop_time + 1e-12);
}

TEST_CASE("positivity failures retry on the refined path at half the step") {
    // Violent noise makes the Euler step fail often at dt = 1/4; the harness
    // must walk down in dt until the path survives.
    RunSpec spec;
    spec.grid = make_grid_1d(8, 1.0);
    spec.model.eta = 25.0;
    spec.scheme = Scheme::em;
    spec.initial.kind = InitialData::Kind::zero;
    spec.horizon = 1.0;
    spec.dt = 0.25;
    spec.paths = 20;
    spec.master_seed = 7;
    spec.max_halvings = 14;
    spec.barrier_K = std::numeric_limits<double>::infinity();

    int retried = 0;
    for (std::uint64_t idx = 0; idx < spec.paths; ++idx) {
        const TrajectoryRecord rec = run_trajectory(spec, idx, false);
        REQUIRE(rec.status == TrajectoryStatus::completed);
        if (rec.halvings > 0) {
            ++retried;
            CHECK(rec.dt_used ==
                  doctest::Approx(spec.dt / std::pow(2.0, rec.halvings)).epsilon(1e-12));
        }
        CHECK(rec.final_gamma > 0.0);
    }
    CHECK(retried > 0);
}

TEST_CASE("ensemble reports are identical for any worker count") {
    RunSpec spec = small_spec();

    RunSpec parallel = spec;
    parallel.workers = 4;

    const EnsembleReport a = run_ensemble(spec);
    const EnsembleReport b = run_ensemble(parallel);

    std::ostringstream ta, tb, ja, jb;
    write_report_text(a, spec, ta);
    write_report_text(b, parallel, tb);
    write_report_json(a, spec, ja);
    write_report_json(b, parallel, jb);
    CHECK(ta.str() == tb.str());
    CHECK(ja.str() == jb.str());

    CHECK(a.n_paths == 8);
    CHECK(a.completed + a.stopped_at_barrier + a.blew_up + a.positivity_failed == 8);
    CHECK(a.regime_global); // default exponents are in the global regime

    // the structured report is valid JSON with the advertised fields
    const nlohmann::json parsed = nlohmann::json::parse(ja.str());
    CHECK(parsed["summary"]["n_paths"] == 8);
    CHECK(parsed["trajectories"].size() == 8);
    CHECK(parsed["spec"]["model"]["p"] == 2.0);
}

TEST_CASE("csv output shape and missing-value convention") {
    SUBCASE("active estimates produce full numeric rows") {
        RunSpec spec = small_spec();
        spec.horizon = 10.0 * spec.dt;
        const TrajectoryRecord rec = run_trajectory(spec, 1);
        std::ostringstream os;
        write_csv(rec, os);
        std::istringstream is(os.str());
        std::string header;
        std::getline(is, header);
        CHECK(header ==
              "t,gamma,mean_r,sup_A,h_delta,h_delta_integral,h_alpha_beta,v,lb_margin,"
              "lemma32_margin");
        std::size_t lines = 0;
        std::string line;
        while (std::getline(is, line))
            if (!line.empty())
                ++lines;
        CHECK(lines == rec.rows.size());
        CHECK(os.str().find("n/a") == std::string::npos);
    }
    SUBCASE("unusable estimate exponents appear as n/a, never as inf") {
        RunSpec spec = small_spec();
        spec.model.p = 4.0;
        spec.model.q = 4.0;
        spec.model.r = 1.0;
        spec.model.s = 0.0; // kappa = 3 puts theta past 1
        spec.scheme = Scheme::em;
        spec.horizon = 10.0 * spec.dt;
        spec.initial.kind = InitialData::Kind::constant;
        spec.initial.scale = 0.5;
        const TrajectoryRecord rec = run_trajectory(spec, 0);
        CHECK_FALSE(rec.estimates_active);
        std::ostringstream os;
        write_csv(rec, os);
        CHECK(os.str().find("n/a") != std::string::npos);
        CHECK(os.str().find("inf") == std::string::npos);
        CHECK(os.str().find("nan") == std::string::npos);
    }
}

TEST_CASE("strong convergence study") {
    RunSpec spec;
    spec.grid = make_grid_1d(8, 1.0);
    spec.initial.kind = InitialData::Kind::zero;
    spec.horizon = 1.0;
    spec.dt = 1.0 / 32.0;
    spec.paths = 300;
    spec.master_seed = 11;
    spec.barrier_K = std::numeric_limits<double>::infinity();

    SUBCASE("the Euler scheme shows strong order one half against the closed form") {
        spec.scheme = Scheme::em;
        const ConvergenceResult res = convergence_study(spec, 5);
        CHECK(res.exact_reference);
        CHECK(res.paths_used + res.paths_excluded == spec.paths);
        CHECK(res.slope > 0.35);
        CHECK(res.slope < 0.65);
        REQUIRE(res.errors.size() == 5);
        CHECK(res.errors.front() > res.errors.back());
    }
    SUBCASE("the transform scheme hits the closed form to roundoff") {
        spec.scheme = Scheme::transform;
        const ConvergenceResult res = convergence_study(spec, 3);
        CHECK(res.exact_reference);
        for (double err : res.errors)
            CHECK(err < 1e-10);
    }
    SUBCASE("at least three levels are required") {
        CHECK_THROWS_AS(convergence_study(spec, 2), std::invalid_argument);
    }
}
