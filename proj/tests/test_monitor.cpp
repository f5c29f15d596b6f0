#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "sgm/grid.hpp"
#include "sgm/monitor.hpp"
#include "sgm/params.hpp"

#include <cmath>

using namespace sgm;

TEST_CASE("concentration functional on constant data") {
    const ModelParams mp; // r=6, s=1, defaults give delta = 16
    const EstimateConfig ec = make_estimate_config(mp, 1);
    REQUIRE(ec.delta == doctest::Approx(16.0));

    const SpatialGrid g = make_grid_1d(11, 1.0);
    const Field A(g.size(), 2.0); // integral of A^6 over [0,1] is 64

    const double gamma = 2.0;
    const double want = 64.0 / std::pow(2.0, mp.s + 1.0 + ec.delta);
    CHECK(concentration_h(g, A, gamma, mp, ec) == doctest::Approx(want).epsilon(1e-12));

    SUBCASE("field and scalar forms agree") {
        const double integral = mean_power(g, A, mp.r) * g.measure();
        CHECK(concentration_h(g, A, gamma, mp, ec) ==
              doctest::Approx(concentration_h(integral, gamma, mp, ec)).epsilon(1e-12));
    }
    SUBCASE("dead activator keeps the monitor at zero even for tiny gamma") {
        const Field zero(g.size(), 0.0);
        const double h = concentration_h(g, zero, 1e-300, mp, ec);
        CHECK(h == 0.0);
        CHECK(std::isfinite(h));
    }
}

TEST_CASE("interpolation functional reference values") {
    const ModelParams mp;
    const EstimateConfig ec = make_estimate_config(mp, 1);
    // kappa = 1/6, theta = 1/12, so kappa/(1-theta) = 2/11
    CHECK(interpolation_v(0.0, ec) == 0.0);
    CHECK(interpolation_v(1.0, ec) == doctest::Approx(2.0).epsilon(1e-14));
    const double h = std::pow(2.0, 11.0);
    const double want = 4.0 + std::pow(2.0, 11.0 / 6.0);
    CHECK(interpolation_v(h, ec) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("ratio functional") {
    const SpatialGrid g = make_grid_1d(9, 2.0);
    const Field A(g.size(), 3.0);
    // integral of A^2 over a domain of measure 2 is 18
    CHECK(ratio_functional(g, A, 2.0, 2.0, 0.0) == doctest::Approx(18.0).epsilon(1e-13));
    CHECK(ratio_functional(g, A, 2.0, 2.0, 3.0) == doctest::Approx(18.0 / 8.0).epsilon(1e-13));

    const Field zero(g.size(), 0.0);
    CHECK(ratio_functional(g, zero, 1e-300, 2.0, 5.0) == 0.0);
}

TEST_CASE("integrated concentration bound") {
    const ModelParams mp;
    const EstimateConfig ec = make_estimate_config(mp, 1); // delta = 16

    SUBCASE("all three contributions for delta above 3") {
        const double t = 2.0, K = 1.0, gamma0 = 1.0, sup_ito = 0.25;
        const double want = mp.tau / (ec.delta * std::pow(gamma0, ec.delta)) +
                            0.5 * (ec.delta - 3.0) * t *
                                std::exp(1.5 * ec.delta + ec.delta * K) /
                                std::pow(gamma0, ec.delta) +
                            std::sqrt(mp.eta) * sup_ito;
        CHECK(integrated_h_bound(t, sup_ito, gamma0, K, mp, ec) ==
              doctest::Approx(want).epsilon(1e-12));
    }
    SUBCASE("the drift term clamps at zero for delta below 3") {
        ModelParams small;
        small.p = 2.0;
        small.r = 1.0;
        small.q = 2.5;
        small.s = 0.0; // kappa = 1, delta = 1.5
        const EstimateConfig ecs = make_estimate_config(small, 1);
        REQUIRE(ecs.delta == doctest::Approx(1.5));
        const double got = integrated_h_bound(3.0, 0.125, 2.0, 1.0, small, ecs);
        const double want = small.tau / (ecs.delta * std::pow(2.0, ecs.delta)) + 0.125;
        CHECK(got == doctest::Approx(want).epsilon(1e-12));
    }
    SUBCASE("bound grows with the barrier level") {
        CHECK(integrated_h_bound(1.0, 0.0, 1.0, 2.0, mp, ec) >
              integrated_h_bound(1.0, 0.0, 1.0, 1.0, mp, ec));
    }
}
