#include "sgm/inhibitor.hpp"

#include "sgm/errors.hpp"
#include "sgm/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace sgm {
namespace {

void check_inputs(double gamma, double mean_r, double dt) {
    if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be > 0");
    if (!(mean_r >= 0.0)) throw std::invalid_argument("mean_r must be >= 0");
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
}

} // namespace

double em_step(double gamma, double mean_r, double dt, double dB, const ModelParams& mp) {
    check_inputs(gamma, mean_r, dt);
    const double drift = (-gamma + mean_r * pow_checked(gamma, -mp.s)) / mp.tau;
    const double next = gamma + dt * drift + (std::sqrt(mp.eta) / mp.tau) * gamma * dB;
    if (!(next > 0.0))
        throw PositivityError("Euler-Maruyama step drove gamma nonpositive");
    return next;
}

double transform_step(double gamma, double mean_r, double dt, double dB, const ModelParams& mp) {
    check_inputs(gamma, mean_r, dt);
    if (mp.tau != 1.0 || mp.eta != 1.0)
        throw std::invalid_argument("transform step requires tau == 1 and eta == 1");
    const double sp1 = mp.s + 1.0;
    const double y = pow_checked(gamma, sp1);
    // Source integral int_0^dt Phi(u)^{-1} du with Phi the stochastic
    // exponential along the interpolated increment; 4-point midpoint rule.
    double integ = 0.0;
    if (mean_r > 0.0) {
        constexpr int kQuad = 4;
        for (int k = 0; k < kQuad; ++k) {
            const double u = (k + 0.5) * dt / kQuad;
            integ += std::exp(1.5 * sp1 * u - sp1 * (u / dt) * dB);
        }
        integ *= dt / kQuad;
    }
    const double phi = std::exp(-1.5 * sp1 * dt + sp1 * dB);
    const double y_next = phi * (y + sp1 * mean_r * integ);
    return std::pow(y_next, 1.0 / sp1);
}

double ode_step(double gamma, double mean_r, double dt, const ModelParams& mp) {
    check_inputs(gamma, mean_r, dt);
    if (mp.eta != 0.0)
        throw std::invalid_argument("ode step requires eta == 0");
    auto f = [&](double g) {
        if (!(g > 0.0))
            throw PositivityError("RK4 stage drove gamma nonpositive");
        return (-g + mean_r * pow_checked(g, -mp.s)) / mp.tau;
    };
    const double k1 = f(gamma);
    const double k2 = f(gamma + 0.5 * dt * k1);
    const double k3 = f(gamma + 0.5 * dt * k2);
    const double k4 = f(gamma + dt * k3);
    const double next = gamma + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!(next > 0.0))
        throw PositivityError("RK4 step drove gamma nonpositive");
    return next;
}

double gamma_floor(double t, double B_t, double gamma0) {
    return gamma0 * std::exp(-1.5 * t + B_t);
}

double gamma_floor_sup(double t, double B_star, double gamma0) {
    return gamma0 * std::exp(-1.5 * t - B_star);
}

double gamma_floor_general(double t, double B_star, double gamma0, const ModelParams& mp) {
    if (!(mp.eta > 0.0)) throw std::invalid_argument("general floor requires eta > 0");
    const double prefactor = std::pow(mp.eta / mp.tau, 1.0 / (mp.s + 1.0));
    return prefactor * gamma0 * std::exp(-1.5 * t / mp.eta - B_star / std::sqrt(mp.eta));
}

} // namespace sgm
