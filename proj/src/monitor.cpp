#include "sgm/monitor.hpp"

#include <cmath>
#include <stdexcept>

namespace sgm {

double concentration_h(double integral_Ar, double gamma, const ModelParams& mp,
                       const EstimateConfig& ec) {
    if (!(ec.delta > 0.0)) throw std::invalid_argument("delta must be > 0");
    if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be > 0");
    if (integral_Ar == 0.0) return 0.0;
    // Evaluated in log space: a deep excursion of gamma can push the power
    // alone past the double range even when the product with a decayed
    // numerator is still representable.
    return std::exp(std::log(integral_Ar) -
                    (mp.s + 1.0 + ec.delta) * std::log(gamma));
}

double concentration_h(const SpatialGrid& g, const Field& A, double gamma,
                       const ModelParams& mp, const EstimateConfig& ec) {
    const double integral = mean_power(g, A, mp.r) * g.measure();
    return concentration_h(integral, gamma, mp, ec);
}

double interpolation_v(double h, const EstimateConfig& ec) {
    if (!ec.usable())
        throw std::invalid_argument("estimate exponents need delta > 0 and theta < 1");
    if (!(h >= 0.0)) throw std::invalid_argument("h must be >= 0");
    return pow_checked(h, ec.kappa / (1.0 - ec.theta)) + pow_checked(h, ec.kappa);
}

double ratio_functional(const SpatialGrid& g, const Field& A, double gamma,
                        double alpha, double beta) {
    if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be > 0");
    const double integral = mean_power(g, A, alpha) * g.measure();
    if (integral == 0.0) return 0.0;
    return integral * pow_checked(gamma, -beta);
}

double integrated_h_bound(double t_end, double sup_ito, double gamma0, double K,
                          const ModelParams& mp, const EstimateConfig& ec) {
    if (!(ec.delta > 0.0)) throw std::invalid_argument("delta must be > 0");
    if (!(gamma0 > 0.0)) throw std::invalid_argument("gamma0 must be > 0");
    if (!(t_end >= 0.0)) throw std::invalid_argument("t_end must be >= 0");
    const double g0d = pow_checked(gamma0, -ec.delta);
    const double first = mp.tau / ec.delta * g0d;
    const double middle = std::max(
        0.0, 0.5 * (ec.delta - 3.0) * t_end *
                 std::exp(1.5 * ec.delta + ec.delta * K) * g0d);
    return first + middle + std::sqrt(mp.eta) * sup_ito;
}

} // namespace sgm
