#include "sgm/params.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sgm {

bool params_valid(const ModelParams& mp, std::string* why) {
    std::string bad;
    auto fail = [&bad](const char* msg) {
        if (!bad.empty()) bad += "; ";
        bad += msg;
    };
    if (!(mp.p > 1.0)) fail("p must be > 1");
    if (!(mp.q > 0.0)) fail("q must be > 0");
    if (!(mp.r > 0.0)) fail("r must be > 0");
    if (!(mp.s >= 0.0)) fail("s must be >= 0");
    if (!((mp.p - 1.0) * (mp.s + 1.0) < mp.q * mp.r))
        fail("(p-1)(s+1) < q*r must hold");
    if (!(mp.epsilon > 0.0)) fail("epsilon must be > 0");
    if (!(mp.tau > 0.0)) fail("tau must be > 0");
    if (!(mp.a >= 0.0)) fail("a must be >= 0");
    if (!(mp.b > 0.0)) fail("b must be > 0");
    if (!(mp.eta >= 0.0)) fail("eta must be >= 0");
    if (bad.empty()) return true;
    if (why) *why = bad;
    return false;
}

void validate_params(const ModelParams& mp) {
    std::string why;
    if (!params_valid(mp, &why))
        throw std::invalid_argument("invalid model parameters: " + why);
}

RegimeCheck check_global_regime(const ModelParams& mp, int dim) {
    if (dim != 1 && dim != 2)
        throw std::invalid_argument("dimension must be 1 or 2");
    const double lhs = (mp.p - 1.0) / mp.r;
    const double cap = std::min(2.0 / (dim + 2.0), mp.q / (mp.s + 1.0));
    RegimeCheck rc;
    rc.margin = cap - lhs;
    rc.global = rc.margin > 0.0;
    return rc;
}

EstimateConfig make_estimate_config(const ModelParams& mp, int dim) {
    if (dim != 1 && dim != 2)
        throw std::invalid_argument("dimension must be 1 or 2");
    EstimateConfig ec;
    ec.kappa = (mp.p - 1.0) / mp.r;
    ec.theta = dim * ec.kappa / 2.0;
    ec.delta = mp.q / ec.kappa - (mp.s + 1.0);
    return ec;
}

} // namespace sgm
