#pragma once

#include <string>

namespace sgm {

// Parameters of the coupled activator/inhibitor model
//
//   dA/dt = eps^2 Lap A - A + A^p / (gamma^q + b)      in D x (0,T)
//   tau dgamma = (-gamma + Abar_r / gamma^s) dt + sqrt(eta) gamma dB
//   eps dA/dnu + a A = 0                               on the boundary
//
// where Abar_r(t) is the spatial mean of A^r over D.
struct ModelParams {
    double p = 2.0;       // activator self-enhancement exponent, > 1
    double q = 3.0;       // inhibitor suppression exponent, > 0
    double r = 6.0;       // coupling exponent in the mean source, > 0
    double s = 1.0;       // inhibitor self-suppression exponent, >= 0
    double epsilon = 0.1; // activator diffusion scale, > 0
    double tau = 1.0;     // inhibitor relaxation time, > 0
    double a = 0.5;       // boundary leakage coefficient, >= 0
    double b = 1.0;       // reaction regularization, > 0
    double eta = 1.0;     // noise intensity, >= 0
};

// Checks sign conditions and the exponent-block condition
// (p - 1)(s + 1) < q r.  Returns false and fills `why` (if given) with a
// semicolon-separated list of every violated condition.
bool params_valid(const ModelParams& mp, std::string* why = nullptr);

// Same check, throwing std::invalid_argument with the full violation list.
void validate_params(const ModelParams& mp);

struct RegimeCheck {
    bool global = false; // strict inequality below holds
    double margin = 0.0; // min{2/(dim+2), q/(s+1)} - (p-1)/r
};

// Evaluates the global-existence condition
//   (p - 1)/r < min{ 2/(dim + 2), q/(s + 1) }
// for the spatial dimension of the run.  margin <= 0 means not global.
RegimeCheck check_global_regime(const ModelParams& mp, int dim);

// Exponents of the concentration monitor:
//   kappa = (p - 1)/r, theta = dim * kappa / 2, delta = q/kappa - (s + 1).
struct EstimateConfig {
    double kappa = 0.0;
    double theta = 0.0;
    double delta = 0.0;
    bool usable() const { return delta > 0.0 && theta < 1.0; }
};

EstimateConfig make_estimate_config(const ModelParams& mp, int dim);

} // namespace sgm
