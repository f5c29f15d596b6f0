#pragma once

#include "sgm/grid.hpp"
#include "sgm/params.hpp"

namespace sgm {

// Concentration functional  h = (int_D A^r dx) / gamma^{s+1+delta}.
// Defined as 0 when the numerator vanishes, so a dead activator keeps the
// monitor meaningful even if gamma^{-...} overflows.
double concentration_h(const SpatialGrid& g, const Field& A, double gamma,
                       const ModelParams& mp, const EstimateConfig& ec);
double concentration_h(double integral_Ar, double gamma, const ModelParams& mp,
                       const EstimateConfig& ec);

// Interpolation functional  v(h) = h^{kappa/(1-theta)} + h^kappa.
double interpolation_v(double h, const EstimateConfig& ec);

// Ratio functional  (int_D A^alpha dx) / gamma^beta; 0 when the integral is 0.
double ratio_functional(const SpatialGrid& g, const Field& A, double gamma,
                        double alpha, double beta);

// Pathwise bound for int_0^{t_end} h dt on the event {B* < K} in the
// normalized model (tau = eta = 1):
//   tau/(delta gamma0^delta)
//   + max(0, (delta-3)/2 * t_end * exp(3 delta/2 + delta K) / gamma0^delta)
//   + sqrt(eta) * sup_ito,
// where sup_ito is the realized running sup of |sum gamma^{-delta} dB|
// accumulated with left-point evaluation along the simulated path.
double integrated_h_bound(double t_end, double sup_ito, double gamma0, double K,
                          const ModelParams& mp, const EstimateConfig& ec);

} // namespace sgm
