#pragma once

#include "sgm/params.hpp"

namespace sgm {

// Single steps of the inhibitor equation
//
//   tau dgamma = (-gamma + mean_r / gamma^s) dt + sqrt(eta) gamma dB
//
// where mean_r >= 0 is the spatial mean of A^r, frozen over the step.

// Euler-Maruyama.  Works for any admissible (tau, eta); throws
// PositivityError when the update leaves the positive cone (large negative
// dB can do this), in which case the caller should retry at a smaller step.
double em_step(double gamma, double mean_r, double dt, double dB, const ModelParams& mp);

// Exact-exponential step in the transformed variable Y = gamma^{s+1}, which
// satisfies  dY = [ (s+1)(s-2)/2 ] Y dt + (s+1) Y dB + (s+1) mean_r dt  for
// the normalized model (requires tau == 1 and eta == 1).  The homogeneous
// stochastic exponential exp(-3(s+1)t/2 + (s+1)B) is applied exactly along
// the linearly interpolated increment and the source term integrated by
// midpoint quadrature, so gamma stays positive unconditionally and the
// pathwise floor gamma(t) >= gamma0 exp(-3t/2 + B_t) holds up to roundoff.
double transform_step(double gamma, double mean_r, double dt, double dB, const ModelParams& mp);

// Classical RK4 step of the noise-free equation (requires eta == 0).
double ode_step(double gamma, double mean_r, double dt, const ModelParams& mp);

// Pathwise floors for the normalized model (tau = eta = 1):
double gamma_floor(double t, double B_t, double gamma0);        // gamma0 e^{-3t/2 + B_t}
double gamma_floor_sup(double t, double B_star, double gamma0); // gamma0 e^{-3t/2 - B*_t}

// Literal general-parameter floor
//   (eta/tau)^{1/(s+1)} gamma0 exp(-3t/(2 eta) - B*_t/sqrt(eta)),
// reported alongside runs with tau != 1 or eta != 1 but not asserted.
double gamma_floor_general(double t, double B_star, double gamma0, const ModelParams& mp);

} // namespace sgm
