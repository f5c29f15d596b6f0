#pragma once

#include "sgm/brownian.hpp"
#include "sgm/grid.hpp"
#include "sgm/params.hpp"
#include "sgm/robin.hpp"

#include <cstddef>
#include <vector>

namespace sgm {

// Nodewise reaction A^p / (gamma^q + b).
void reaction_term(const Field& A, double gamma, const ModelParams& mp, Field& out);
Field reaction_term(const Field& A, double gamma, const ModelParams& mp);

// First-order splitting update  A' = S(dt) (A + dt * A^p/(gamma^q + b)),
// with gamma already advanced to the end of the step.  Throws BlowUpError
// when sup A' reaches blow_up_threshold (or turns non-finite) and
// PositivityError on entries below -1e-12; roundoff-scale negatives are
// zeroed in the result.
Field imex_step(const SemigroupPlan& plan, const Field& A, double gamma_new,
                const ModelParams& mp, double blow_up_threshold);

// Same update with the adaptive semigroup (test/reference use).
Field imex_step(const RobinOperator& op, const Field& A, double gamma_new, double dt,
                const ModelParams& mp, double blow_up_threshold);

// Literal mild update on a uniform time grid: with sources g_j frozen at
// t_j = j dt for j < k, returns  S(t_k) A0 + dt * sum_{j<k} S(t_k - t_j) g_j.
Field mild_convolution(const RobinOperator& op, const Field& A0,
                       const std::vector<Field>& sources, double dt, std::size_t k);

// Fixed-point window for data (A0, gamma0) under a barrier level K on |B|:
//   L     = safety * (2 + sup A0 + e^K gamma0)
//   T1    = b * L^{-p}
//   T2    = exp(-3s/2 - K s - 2K) * L^{-p}
//   T_hat = min(T1, T2)
struct PicardWindow {
    double L = 0.0;
    double T1 = 0.0;
    double T2 = 0.0;
    double T_hat = 0.0;
};

PicardWindow picard_window(const ModelParams& mp, double sup_A0, double gamma0,
                           double K, double safety = 1.01);

struct PicardOptions {
    double window = 0.0;          // time window before barrier truncation
    double barrier_K = 0.0;       // truncate at the first node with |B| >= K
    std::size_t history_nodes = 64;
    double tol = 5e-5;
    int max_iterations = 40;
};

struct PicardResult {
    std::vector<double> t;         // history grid actually used
    std::vector<double> B;         // Brownian samples on that grid
    std::vector<Field> A;          // activator iterate at the grid nodes
    std::vector<double> gamma;     // inhibitor iterate at the grid nodes
    std::vector<double> distances; // sup distance between successive iterates
    std::vector<double> ratios;    // distances[i+1] / distances[i]
    int iterations = 0;
    bool converged = false;
    bool truncated_at_barrier = false;
};

// Successive-substitution solve of the coupled mild system on
// [0, min(window, first |B| >= K)] discretized with history_nodes nodes.
// The activator map iterates the frozen reaction through S(dt) with a
// left-rectangle source; the inhibitor map sums the stochastic-exponential
// kernel exp(-3(t_k - t_j)/2 + B_k - B_j) against the frozen source
// (int A^r dx) / gamma^s.  Requires tau == eta == 1.  Throws
// NonContractionError when successive distances fail to decay (or are
// non-finite) three times in a row.
PicardResult picard_solve(const RobinOperator& op, const ModelParams& mp, const Field& A0,
                          double gamma0, const BrownianPath& path, const PicardOptions& opt);

} // namespace sgm
