#pragma once

#include "sgm/brownian.hpp"
#include "sgm/grid.hpp"
#include "sgm/params.hpp"
#include "sgm/robin.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace sgm {

enum class Scheme { em, transform, ode };
enum class RunMode { full, localized };
enum class TrajectoryStatus { completed, stopped_at_barrier, blew_up, positivity_failed };

const char* to_string(Scheme s);
const char* to_string(RunMode m);
const char* to_string(TrajectoryStatus st);

// Initial activator profiles.  "cosine" is the bump
// (scale/2) (1 + cos(pi x / lx)) (tensorized and rescaled to the same sup in
// 2D); "constant" is scale everywhere; "zero" decouples the system.
struct InitialData {
    enum class Kind { zero, constant, cosine };
    Kind kind = Kind::cosine;
    double scale = 2.0; // sup of the initial field
};

Field build_initial_field(const SpatialGrid& g, const InitialData& id);

struct MonitorConfig {
    double alpha = 2.0;            // ratio functional exponents (alpha > 1, beta >= 0)
    double beta = 0.0;
    double ell = 2.0;              // L^ell norm for the composite source reports
    double blow_up_threshold = 1e6;
};

struct RunSpec {
    ModelParams model;
    SpatialGrid grid;
    double horizon = 20.0;
    double dt = 1e-3;
    Scheme scheme = Scheme::transform;
    std::size_t paths = 1;
    std::uint64_t master_seed = 1;
    double barrier_K = 3.0; // +infinity means "no barrier"
    RunMode mode = RunMode::full;
    InitialData initial;
    double gamma0 = 1.0;
    MonitorConfig monitor;
    int workers = 1;
    std::size_t record_stride = 1;
    std::string output_dir = "out";
    int max_halvings = 10;
    bool reaction_enabled = true; // test hook: false drops A^p/(gamma^q+b)
};

// Throws ConfigError listing the first violated consistency condition.
void validate_spec(const RunSpec& spec);

// One monitored output row.  Column order of the CSV writer matches the
// field order here.
struct StepRow {
    double t = 0.0;
    double gamma = 0.0;
    double mean_r = 0.0;              // spatial mean of A^r
    double sup_A = 0.0;
    double h_delta = 0.0;             // concentration functional
    double h_delta_integral = 0.0;    // running time integral of h_delta
    double h_alpha_beta = 0.0;        // configured ratio functional
    double v = 0.0;                   // interpolation functional of h_delta
    double lb_margin = 0.0;           // gamma minus its pathwise floor
    double integrated_bound_margin = 0.0; // bound minus running h integral
};

struct TrajectoryRecord {
    std::uint64_t index = 0;
    TrajectoryStatus status = TrajectoryStatus::completed;
    double stop_time = 0.0;  // last time reached (T, tau_K, or failure time)
    double dt_used = 0.0;
    int halvings = 0;        // dt halvings spent recovering from positivity failures
    double b_star_end = 0.0; // running sup of |B| at stop_time
    bool restricted = false; // b_star_end < barrier K
    double final_gamma = 0.0;
    double final_sup_A = 0.0;

    // Boundedness report over recorded times.
    double max_h_alpha_beta = 0.0; // empirical C(T) for the configured pair
    double max_g1_ell = 0.0;       // max_t || A^p/(gamma^q+b) ||_{L^ell}
    double max_g2_ell = 0.0;       // max_t || A^r/gamma^s ||_{L^ell}
    bool monitors_finite = true;

    // Floor and integrated-bound accounting.
    bool lb_asserted = false;      // true for the transform scheme (tau=eta=1)
    double min_lb_margin = 0.0;
    std::size_t lb_violations = 0; // steps with margin < -1e-9 (asserted runs)
    double h_delta_integral_end = 0.0;
    double sup_ito = 0.0;          // running sup | sum gamma^{-delta} dB |
    double integrated_bound_margin = 0.0;
    bool estimates_active = false; // delta > 0 and theta < 1 for this model

    std::vector<StepRow> rows;     // strided; first and final state included
};

struct StepContext {
    double t = 0.0;
    std::uint64_t trajectory = 0;
};

// One splitting step: (i) mean of A^r from the current activator,
// (ii) inhibitor SDE step with that source frozen, (iii) activator update
// with the new gamma frozen.  Exceptions from the substeps are re-raised
// with the trajectory index and time attached.
void coupled_step(Field& A, double& gamma, double dB, double dt, const SemigroupPlan& plan,
                  const RunSpec& spec, const StepContext& ctx);

// Runs trajectory `index` of the ensemble defined by spec.  Blow-up is
// recorded in the returned status; a positivity failure restarts the
// trajectory at half the step on the bridge-refined path, up to
// max_halvings times, before it is recorded as failed.
TrajectoryRecord run_trajectory(const RunSpec& spec, std::uint64_t index,
                                bool keep_rows = true);

struct EnsembleReport {
    std::size_t n_paths = 0;
    std::size_t completed = 0;
    std::size_t stopped_at_barrier = 0;
    std::size_t blew_up = 0;
    std::size_t positivity_failed = 0;

    double fraction_bstar_exceeds = 0.0; // B* at stop time >= K
    std::size_t asserted_paths = 0;
    std::size_t lb_violating_paths = 0;
    double fraction_lb_violating = 0.0;  // over asserted paths
    std::size_t restricted_paths = 0;    // B* at stop time < K
    std::size_t margin_violating_paths = 0;
    double fraction_margin_violating = 0.0; // over restricted paths

    std::size_t monitors_nonfinite = 0;
    double ct_min = 0.0, ct_median = 0.0, ct_max = 0.0; // empirical C(T) stats
    double max_g1_ell = 0.0, max_g2_ell = 0.0;

    bool regime_global = false;
    double regime_margin = 0.0;

    std::vector<TrajectoryRecord> trajectories; // rows omitted
};

EnsembleReport run_ensemble(const RunSpec& spec);

struct ConvergenceResult {
    std::vector<double> dts;    // level step sizes, coarse to fine
    std::vector<double> errors; // mean |gamma_level(T) - gamma_ref(T)|
    double slope = 0.0;         // least-squares slope of log2 error vs log2 dt
    bool exact_reference = false;
    std::size_t paths_used = 0;
    std::size_t paths_excluded = 0;
};

// Strong-order study on bridge-refined common paths: spec.dt is the coarsest
// level, halved levels-1 times.  With zero initial activator in the
// normalized model the closed-form gamma0 exp(-3T/2 + B_T) serves as the
// reference (and all levels enter the fit); otherwise the finest level does.
ConvergenceResult convergence_study(const RunSpec& spec, int levels);

// Writers.  Non-finite values appear as "n/a" in text outputs and null in
// the structured report; no numeric infinities are serialized.
void write_csv(const TrajectoryRecord& rec, std::ostream& os);
void write_report_text(const EnsembleReport& rep, const RunSpec& spec, std::ostream& os);
void write_report_json(const EnsembleReport& rep, const RunSpec& spec, std::ostream& os);

} // namespace sgm
