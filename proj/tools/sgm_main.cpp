// Command-line front end.  Subcommands:
//
//   simulate       one trajectory, full per-step CSV
//   ensemble       many trajectories, aggregate report
//   verify-bounds  ensemble plus a strict gate on every monitored bound
//   picard-check   fixed-point contraction check on the configured data
//   convergence    strong-order study over dt halvings
//   validate       parse the configuration and report regime diagnostics
//
// Exit codes: 0 success, 2 a monitored bound was violated, 3 blow-up in a
// regime where the exponents predict global existence, 4 configuration error.

#include "CLI11.hpp"

#include "sgm/activator.hpp"
#include "sgm/brownian.hpp"
#include "sgm/config.hpp"
#include "sgm/errors.hpp"
#include "sgm/harness.hpp"
#include "sgm/params.hpp"
#include "sgm/robin.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace {

using namespace sgm;

constexpr int kExitViolation = 2;
constexpr int kExitBlowUpInGlobalRegime = 3;
constexpr int kExitConfigError = 4;

// Options every subcommand shares.  A CLI flag wins over the file key; the
// option pointers let us tell "given on the command line" from "default".
struct CommonOpts {
    std::string config_path;
    std::uint64_t seed = 0;
    std::size_t paths = 0;
    double dt = 0.0;
    double horizon = 0.0;
    int workers = 0;
    std::size_t stride = 0;
    double barrier = 0.0;
    std::string scheme;
    std::string out;

    CLI::Option* seed_opt = nullptr;
    CLI::Option* paths_opt = nullptr;
    CLI::Option* dt_opt = nullptr;
    CLI::Option* horizon_opt = nullptr;
    CLI::Option* workers_opt = nullptr;
    CLI::Option* stride_opt = nullptr;
    CLI::Option* barrier_opt = nullptr;
    CLI::Option* scheme_opt = nullptr;
    CLI::Option* out_opt = nullptr;

    // Registered once on the parent app; subcommands fall through to it, so
    // a single option pointer per flag answers "was this given".
    void attach(CLI::App& app) {
        app.add_option("-c,--config", config_path, "configuration file (INI sections)");
        seed_opt = app.add_option("--seed", seed, "override master_seed");
        paths_opt = app.add_option("--paths", paths, "override the trajectory count");
        dt_opt = app.add_option("--dt", dt, "override the time step");
        horizon_opt = app.add_option("--horizon", horizon, "override the final time");
        workers_opt = app.add_option("--workers", workers, "override the worker count");
        stride_opt = app.add_option("--record-stride", stride, "override the CSV stride");
        barrier_opt = app.add_option("--barrier", barrier, "override the |B| barrier level");
        scheme_opt = app.add_option("--scheme", scheme,
                                    "override the inhibitor scheme (em|transform|ode)");
        out_opt = app.add_option("-o,--out", out, "override the output directory");
    }

    FileConfig load() const {
        FileConfig cfg =
            config_path.empty() ? parse_config_text("") : load_config(config_path);
        RunSpec& spec = cfg.spec;
        if (*seed_opt)
            spec.master_seed = seed;
        if (*paths_opt)
            spec.paths = paths;
        if (*dt_opt)
            spec.dt = dt;
        if (*horizon_opt)
            spec.horizon = horizon;
        if (*workers_opt)
            spec.workers = workers;
        if (*stride_opt)
            spec.record_stride = stride;
        if (*barrier_opt)
            spec.barrier_K = barrier;
        if (*scheme_opt) {
            if (scheme == "em")
                spec.scheme = Scheme::em;
            else if (scheme == "transform")
                spec.scheme = Scheme::transform;
            else if (scheme == "ode")
                spec.scheme = Scheme::ode;
            else
                throw ConfigError("unknown scheme '" + scheme + "'");
        }
        if (*out_opt)
            spec.output_dir = out;
        validate_spec(spec);
        return cfg;
    }
};

std::filesystem::path ensure_output_dir(const RunSpec& spec) {
    std::filesystem::path dir(spec.output_dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::string trajectory_filename(std::uint64_t index) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "trajectory_%06" PRIu64 ".csv", index);
    return buf;
}

void write_file(const std::filesystem::path& path,
                const std::function<void(std::ostream&)>& body) {
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("cannot write " + path.string());
    body(os);
}

const char* status_name(TrajectoryStatus st) {
    switch (st) {
    case TrajectoryStatus::completed: return "completed";
    case TrajectoryStatus::stopped_at_barrier: return "stopped_at_barrier";
    case TrajectoryStatus::blew_up: return "blew_up";
    case TrajectoryStatus::positivity_failed: return "positivity_failed";
    }
    return "unknown";
}

int cmd_simulate(const CommonOpts& opts, std::uint64_t index) {
    const FileConfig cfg = opts.load();
    const RunSpec& spec = cfg.spec;
    const TrajectoryRecord rec = run_trajectory(spec, index, true);

    const auto dir = ensure_output_dir(spec);
    const auto csv = dir / trajectory_filename(index);
    write_file(csv, [&](std::ostream& os) { write_csv(rec, os); });

    std::printf("trajectory=%" PRIu64 "\n", index);
    std::printf("status=%s\n", status_name(rec.status));
    std::printf("stop_time=%.12g\n", rec.stop_time);
    std::printf("dt_used=%.12g\n", rec.dt_used);
    std::printf("b_star_end=%.12g\n", rec.b_star_end);
    std::printf("final_gamma=%.12g\n", rec.final_gamma);
    std::printf("final_sup_A=%.12g\n", rec.final_sup_A);
    std::printf("lower_bound_violations=%zu\n", rec.lb_violations);
    std::printf("csv=%s\n", csv.string().c_str());

    const RegimeCheck regime = check_global_regime(spec.model, spec.grid.dim);
    if (rec.status == TrajectoryStatus::blew_up && regime.global)
        return kExitBlowUpInGlobalRegime;
    if (rec.lb_asserted && rec.lb_violations > 0)
        return kExitViolation;
    return 0;
}

int cmd_ensemble(const CommonOpts& opts, std::size_t dump_csv) {
    const FileConfig cfg = opts.load();
    const RunSpec& spec = cfg.spec;
    const EnsembleReport rep = run_ensemble(spec);

    const auto dir = ensure_output_dir(spec);
    write_file(dir / "summary.txt",
               [&](std::ostream& os) { write_report_text(rep, spec, os); });
    write_file(dir / "report.json",
               [&](std::ostream& os) { write_report_json(rep, spec, os); });
    for (std::size_t i = 0; i < std::min(dump_csv, rep.n_paths); ++i) {
        const TrajectoryRecord rec = run_trajectory(spec, i, true);
        write_file(dir / trajectory_filename(i),
                   [&](std::ostream& os) { write_csv(rec, os); });
    }

    write_report_text(rep, spec, std::cout);
    std::printf("summary=%s\n", (dir / "summary.txt").string().c_str());
    std::printf("report=%s\n", (dir / "report.json").string().c_str());

    if (rep.blew_up > 0 && rep.regime_global)
        return kExitBlowUpInGlobalRegime;
    if (rep.lb_violating_paths > 0 || rep.margin_violating_paths > 0)
        return kExitViolation;
    return 0;
}

int cmd_verify_bounds(const CommonOpts& opts) {
    const FileConfig cfg = opts.load();
    const RunSpec& spec = cfg.spec;
    const EnsembleReport rep = run_ensemble(spec);

    const auto dir = ensure_output_dir(spec);
    write_file(dir / "summary.txt",
               [&](std::ostream& os) { write_report_text(rep, spec, os); });
    write_file(dir / "report.json",
               [&](std::ostream& os) { write_report_json(rep, spec, os); });

    const bool lb_ok = rep.lb_violating_paths == 0;
    const bool margin_ok = rep.margin_violating_paths == 0;
    const bool finite_ok = rep.monitors_nonfinite == 0 && rep.positivity_failed == 0;
    std::printf("pathwise_lower_bound: %s (%zu/%zu paths violating)\n",
                lb_ok ? "ok" : "VIOLATED", rep.lb_violating_paths, rep.asserted_paths);
    std::printf("integrated_bound: %s (%zu/%zu restricted paths violating)\n",
                margin_ok ? "ok" : "VIOLATED", rep.margin_violating_paths,
                rep.restricted_paths);
    std::printf("monitors_finite: %s (%zu nonfinite, %zu positivity failures)\n",
                finite_ok ? "ok" : "VIOLATED", rep.monitors_nonfinite,
                rep.positivity_failed);
    std::printf("blow_ups=%zu regime_global=%s\n", rep.blew_up,
                rep.regime_global ? "true" : "false");

    if (rep.blew_up > 0 && rep.regime_global)
        return kExitBlowUpInGlobalRegime;
    if (!lb_ok || !margin_ok || !finite_ok)
        return kExitViolation;
    return 0;
}

int cmd_picard_check(const CommonOpts& opts) {
    const FileConfig cfg = opts.load();
    const RunSpec& spec = cfg.spec;
    if (!std::isfinite(spec.barrier_K) || spec.barrier_K <= 0.0)
        throw ConfigError("picard-check needs a finite positive run.barrier_K");

    const Field A0 = build_initial_field(spec.grid, spec.initial);
    const PicardWindow window = picard_window(spec.model, sup_norm(A0), spec.gamma0,
                                              spec.barrier_K, cfg.picard_safety);
    PicardOptions popt = cfg.picard;
    popt.window = window.T_hat;
    popt.barrier_K = spec.barrier_K;
    const RobinOperator op(spec.grid, spec.model.epsilon, spec.model.a);

    std::printf("L=%.12g T1=%.12g T2=%.12g T_hat=%.12g\n", window.L, window.T1,
                window.T2, window.T_hat);

    const std::size_t path_steps = std::max<std::size_t>(256, 4 * popt.history_nodes);
    std::size_t failures = 0;
    double worst_ratio = 0.0;
    int max_iterations = 0;
    std::size_t truncated = 0;
    for (std::uint64_t i = 0; i < spec.paths; ++i) {
        const BrownianPath path =
            generate_path(spec.master_seed, i, window.T_hat, path_steps);
        bool ok = true;
        try {
            const PicardResult res = picard_solve(op, spec.model, A0, spec.gamma0,
                                                  path, popt);
            ok = res.converged;
            max_iterations = std::max(max_iterations, res.iterations);
            truncated += res.truncated_at_barrier ? 1 : 0;
            for (std::size_t k = 1; k < res.ratios.size(); ++k) {
                if (res.distances[k] <= popt.tol)
                    continue;
                worst_ratio = std::max(worst_ratio, res.ratios[k]);
                ok = ok && res.ratios[k] <= 0.6;
            }
        } catch (const NonContractionError& e) {
            std::fprintf(stderr, "path %" PRIu64 ": %s\n", i, e.what());
            ok = false;
        }
        failures += ok ? 0 : 1;
    }

    std::printf("paths=%zu failures=%zu truncated=%zu max_iterations=%d "
                "worst_ratio=%.4f\n", static_cast<std::size_t>(spec.paths), failures,
                truncated, max_iterations, worst_ratio);
    return failures == 0 ? 0 : kExitViolation;
}

int cmd_convergence(const CommonOpts& opts, int levels) {
    const FileConfig cfg = opts.load();
    const ConvergenceResult res = convergence_study(cfg.spec, levels);
    std::printf("reference=%s paths_used=%zu paths_excluded=%zu\n",
                res.exact_reference ? "exact" : "finest-level", res.paths_used,
                res.paths_excluded);
    for (std::size_t i = 0; i < res.dts.size(); ++i)
        std::printf("dt=%.10g error=%.6e\n", res.dts[i], res.errors[i]);
    std::printf("slope=%.4f\n", res.slope);
    return 0;
}

int cmd_validate(const CommonOpts& opts) {
    const FileConfig cfg = opts.load();
    const RunSpec& spec = cfg.spec;
    const ModelParams& mp = spec.model;

    std::printf("parameters=valid\n");
    std::printf("exponent_block=%.6g < %.6g\n", (mp.p - 1.0) * (mp.s + 1.0),
                mp.q * mp.r);
    const RegimeCheck regime = check_global_regime(mp, spec.grid.dim);
    std::printf("global_regime=%s margin=%.6g\n", regime.global ? "yes" : "no",
                regime.margin);
    const EstimateConfig ec = make_estimate_config(mp, spec.grid.dim);
    std::printf("kappa=%.6g theta=%.6g delta=%.6g estimates=%s\n", ec.kappa, ec.theta,
                ec.delta, ec.usable() ? "usable" : "not-usable");

    const RobinOperator op(spec.grid, mp.epsilon, mp.a);
    std::printf("cn_positivity_limit=%.6g dt=%.6g\n", op.cn_positivity_limit(), spec.dt);

    if (std::isfinite(spec.barrier_K) && spec.barrier_K > 0.0) {
        const Field A0 = build_initial_field(spec.grid, spec.initial);
        const PicardWindow w = picard_window(mp, sup_norm(A0), spec.gamma0,
                                             spec.barrier_K, cfg.picard_safety);
        std::printf("picard_window=%.6g (L=%.6g)\n", w.T_hat, w.L);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"stochastic shadow Gierer-Meinhardt activator/inhibitor simulator"};
    app.require_subcommand(1);

    CommonOpts opts;
    opts.attach(app);
    std::uint64_t sim_index = 0;
    std::size_t dump_csv = 0;
    int levels = 4;

    CLI::App* simulate = app.add_subcommand("simulate", "run one trajectory, write CSV");
    simulate->add_option("--index", sim_index, "trajectory index within the ensemble");

    CLI::App* ensemble = app.add_subcommand("ensemble", "run many trajectories, report");
    ensemble->add_option("--csv", dump_csv, "also write CSVs for the first N trajectories");

    CLI::App* verify = app.add_subcommand("verify-bounds",
                                          "gate on the monitored pathwise bounds");

    CLI::App* picard = app.add_subcommand("picard-check",
                                          "fixed-point contraction on the configured data");

    CLI::App* convergence = app.add_subcommand("convergence", "strong-order study");
    convergence->add_option("--levels", levels, "number of dt levels (halvings + 1)");

    CLI::App* validate = app.add_subcommand("validate", "check the configuration only");

    for (CLI::App* sub : {simulate, ensemble, verify, picard, convergence, validate})
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfigError;
    }

    try {
        if (simulate->parsed())
            return cmd_simulate(opts, sim_index);
        if (ensemble->parsed())
            return cmd_ensemble(opts, dump_csv);
        if (verify->parsed())
            return cmd_verify_bounds(opts);
        if (picard->parsed())
            return cmd_picard_check(opts);
        if (convergence->parsed())
            return cmd_convergence(opts, levels);
        if (validate->parsed())
            return cmd_validate(opts);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return kExitConfigError;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
