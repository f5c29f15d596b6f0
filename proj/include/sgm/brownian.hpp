#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace sgm {

// Counter-based N(0,1) stream: draw i is a pure function of (key, i).  Any
// sample can be regenerated without replaying the stream, trajectories get
// disjoint streams from their index, and results do not depend on how work
// is split across threads.
class NormalStream {
public:
    static NormalStream for_trajectory(std::uint64_t master_seed, std::uint64_t trajectory);

    // Independent stream for an auxiliary purpose (e.g. bridge refinement).
    static NormalStream derived(std::uint64_t base_key, std::uint64_t purpose);

    double normal(std::uint64_t counter) const;
    std::uint64_t key() const { return key_; }

private:
    explicit NormalStream(std::uint64_t key) : key_(key) {}
    std::uint64_t key_ = 0;
};

// Brownian path sampled on a uniform grid over [0, horizon], with the
// running sup of |B| carried along (running_sup[i] >= |values[i]| always,
// and refinement can only increase it).
struct BrownianPath {
    double dt = 0.0;
    std::vector<double> times;
    std::vector<double> values;       // values[0] == 0
    std::vector<double> running_sup;  // running_sup[i] = max_{j<=i} |values[j]|
    std::uint64_t key = 0;            // stream key the increments were drawn from
    int level = 0;                    // bridge refinements applied so far

    std::size_t steps() const { return values.empty() ? 0 : values.size() - 1; }
    double horizon() const { return times.empty() ? 0.0 : times.back(); }
    double increment(std::size_t i) const { return values[i + 1] - values[i]; }

    // Piecewise-linear interpolation between grid samples; t is clamped to
    // [0, horizon].
    double value_at(double t) const;
};

BrownianPath generate_path(std::uint64_t master_seed, std::uint64_t trajectory,
                           double horizon, std::size_t steps);

// Conditional refinement inserting factor-1 equispaced samples per interval
// via sequential Brownian-bridge draws.  Kept samples are bit-identical to
// the input; inserted draws come from a stream derived from the path key and
// the new refinement level, so refining is reproducible.
BrownianPath refine_path(const BrownianPath& path, int factor);

struct FirstPassage {
    bool hit = false;       // explicit no-passage state; time/index valid only when hit
    double time = 0.0;
    std::size_t index = 0;
};

// First grid time with running_sup >= level.
FirstPassage first_passage(const BrownianPath& path, double level);

// Monte Carlo estimate of P(sup_{[0,horizon]} |B| >= level) from grid paths,
// optionally bridge-refined (factor 2 each round) to reduce the bias of
// discrete monitoring.
double estimate_exceedance_probability(std::uint64_t master_seed, std::size_t paths,
                                       double horizon, std::size_t steps, double level,
                                       int refinements = 0);

} // namespace sgm
