#include "sgm/brownian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sgm {
namespace {

// SplitMix64 finalizer; full-avalanche mixing of a 64-bit word.
std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

void finish_path(BrownianPath& p, double horizon) {
    const std::size_t n = p.values.size();
    p.times.resize(n);
    p.running_sup.resize(n);
    double sup = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        p.times[i] = (i + 1 == n) ? horizon : static_cast<double>(i) * p.dt;
        sup = std::max(sup, std::abs(p.values[i]));
        p.running_sup[i] = sup;
    }
}

} // namespace

NormalStream NormalStream::for_trajectory(std::uint64_t master_seed, std::uint64_t trajectory) {
    const std::uint64_t k = mix64(mix64(master_seed) ^ (trajectory + 0x632BE59BD9B4E019ull));
    return NormalStream(mix64(k));
}

NormalStream NormalStream::derived(std::uint64_t base_key, std::uint64_t purpose) {
    return NormalStream(mix64(mix64(base_key ^ 0xD1B54A32D192ED03ull) + purpose));
}

double NormalStream::normal(std::uint64_t counter) const {
    const std::uint64_t ua = mix64(key_ ^ mix64(2 * counter + 1));
    const std::uint64_t ub = mix64(key_ ^ mix64(2 * counter + 2));
    const double u1 = (static_cast<double>(ua >> 11) + 1.0) * 0x1p-53; // (0,1]
    const double u2 = static_cast<double>(ub >> 11) * 0x1p-53;        // [0,1)
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double BrownianPath::value_at(double t) const {
    if (values.empty()) throw std::logic_error("empty path");
    if (t <= 0.0) return values.front();
    if (t >= horizon()) return values.back();
    const std::size_t i = std::min(static_cast<std::size_t>(t / dt), steps() - 1);
    const double frac = (t - times[i]) / dt;
    return values[i] + frac * (values[i + 1] - values[i]);
}

BrownianPath generate_path(std::uint64_t master_seed, std::uint64_t trajectory,
                           double horizon, std::size_t steps) {
    if (!(horizon > 0.0)) throw std::invalid_argument("path horizon must be > 0");
    if (steps == 0) throw std::invalid_argument("path needs at least one step");
    const NormalStream stream = NormalStream::for_trajectory(master_seed, trajectory);
    BrownianPath p;
    p.dt = horizon / static_cast<double>(steps);
    p.key = stream.key();
    p.level = 0;
    p.values.resize(steps + 1);
    p.values[0] = 0.0;
    const double sq = std::sqrt(p.dt);
    for (std::size_t i = 0; i < steps; ++i)
        p.values[i + 1] = p.values[i] + sq * stream.normal(i);
    finish_path(p, horizon);
    return p;
}

BrownianPath refine_path(const BrownianPath& path, int factor) {
    if (factor < 2) throw std::invalid_argument("refinement factor must be >= 2");
    if (path.steps() == 0) throw std::invalid_argument("cannot refine an empty path");
    BrownianPath out;
    out.dt = path.dt / factor;
    out.key = path.key;
    out.level = path.level + 1;
    const std::size_t n = path.steps();
    out.values.resize(n * factor + 1);
    const NormalStream bridge =
        NormalStream::derived(path.key, 0xB51D6E50ull + static_cast<std::uint64_t>(out.level));
    for (std::size_t i = 0; i < n; ++i) {
        double cur = path.values[i];
        const double end = path.values[i + 1];
        out.values[i * factor] = cur;
        for (int k = 1; k < factor; ++k) {
            // Bridge from the current sample to the coarse endpoint.
            const double t_rem = path.dt - (k - 1) * out.dt;
            const double mean = cur + (out.dt / t_rem) * (end - cur);
            const double var = out.dt * (t_rem - out.dt) / t_rem;
            const std::uint64_t counter =
                i * static_cast<std::uint64_t>(factor - 1) + static_cast<std::uint64_t>(k - 1);
            cur = mean + std::sqrt(var) * bridge.normal(counter);
            out.values[i * factor + k] = cur;
        }
    }
    out.values[n * factor] = path.values[n];
    finish_path(out, path.horizon());
    return out;
}

FirstPassage first_passage(const BrownianPath& path, double level) {
    FirstPassage fp;
    for (std::size_t i = 0; i < path.running_sup.size(); ++i) {
        if (path.running_sup[i] >= level) {
            fp.hit = true;
            fp.time = path.times[i];
            fp.index = i;
            return fp;
        }
    }
    return fp;
}

double estimate_exceedance_probability(std::uint64_t master_seed, std::size_t paths,
                                       double horizon, std::size_t steps, double level,
                                       int refinements) {
    if (paths == 0) throw std::invalid_argument("need at least one path");
    std::size_t hits = 0;
    for (std::size_t j = 0; j < paths; ++j) {
        BrownianPath p = generate_path(master_seed, j, horizon, steps);
        for (int r = 0; r < refinements; ++r) p = refine_path(p, 2);
        if (first_passage(p, level).hit) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(paths);
}

} // namespace sgm
