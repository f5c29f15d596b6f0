#include "sgm/config.hpp"

#include "sgm/errors.hpp"

#include <cctype>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

namespace sgm {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b])))
        ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])))
        --e;
    return s.substr(b, e - b);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& v) {
    throw ConfigError("bad value for '" + key + "': '" + v + "'");
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size())
            bad_value(key, v);
        return x;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        bad_value(key, v);
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    if (v.empty() || v[0] == '-' || v[0] == '+')
        bad_value(key, v);
    try {
        std::size_t pos = 0;
        const unsigned long long x = std::stoull(v, &pos);
        if (pos != v.size())
            bad_value(key, v);
        return static_cast<std::uint64_t>(x);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        bad_value(key, v);
    }
}

int parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const int x = std::stoi(v, &pos);
        if (pos != v.size())
            bad_value(key, v);
        return x;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        bad_value(key, v);
    }
}

} // namespace

FileConfig parse_config_text(const std::string& text) {
    FileConfig cfg;
    RunSpec& spec = cfg.spec;

    // Grid keys are staged and the grid built once the whole file is read,
    // so key order inside [grid] does not matter.
    int dim = 1;
    int nx = 64, ny = 64;
    double lx = 1.0, ly = 1.0;

    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';')
            continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) + ": unterminated section header");
            section = trim(t.substr(1, t.size() - 2));
            if (section != "model" && section != "grid" && section != "stochastic" &&
                section != "integrator" && section != "picard" && section != "monitor" &&
                section != "run")
                throw ConfigError("unknown section [" + section + "]");
            continue;
        }
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        if (section.empty())
            throw ConfigError("key '" + key + "' appears before any section header");

        const std::string qualified = section + "." + key;
        if (section == "model") {
            if (key == "p") spec.model.p = parse_double(qualified, value);
            else if (key == "q") spec.model.q = parse_double(qualified, value);
            else if (key == "r") spec.model.r = parse_double(qualified, value);
            else if (key == "s") spec.model.s = parse_double(qualified, value);
            else if (key == "b") spec.model.b = parse_double(qualified, value);
            else if (key == "epsilon") spec.model.epsilon = parse_double(qualified, value);
            else if (key == "tau") spec.model.tau = parse_double(qualified, value);
            else if (key == "eta") spec.model.eta = parse_double(qualified, value);
            else if (key == "a") spec.model.a = parse_double(qualified, value);
            else throw ConfigError("unknown key '" + qualified + "'");
        } else if (section == "grid") {
            if (key == "dim") dim = parse_int(qualified, value);
            else if (key == "nx") nx = parse_int(qualified, value);
            else if (key == "ny") ny = parse_int(qualified, value);
            else if (key == "lx") lx = parse_double(qualified, value);
            else if (key == "ly") ly = parse_double(qualified, value);
            else throw ConfigError("unknown key '" + qualified + "'");
        } else if (section == "stochastic") {
            if (key == "master_seed") spec.master_seed = parse_u64(qualified, value);
            else if (key == "paths") spec.paths = static_cast<std::size_t>(parse_u64(qualified, value));
            else if (key == "barrier_K") {
                if (value == "none")
                    spec.barrier_K = std::numeric_limits<double>::infinity();
                else
                    spec.barrier_K = parse_double(qualified, value);
            }
            else throw ConfigError("unknown key '" + qualified + "'");
        } else if (section == "integrator") {
            if (key == "scheme") {
                if (value == "em") spec.scheme = Scheme::em;
                else if (value == "transform") spec.scheme = Scheme::transform;
                else if (value == "ode") spec.scheme = Scheme::ode;
                else bad_value(qualified, value);
            }
            else if (key == "dt") spec.dt = parse_double(qualified, value);
            else if (key == "max_halvings") spec.max_halvings = parse_int(qualified, value);
            else throw ConfigError("unknown key '" + qualified + "'");
        } else if (section == "picard") {
            if (key == "tol") cfg.picard.tol = parse_double(qualified, value);
            else if (key == "max_iterations") cfg.picard.max_iterations = parse_int(qualified, value);
            else if (key == "history_nodes")
                cfg.picard.history_nodes = static_cast<std::size_t>(parse_u64(qualified, value));
            else if (key == "safety_factor") cfg.picard_safety = parse_double(qualified, value);
            else throw ConfigError("unknown key '" + qualified + "'");
        } else if (section == "monitor") {
            if (key == "alpha") spec.monitor.alpha = parse_double(qualified, value);
            else if (key == "beta") spec.monitor.beta = parse_double(qualified, value);
            else if (key == "ell") spec.monitor.ell = parse_double(qualified, value);
            else if (key == "blow_up_threshold")
                spec.monitor.blow_up_threshold = parse_double(qualified, value);
            else throw ConfigError("unknown key '" + qualified + "'");
        } else { // run
            if (key == "horizon") spec.horizon = parse_double(qualified, value);
            else if (key == "mode") {
                if (value == "full") spec.mode = RunMode::full;
                else if (value == "localized") spec.mode = RunMode::localized;
                else bad_value(qualified, value);
            }
            else if (key == "workers") spec.workers = parse_int(qualified, value);
            else if (key == "record_stride")
                spec.record_stride = static_cast<std::size_t>(parse_u64(qualified, value));
            else if (key == "output_dir") spec.output_dir = value;
            else if (key == "gamma0") spec.gamma0 = parse_double(qualified, value);
            else if (key == "a0") {
                if (value == "zero") spec.initial.kind = InitialData::Kind::zero;
                else if (value == "constant") spec.initial.kind = InitialData::Kind::constant;
                else if (value == "cosine") spec.initial.kind = InitialData::Kind::cosine;
                else bad_value(qualified, value);
            }
            else if (key == "a0_scale") spec.initial.scale = parse_double(qualified, value);
            else throw ConfigError("unknown key '" + qualified + "'");
        }
    }

    if (dim != 1 && dim != 2)
        throw ConfigError("grid.dim must be 1 or 2");
    try {
        spec.grid = (dim == 1) ? make_grid_1d(nx, lx) : make_grid_2d(nx, ny, lx, ly);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("grid: ") + e.what());
    }

    if (cfg.picard.history_nodes < 2)
        throw ConfigError("picard.history_nodes must be at least 2");
    if (!(cfg.picard.tol > 0.0))
        throw ConfigError("picard.tol must be positive");
    if (cfg.picard.max_iterations < 1)
        throw ConfigError("picard.max_iterations must be at least 1");
    if (!(cfg.picard_safety >= 1.0))
        throw ConfigError("picard.safety_factor must be at least 1");

    validate_spec(spec);
    return cfg;
}

FileConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

} // namespace sgm
