#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "sgm/config.hpp"
#include "sgm/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

using namespace sgm;

TEST_CASE("empty text yields the documented defaults") {
    const FileConfig cfg = parse_config_text("");
    CHECK(cfg.spec.model.p == 2.0);
    CHECK(cfg.spec.model.q == 3.0);
    CHECK(cfg.spec.grid.dim == 1);
    CHECK(cfg.spec.grid.nx == 64);
    CHECK(cfg.spec.dt == 1e-3);
    CHECK(cfg.spec.horizon == 20.0);
    CHECK(cfg.spec.scheme == Scheme::transform);
    CHECK(cfg.spec.mode == RunMode::full);
    CHECK(cfg.spec.paths == 1);
    CHECK(cfg.spec.barrier_K == 3.0);
    CHECK(cfg.spec.gamma0 == 1.0);
    CHECK(cfg.spec.initial.kind == InitialData::Kind::cosine);
    CHECK(cfg.spec.initial.scale == 2.0);
    CHECK(cfg.spec.workers == 1);
    CHECK(cfg.picard.tol == 5e-5);
    CHECK(cfg.picard.history_nodes == 64);
    CHECK(cfg.picard_safety == 1.01);
}

TEST_CASE("a full file reaches every field") {
    const std::string text = R"(
# reference configuration
[model]
p = 2.5
q = 4
r = 5
s = 0
b = 0.75
epsilon = 0.2
tau = 1
eta = 1
a = 0

[grid]
dim = 2
nx = 12
ny = 10
lx = 2.0
ly = 1.5

[stochastic]
master_seed = 12345
paths = 64
barrier_K = 1.25

[integrator]
scheme = em
dt = 0.0025
max_halvings = 6

[picard]
tol = 1e-6
max_iterations = 80
history_nodes = 128
safety_factor = 1.05

[monitor]
alpha = 3
beta = 1
ell = 4
blow_up_threshold = 1e9

[run]
horizon = 5
mode = localized
workers = 3
record_stride = 10
output_dir = results
gamma0 = 0.9
a0 = constant
a0_scale = 1.25
)";
    const FileConfig cfg = parse_config_text(text);
    CHECK(cfg.spec.model.p == 2.5);
    CHECK(cfg.spec.model.q == 4.0);
    CHECK(cfg.spec.model.r == 5.0);
    CHECK(cfg.spec.model.s == 0.0);
    CHECK(cfg.spec.model.b == 0.75);
    CHECK(cfg.spec.model.epsilon == 0.2);
    CHECK(cfg.spec.model.a == 0.0);
    CHECK(cfg.spec.grid.dim == 2);
    CHECK(cfg.spec.grid.nx == 12);
    CHECK(cfg.spec.grid.ny == 10);
    CHECK(cfg.spec.grid.lx == 2.0);
    CHECK(cfg.spec.grid.ly == 1.5);
    CHECK(cfg.spec.master_seed == 12345);
    CHECK(cfg.spec.paths == 64);
    CHECK(cfg.spec.barrier_K == 1.25);
    CHECK(cfg.spec.scheme == Scheme::em);
    CHECK(cfg.spec.dt == 0.0025);
    CHECK(cfg.spec.max_halvings == 6);
    CHECK(cfg.picard.tol == 1e-6);
    CHECK(cfg.picard.max_iterations == 80);
    CHECK(cfg.picard.history_nodes == 128);
    CHECK(cfg.picard_safety == 1.05);
    CHECK(cfg.spec.monitor.alpha == 3.0);
    CHECK(cfg.spec.monitor.beta == 1.0);
    CHECK(cfg.spec.monitor.ell == 4.0);
    CHECK(cfg.spec.monitor.blow_up_threshold == 1e9);
    CHECK(cfg.spec.horizon == 5.0);
    CHECK(cfg.spec.mode == RunMode::localized);
    CHECK(cfg.spec.workers == 3);
    CHECK(cfg.spec.record_stride == 10);
    CHECK(cfg.spec.output_dir == "results");
    CHECK(cfg.spec.gamma0 == 0.9);
    CHECK(cfg.spec.initial.kind == InitialData::Kind::constant);
    CHECK(cfg.spec.initial.scale == 1.25);
}

TEST_CASE("barrier can be switched off by name") {
    const FileConfig cfg = parse_config_text("[stochastic]\nbarrier_K = none\n");
    CHECK(std::isinf(cfg.spec.barrier_K));
}

TEST_CASE("rejections name the offending key") {
    auto message_of = [](const std::string& text) {
        try {
            parse_config_text(text);
        } catch (const ConfigError& e) {
            return std::string(e.what());
        }
        return std::string();
    };

    SUBCASE("unknown section") {
        CHECK(message_of("[turbo]\nx = 1\n").find("[turbo]") != std::string::npos);
    }
    SUBCASE("unknown key") {
        CHECK(message_of("[model]\npp = 2\n").find("model.pp") != std::string::npos);
    }
    SUBCASE("malformed number") {
        CHECK(message_of("[integrator]\ndt = 0.1x\n").find("integrator.dt") != std::string::npos);
    }
    SUBCASE("negative seed") {
        CHECK(message_of("[stochastic]\nmaster_seed = -3\n").find("master_seed") !=
              std::string::npos);
    }
    SUBCASE("bad enum value") {
        CHECK(message_of("[integrator]\nscheme = leapfrog\n").find("leapfrog") !=
              std::string::npos);
    }
    SUBCASE("key outside any section") {
        CHECK_THROWS_AS(parse_config_text("dt = 0.5\n"), ConfigError);
    }
    SUBCASE("unterminated section header") {
        CHECK_THROWS_AS(parse_config_text("[model\np = 2\n"), ConfigError);
    }
    SUBCASE("missing equals sign") {
        CHECK_THROWS_AS(parse_config_text("[model]\njust words\n"), ConfigError);
    }
    SUBCASE("unsupported dimension") {
        CHECK_THROWS_AS(parse_config_text("[grid]\ndim = 3\n"), ConfigError);
    }
    SUBCASE("localized mode without a barrier") {
        CHECK_THROWS_AS(
            parse_config_text("[stochastic]\nbarrier_K = none\n[run]\nmode = localized\n"),
            ConfigError);
    }
    SUBCASE("scheme inconsistent with the noise level") {
        CHECK_THROWS_AS(parse_config_text("[model]\neta = 0.5\n"), ConfigError);
        CHECK_NOTHROW(parse_config_text("[model]\neta = 0.5\n[integrator]\nscheme = em\n"));
    }
}

TEST_CASE("whitespace and comments are tolerated") {
    const std::string text =
        "; leading comment\n"
        "\n"
        "  [model]  \n"
        "   p   =   2.25  \n"
        "# trailing comment\n";
    const FileConfig cfg = parse_config_text(text);
    CHECK(cfg.spec.model.p == 2.25);
}

TEST_CASE("files load through the same path") {
    const std::string path = "test_config_roundtrip.ini";
    {
        std::ofstream out(path);
        out << "[integrator]\ndt = 0.005\n[run]\nhorizon = 1\n";
    }
    const FileConfig cfg = load_config(path);
    CHECK(cfg.spec.dt == 0.005);
    CHECK(cfg.spec.horizon == 1.0);
    std::remove(path.c_str());

    CHECK_THROWS_AS(load_config("does_not_exist.ini"), ConfigError);
}
