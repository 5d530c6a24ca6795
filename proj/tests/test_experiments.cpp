#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "kaclab/dsmc.hpp"
#include "kaclab/experiments.hpp"
#include "kaclab/inequality.hpp"

using namespace kaclab;

namespace {

std::string key_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const ConfigError& e) {
        return e.key();
    }
    return "<no error>";
}

} // namespace

TEST_CASE("hermite term parsing pads missing degrees")
{
    auto t = parse_hermite_terms("2:0.1; 0,4:-0.02", 2);
    REQUIRE(t.size() == 2);
    CHECK(t[0].degrees == std::vector<int>{2, 0});
    CHECK(t[1].degrees == std::vector<int>{0, 4});
    CHECK(t[1].coeff == -0.02);
    CHECK(key_of([] { parse_hermite_terms("2,2,2:1", 2); }) == "state.terms");
    CHECK(key_of([] { parse_hermite_terms("2 0.1", 1); }) == "state.terms");
}

TEST_CASE("verify-thm1: h0 = 1 gives zero on both sides")
{
    auto rep = verify_thm1(Config::parse("state.terms = 2:0\nthm1.t_grid = 0.5, 2\n"));
    for (const auto& r : rep.records) {
        CHECK(r.measured == 0.0);
        CHECK(r.bound == 0.0);
    }
    CHECK(rep.pass());
}

TEST_CASE("verify-thm1: the bound holds without S-S collisions")
{
    auto rep = verify_thm1(Config::parse("params.lambda_s = 0\nstate.terms = 2:0.1\n"));
    CHECK(rep.pass());
    CHECK(rep.records.size() == 25);
    CHECK(rep.records.front().measured > 0);
}

TEST_CASE("verify-thm1 rejections")
{
    CHECK_THROWS_AS(verify_thm1(Config::parse("state.kind = gaussian\nstate.beta_s = 3.0\n")), NotInL2);
    CHECK(key_of([] { verify_thm1(Config::parse("spectral.max_basis = 100\n")); }) == "spectral.cutoff");
    CHECK(key_of([] { verify_thm1(Config::parse("thm1.bogus = 1\n")); }) == "thm1.bogus");
    CHECK(key_of([] { verify_thm1(Config::parse("thm1.t_grid = lin(0, 1, 0)\n")); }) == "thm1.t_grid");
    CHECK(key_of([] { verify_thm1(Config::parse("experiment = dsmc\n")); }) == "experiment");
    CHECK(key_of([] { run_experiment("nope", Config{}); }) == "experiment");
    CHECK(key_of([] { verify_thm1(Config::parse("params.N = 0\n")); }) == "params");
}

TEST_CASE("verify-thm2: thermal initial state gives zero on both sides")
{
    auto rep = verify_thm2(Config::parse("state.kind = gaussian\nstate.beta_s = 6.283185307179586\n"
                                         "thm2.t_grid = 0.5, 2\nthm2.c4_k = 1\nthm2.c4_xi = 0.5\n"));
    CHECK(rep.meta["d2_initial"].get<double>() < 1e-12);
    for (const auto& r : rep.records)
        if (r.label == "d2 difference") CHECK(r.measured < 1e-12);
    CHECK(rep.pass());
}

TEST_CASE("verify-thm2: nonzero first moment is a configuration error")
{
    CHECK(key_of([] { verify_thm2(Config::parse("state.kind = hermite\nstate.terms = 1:0.1\nthm2.t_grid = 1\n")); }) ==
          "state");
}

TEST_CASE("steady-state: zero perturbation and the N < 3 note")
{
    auto rep = verify_steady(Config::parse("steady.scale = 0\nsteady.states = 2\n"));
    // the match residual is the uniformization truncation of the constant
    for (const auto& r : rep.records) CHECK(r.measured < 1e-11);
    CHECK(rep.pass());
    auto small = verify_steady(Config::parse("params.N = 2\nsteady.states = 1\nsteady.t_match = 200\n"));
    CHECK(small.notes.size() == 1);
    for (const auto& r : small.records) CHECK(r.label.find("L2") == std::string::npos);
}

TEST_CASE("steady-state: both bounds hold at (1, 4); long-time match with a generous horizon")
{
    auto rep = verify_steady(Config::parse("steady.states = 5\nsteady.t_match = 300\n"));
    CHECK(rep.pass());
}

TEST_CASE("dsmc: reruns are byte-identical and independent of the thread count")
{
    const auto cfg = Config::parse("dsmc.replicas = 3000\ndsmc.t_grid = 0.5, 1\ndsmc.raw_dump = true\n");
    RunOptions a, b;
    b.threads = 3;
    const auto ra = dsmc_experiment(cfg, a), rb = dsmc_experiment(cfg, b);
    CHECK(to_json(ra).dump() == to_json(rb).dump());
    CHECK(to_csv(ra) == to_csv(rb));
    REQUIRE(ra.artifacts.size() == 1);
    std::istringstream is(ra.artifacts[0].second);
    CHECK(read_raw_samples(is).rows() == 3000);
    RunOptions c;
    c.seed = 99;
    CHECK(to_csv(dsmc_experiment(cfg, c)) != to_csv(ra));
}

TEST_CASE("dsmc moment bound mode")
{
    auto rep = dsmc_experiment(Config::parse("params.M = 2\nparams.N = 6\ndsmc.mode = moment-bound\n"
                                             "dsmc.replicas = 2000\ndsmc.t_grid = 0.5, 2\n"));
    CHECK(rep.pass());
    CHECK(key_of([] { dsmc_experiment(Config::parse("dsmc.mode = other\n")); }) == "dsmc.mode");
}

TEST_CASE("inequality experiment on a small corpus")
{
    auto rep = inequality_experiment(Config::parse("inequality.count = 4\ninequality.N = 1, 2\ninequality.r = 10, 1000\n"));
    CHECK(rep.pass());
    CHECK(rep.meta["cases"].get<std::size_t>() == 4 * 4 * 2);
}

TEST_CASE("saturate: only the 11/8 record fails")
{
    auto rep = saturate_experiment(Config::parse("saturate.ratio_cases = 2, 2\n"));
    std::vector<std::string> failing;
    for (const auto& r : rep.records)
        if (!r.pass) failing.push_back(r.label);
    CHECK(failing == std::vector<std::string>{"cross term of u-bar equals 11/8"});
    CHECK(rep.exit_code() == 1);
    auto off = saturate_experiment(Config::parse("saturate.ratio_cases = 2, 2\nsaturate.check_ubar = false\n"));
    CHECK(off.pass());
}
