#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kaclab/sup_search.hpp"

using namespace kaclab;

TEST_CASE("finds an off-grid peak")
{
    auto f = [](std::span<const double> x) { return -std::pow(x[0] - 0.3141, 2) - std::pow(x[1] + 1.234, 2); };
    SearchConfig cfg;
    cfg.refine_rounds = 12;
    auto r = maximize(f, 2, cfg);
    CHECK(r.argmax[0] == doctest::Approx(0.3141).epsilon(1e-3));
    CHECK(r.argmax[1] == doctest::Approx(-1.234).epsilon(1e-3));
    CHECK(r.best <= 0.0);
    for (std::size_t k = 1; k < r.history.size(); ++k) CHECK(r.history[k] >= r.history[k - 1]);
}

TEST_CASE("symmetry reductions shrink the grid and agree with the full search")
{
    auto f = [](std::span<const double> x) {
        double s = 0, p = 1;
        for (double v : x) {
            s += v * v;
            p *= std::cos(v);
        }
        return p * std::exp(-0.3 * s) * s;
    };
    SearchConfig full;
    full.grid_points = 17;
    auto a = maximize(f, 3, full);
    SearchConfig red = full;
    red.sign_symmetric = true;
    red.perm_blocks = {3};
    auto b = maximize(f, 3, red);
    CHECK(b.evals < a.evals);
    CHECK(b.best == doctest::Approx(a.best).epsilon(1e-6));
}

TEST_CASE("radial mode searches one axis")
{
    auto f = [](std::span<const double> x) {
        double s = 0;
        for (double v : x) s += v * v;
        return s * std::exp(-s);
    };
    SearchConfig cfg;
    cfg.radial = true;
    cfg.refine_rounds = 15;
    auto r = maximize(f, 4, cfg);
    CHECK(r.argmax.size() == 4);
    CHECK(r.best == doctest::Approx(std::exp(-1.0)).epsilon(1e-8));
}

TEST_CASE("origin is skipped and threads give identical results")
{
    auto f = [](std::span<const double> x) { return x[0] == 0 && x[1] == 0 ? 1e9 : -(x[0] * x[0] + x[1] * x[1]); };
    SearchConfig cfg;
    auto r1 = maximize(f, 2, cfg);
    CHECK(r1.best < 0);
    cfg.threads = 3;
    auto r3 = maximize(f, 2, cfg);
    CHECK(r1.best == r3.best);
    CHECK(r1.argmax == r3.argmax);
}

TEST_CASE("halton fallback above the evaluation cap")
{
    SearchConfig cfg;
    cfg.max_evals = 500;
    auto r = maximize([](std::span<const double> x) { return -std::abs(x[0] - 1) - std::abs(x[5]); }, 6, cfg);
    CHECK(r.evals >= 500);
    CHECK(r.best > -0.1);
    auto h = halton_points(2, 4, 0.0, 1.0);
    CHECK(h[0][0] == doctest::Approx(0.5));
    CHECK(h[1][1] == doctest::Approx(2.0 / 3));
}

TEST_CASE("invalid configurations")
{
    auto f = [](std::span<const double>) { return 0.0; };
    SearchConfig cfg;
    CHECK_THROWS(maximize(f, 0, cfg));
    cfg.perm_blocks = {1, 1};
    CHECK_THROWS(maximize(f, 3, cfg));
}
