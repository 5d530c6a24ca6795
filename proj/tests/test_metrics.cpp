#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "kaclab/metrics.hpp"

using namespace kaclab;

namespace {

std::complex<double> fourier_1d(const std::function<double(double)>& density, double xi)
{
    std::complex<double> s = 0.0;
    const double h = 2e-3;
    for (double v = -10; v <= 10; v += h) s += h * density(v) * std::exp(std::complex<double>(0, -2 * kPi * xi * v));
    return s;
}

double h2(double v) { return (2 * kPi * v * v - 1) / std::sqrt(2.0); }
double h3(double v)
{
    const double x = std::sqrt(2 * kPi) * v;
    return (x * x * x - 3 * x) / std::sqrt(6.0);
}

} // namespace

TEST_CASE("coefficient characteristic function matches a direct Fourier integral")
{
    auto b = std::make_shared<const TensorBasis>(1, 0, 4);
    HermiteState h = constant_state(b);
    h.coeffs(2) = 0.3;
    h.coeffs(3) = -0.2;
    auto f = CharFunction::from_coefficients(h);
    auto dens = [](double v) { return (1 + 0.3 * h2(v) - 0.2 * h3(v)) * std::exp(-kPi * v * v); };
    for (double xi : {0.0, 0.2, -0.7, 1.3}) {
        const auto want = fourier_1d(dens, xi);
        const auto got = f(std::span<const double>(&xi, 1));
        CHECK(std::abs(got - want) < 1e-9);
    }
    CHECK_FALSE(f.even());
}

TEST_CASE("gaussian closed form agrees with its Hermite expansion")
{
    const double beta_s = 8.0;
    auto b = std::make_shared<const TensorBasis>(2, 0, 14);
    InitialSpec s;
    s.kind = InitialKind::Gaussian;
    s.beta_s = beta_s;
    auto fc = CharFunction::from_coefficients(initial_coefficients(s, b));
    auto fg = CharFunction::gaussian(2, beta_s);
    CHECK(fc.even());
    CHECK(fc.radial());
    CHECK(fc.sym_blocks() == std::vector<int>{2});
    for (double r : {0.1, 0.5, 1.0}) {
        std::vector<double> xi = {r, -0.5 * r};
        CHECK(std::abs(fc(xi) - fg(xi)) < 1e-6);
    }
}

TEST_CASE("tail bound dominates sampled values")
{
    auto b = std::make_shared<const TensorBasis>(2, 0, 6);
    std::mt19937_64 rng(9);
    std::normal_distribution<double> g;
    HermiteState h = constant_state(b);
    for (std::size_t k = 1; k < b->size(); ++k) h.coeffs(Eigen::Index(k)) = 0.1 * g(rng);
    auto f = CharFunction::from_coefficients(h);
    for (double R : {0.5, 1.0, 2.0}) {
        const double bound = f.tail_bound(R);
        for (int k = 0; k < 2000; ++k) {
            const double th = 2 * kPi * k / 2000.0, r = R + 0.003 * k;
            std::vector<double> xi = {r * std::cos(th), r * std::sin(th)};
            CHECK(std::abs(f(xi)) <= bound * (1 + 1e-12));
        }
    }
    auto m = CharFunction::mixture_product(3, 4.0, 20.0, 0.5);
    const double R = 1.5;
    std::vector<double> xi = {R, 0, 0};
    CHECK(std::abs(m(xi)) <= m.tail_bound(R));
}

TEST_CASE("d2 of a gaussian against the thermal state approaches the small-xi limit")
{
    const double beta_s = 9.0;
    auto f = CharFunction::gaussian(1, beta_s);
    auto g = CharFunction::gaussian(1);
    SearchConfig cfg;
    cfg.refine_rounds = 20;
    auto r = d2(f, g, cfg);
    const double limit = std::abs(2 * kPi * kPi / beta_s - kPi);
    CHECK(r.lower_bound <= limit * (1 + 1e-12));
    CHECK(r.lower_bound > 0.99 * limit);
    CHECK(r.small_xi_limit == doctest::Approx(limit).epsilon(1e-12));
    CHECK(r.certified);
    auto self = d2(g, g, cfg);
    CHECK(self.lower_bound == 0.0);
}

TEST_CASE("d2 symmetry reduction does not change the result")
{
    auto b = std::make_shared<const TensorBasis>(2, 0, 4);
    HermiteState h = constant_state(b);
    h.coeffs(Eigen::Index(b->index_of(std::vector<std::uint8_t>{2, 0}))) = 0.2;
    h.coeffs(Eigen::Index(b->index_of(std::vector<std::uint8_t>{0, 2}))) = 0.2;
    h.coeffs(Eigen::Index(b->index_of(std::vector<std::uint8_t>{2, 2}))) = -0.1;
    auto f = CharFunction::from_coefficients(h);
    auto g = CharFunction::from_coefficients(constant_state(b));
    CHECK(f.even());
    CHECK(f.sym_blocks() == std::vector<int>{2});
    SearchConfig cfg;
    cfg.grid_points = 41;
    auto with = d2(f, g, cfg, true);
    auto without = d2(f, g, cfg, false);
    CHECK(with.search.evals < without.search.evals);
    CHECK(with.lower_bound == doctest::Approx(without.lower_bound).epsilon(1e-6));
}

TEST_CASE("d2 rejects a nonzero first moment and mismatched dimensions")
{
    auto b = std::make_shared<const TensorBasis>(1, 0, 2);
    HermiteState h = constant_state(b);
    h.coeffs(1) = 0.1;
    SearchConfig cfg;
    CHECK_THROWS_AS(d2(CharFunction::from_coefficients(h), CharFunction::gaussian(1), cfg), std::invalid_argument);
    CHECK_THROWS_AS(d2(CharFunction::gaussian(2), CharFunction::gaussian(1), cfg), std::invalid_argument);
}

TEST_CASE("empirical characteristic function is within sampling error")
{
    const int K = 20000;
    Eigen::MatrixXd s(K, 2);
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g(0.0, 0.5);
    for (int k = 0; k < K; ++k) s(k, 0) = g(rng), s(k, 1) = g(rng);
    auto e = CharFunction::empirical(s);
    auto a = CharFunction::gaussian(2, 4.0);
    for (double r : {0.1, 0.4, 0.9}) {
        std::vector<double> xi = {r, 0.3};
        CHECK(std::abs(e(xi) - a(xi)) < 5 * e.stderr_at(xi));
        CHECK(e.stderr_at(xi) > 0);
    }
    CHECK(e.provenance() == CharFunction::Provenance::Empirical);
    CHECK(e.max_first_moment() == 0.0);
}

TEST_CASE("moment recursion agrees with forward evolution")
{
    for (SystemParams p : {SystemParams{1, 3, 0, 1, 1}, SystemParams{2, 4, 1, 0.5, 2}, SystemParams{3, 5, 1, 1, 1}}) {
        auto b = std::make_shared<const TensorBasis>(p.M, 0, 4);
        InitialSpec s;
        s.kind = InitialKind::Mixture;
        s.beta1 = 4.0;
        s.beta2 = 15.0;
        s.weight = 0.4;
        auto h0 = initial_coefficients(s, b);
        const auto pr = prop_hi_matrix(p);
        const auto rec = moment_recursion(pr, moments_from_coefficients(h0), 6);
        const auto fwd = fourth_moment_forward(p, h0, 6);
        for (int k = 0; k <= 6; ++k) CHECK(rec[k] == doctest::Approx(fwd[k]).epsilon(1e-10));
        CHECK(pr.norm_l2 <= 1 + 1e-12);
        CHECK(pr.spectral_radius <= 1 + 1e-12);
        CHECK(pr.has_h3 == (p.M >= 2));
    }
}

TEST_CASE("G-hat: zero for the thermal state, closed form for an H2 perturbation")
{
    auto b = std::make_shared<const TensorBasis>(1, 0, 4);
    std::vector<double> xi = {0.4};
    CHECK(std::abs(g_hat(constant_state(b), xi, 0.7)) < 1e-14);
    HermiteState h = constant_state(b);
    const double eps = 0.3;
    h.coeffs(2) = eps;
    for (double eta : {0.0, 0.5, 1.1}) {
        // P(xi) = 1 - eps sqrt2 pi xi^2; the rotation average of P(rotated) - P(xi cos) is -eps sqrt2 pi eta^2 / 2
        const double want = std::exp(-kPi * (xi[0] * xi[0] + eta * eta)) * (-eps * std::sqrt(2.0) * kPi * eta * eta / 2);
        CHECK(g_hat(h, xi, eta) == doctest::Approx(want).epsilon(1e-12).scale(1e-14));
    }
}
