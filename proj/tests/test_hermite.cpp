#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "kaclab/hermite.hpp"
#include "kaclab/tensor_basis.hpp"

using namespace kaclab;

namespace {

// Explicit-sum probabilists' Hermite, independent of the recurrence.
double he_explicit(int n, double x)
{
    double s = 0.0;
    for (int m = 0; 2 * m <= n; ++m) {
        s += (m % 2 ? -1.0 : 1.0) * std::pow(x, n - 2 * m) /
             (std::tgamma(m + 1.0) * std::tgamma(n - 2 * m + 1.0) * std::pow(2.0, m));
    }
    return s * std::tgamma(n + 1.0);
}

double h_explicit(int n, double v)
{
    return he_explicit(n, std::sqrt(2 * kPi) * v) / std::sqrt(std::tgamma(n + 1.0));
}

// Trapezoid rule for int f(v) e^{-pi v^2} dv; spectrally accurate here.
template <class F>
double trapezoid(F f, double half_width = 7.0, int points = 4001)
{
    const double h = 2 * half_width / (points - 1);
    double s = 0.0;
    for (int i = 0; i < points; ++i) {
        const double v = -half_width + i * h;
        s += f(v) * std::exp(-kPi * v * v);
    }
    return s * h;
}

} // namespace

TEST_CASE("H_0 is one and H_1 is sqrt(2 pi) v")
{
    HermiteBasis1D b(8);
    for (double v : {-3.0, -0.2, 0.0, 1.7}) {
        CHECK(b.eval(0, v) == 1.0);
        CHECK(b.eval(1, v) == doctest::Approx(std::sqrt(2 * kPi) * v).epsilon(1e-14));
    }
}

TEST_CASE("recurrence agrees with the explicit sum")
{
    HermiteBasis1D b(10);
    for (int n = 0; n <= 10; ++n)
        for (double v : {-1.3, -0.4, 0.25, 0.9, 2.1})
            CHECK(b.eval(n, v) == doctest::Approx(h_explicit(n, v)).epsilon(1e-11));
}

TEST_CASE("gram matrix is the identity under an independent trapezoid oracle")
{
    HermiteBasis1D b(8);
    for (int m = 0; m <= 8; ++m)
        for (int n = 0; n <= 8; ++n) {
            const double g = trapezoid([&](double v) { return b.eval(m, v) * b.eval(n, v); });
            CHECK(std::abs(g - (m == n ? 1.0 : 0.0)) < 1e-12);
        }
}

TEST_CASE("gauss rule integrates moments exactly")
{
    const auto rule = gauss_hermite_rule(6);
    double wsum = 0.0;
    for (double w : rule.weights) wsum += w;
    CHECK(wsum == doctest::Approx(1.0).epsilon(1e-14));
    // E v^2 = 1/(2 pi), E v^4 = 3/(2 pi)^2, degree 11 odd moment vanishes
    CHECK(rule.integrate([](double v) { return v * v; }) == doctest::Approx(1 / (2 * kPi)).epsilon(1e-13));
    CHECK(rule.integrate([](double v) { return std::pow(v, 4); }) ==
          doctest::Approx(3 / std::pow(2 * kPi, 2)).epsilon(1e-13));
    CHECK(std::abs(rule.integrate([](double v) { return std::pow(v, 11); })) < 1e-14);
    const double m10 = 945.0 / std::pow(2 * kPi, 5);
    CHECK(rule.integrate([](double v) { return std::pow(v, 10); }) == doctest::Approx(m10).epsilon(1e-12));
}

TEST_CASE("gauss-rule gram matrix")
{
    HermiteBasis1D b(8);
    const auto rule = gauss_hermite_rule(9);
    for (int m = 0; m <= 8; ++m)
        for (int n = 0; n <= 8; ++n) {
            const double g = rule.integrate([&](double v) { return b.eval(m, v) * b.eval(n, v); });
            CHECK(std::abs(g - (m == n ? 1.0 : 0.0)) < 1e-12);
        }
}

TEST_CASE("eval rejects degrees above the cutoff")
{
    HermiteBasis1D b(4);
    CHECK_THROWS_AS(b.eval(5, 0.3), std::out_of_range);
    CHECK_THROWS_AS(b.eval(-1, 0.3), std::out_of_range);
}

TEST_CASE("monic polynomials")
{
    HermiteBasis1D b(4);
    for (double v : {0.3, 1.1}) {
        CHECK(b.eval_monic(2, v) == doctest::Approx(v * v - 1 / (2 * kPi)).epsilon(1e-13));
        CHECK(b.eval_monic(4, v) ==
              doctest::Approx(std::pow(v, 4) - 3 * v * v / kPi + 3 / (4 * kPi * kPi)).epsilon(1e-12));
    }
}

TEST_CASE("angular rule is exact for trigonometric polynomials below its node count")
{
    const auto rule = angular_rule(9);
    for (int k = 1; k < 9; ++k) {
        CHECK(std::abs(rule.integrate([&](double t) { return std::cos(k * t); })) < 1e-13);
        CHECK(std::abs(rule.integrate([&](double t) { return std::sin(k * t); })) < 1e-13);
    }
    CHECK(rule.integrate([](double t) { return std::pow(std::cos(t), 2); }) ==
          doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("thermostat eigenvalues")
{
    CHECK(thermostat_eigenvalue(0) == 1.0);
    // a(1) from a dense angular average of cos^2
    const auto dense = angular_rule(64);
    CHECK(thermostat_eigenvalue(1) ==
          doctest::Approx(dense.integrate([](double t) { return std::pow(std::cos(t), 2); })).epsilon(1e-13));
    CHECK(thermostat_eigenvalue(1) == doctest::Approx(0.5));
    for (int n = 1; n <= 8; ++n) {
        CHECK(thermostat_eigenvalue(n) <= 0.5);
        CHECK(thermostat_eigenvalue(n) ==
              doctest::Approx(dense.integrate([&](double t) { return std::pow(std::cos(t), 2 * n); })).epsilon(1e-12));
    }
    for (int m = 1; m <= 9; m += 2) CHECK(thermostat_factor(m) == 0.0);
}

TEST_CASE("rotation block for degree 2 matches a dense theta/trapezoid oracle")
{
    // Oracle: block(a, c) = avg_theta int int H_a(x)H_{2-a}(y) H_c(x')H_{2-c}(y') Gamma dx dy
    // with (x', y') the rotated pair. Frozen result below came from this loop
    // with a 64-node theta grid and 201-point trapezoid per axis.
    const int d = 2;
    auto hc = [](int n, double v) {
        const double x = std::sqrt(2 * kPi) * v;
        return n == 0 ? 1.0 : n == 1 ? x : (x * x - 1) / std::sqrt(2.0);
    };
    const int nt = 64, np = 201;
    const double hw = 6.0, h = 2 * hw / (np - 1);
    Eigen::MatrixXd oracle = Eigen::MatrixXd::Zero(3, 3);
    for (int it = 0; it < nt; ++it) {
        const double th = 2 * kPi * it / nt, c = std::cos(th), s = std::sin(th);
        for (int ix = 0; ix < np; ++ix)
            for (int iy = 0; iy < np; ++iy) {
                const double x = -hw + ix * h, y = -hw + iy * h;
                const double w = std::exp(-kPi * (x * x + y * y)) * h * h / nt;
                const double xr = x * c + y * s, yr = -x * s + y * c;
                for (int a = 0; a <= d; ++a)
                    for (int cc = 0; cc <= d; ++cc)
                        oracle(a, cc) += w * hc(a, x) * hc(d - a, y) * hc(cc, xr) * hc(d - cc, yr);
            }
    }
    Eigen::MatrixXd frozen(3, 3);
    frozen << 0.5, 0, 0.5, 0, 0, 0, 0.5, 0, 0.5;
    CHECK((oracle - frozen).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((rotation_block(2) - frozen).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("rotation blocks are symmetric projectors up to degree 16")
{
    CHECK(rotation_block(0)(0, 0) == doctest::Approx(1.0));
    RotationBlocks table(16);
    for (int d = 0; d <= 16; ++d) {
        const auto& b = table.block(d);
        CHECK((b - b.transpose()).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((b * b - b).cwiseAbs().maxCoeff() < 1e-12);
        // rank one for even degree, zero for odd
        CHECK(b.trace() == doctest::Approx(d % 2 ? 0.0 : 1.0).epsilon(1e-12));
    }
    CHECK_THROWS_AS(table.block(17), std::out_of_range);
}

TEST_CASE("degree-4 rotation block is the radial projector")
{
    // q = (sqrt6/4, 0, 1/2, 0, sqrt6/4) from expanding (x^2+y^2)^2 in the orthonormal basis
    Eigen::VectorXd q(5);
    q << std::sqrt(6.0) / 4, 0, 0.5, 0, std::sqrt(6.0) / 4;
    CHECK((rotation_block(4) - q * q.transpose()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("tensor basis indexing round-trips")
{
    TensorBasis b(2, 3, 6);
    CHECK(b.size() == TensorBasis::count(5, 6));
    CHECK(b.size() == 462);
    CHECK(b.total_degree(0) == 0);
    int prev = 0;
    for (std::size_t k = 0; k < b.size(); ++k) {
        CHECK(b.index_of(b.multi_index(k)) == k);
        CHECK(b.total_degree(k) >= prev);
        prev = b.total_degree(k);
    }
    std::vector<std::uint8_t> out_of_range{4, 3, 0, 0, 0};
    CHECK_FALSE(b.find(out_of_range).has_value());
    CHECK_THROWS_AS(b.index_of(out_of_range), std::out_of_range);
    CHECK_THROWS_AS(TensorBasis(4, 4, 8, 1000), std::length_error);
}
