#include "kaclab/hermite.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace kaclab {

void hermite_values(int max_degree, double v, std::span<double> out)
{
    const double x = std::sqrt(kBeta) * v;
    out[0] = 1.0;
    if (max_degree == 0) return;
    out[1] = x;
    for (int n = 1; n < max_degree; ++n) {
        out[n + 1] = (x * out[n] - std::sqrt(double(n)) * out[n - 1]) / std::sqrt(double(n + 1));
    }
}

HermiteBasis1D::HermiteBasis1D(int cutoff) : cutoff_(cutoff)
{
    if (cutoff < 0) throw std::invalid_argument("hermite cutoff must be non-negative");
}

double HermiteBasis1D::eval(int n, double v) const
{
    if (n < 0 || n > cutoff_) {
        throw std::out_of_range("hermite degree " + std::to_string(n) + " outside [0, " +
                                std::to_string(cutoff_) + "]");
    }
    std::vector<double> buf(n + 1);
    hermite_values(n, v, buf);
    return buf[n];
}

void HermiteBasis1D::eval_all(double v, std::span<double> out) const
{
    if (out.size() < std::size_t(cutoff_ + 1)) throw std::invalid_argument("eval_all: output too short");
    hermite_values(cutoff_, v, out);
}

double HermiteBasis1D::leading_coefficient(int n) const
{
    if (n < 0 || n > cutoff_) throw std::out_of_range("hermite degree outside cutoff");
    return std::pow(kBeta, 0.5 * n) / std::sqrt(std::tgamma(n + 1.0));
}

double HermiteBasis1D::eval_monic(int n, double v) const
{
    return eval(n, v) / leading_coefficient(n);
}

QuadratureRule gauss_hermite_rule(int num_nodes)
{
    if (num_nodes < 1) throw std::invalid_argument("quadrature needs at least one node");
    // Golub-Welsch on the Jacobi matrix of the probabilists' recurrence.
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(num_nodes, num_nodes);
    for (int k = 1; k < num_nodes; ++k) {
        jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(double(k));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
    QuadratureRule rule;
    rule.nodes.resize(num_nodes);
    rule.weights.resize(num_nodes);
    const double scale = 1.0 / std::sqrt(kBeta);
    for (int k = 0; k < num_nodes; ++k) {
        rule.nodes[k] = eig.eigenvalues()(k) * scale;
        const double first = eig.eigenvectors()(0, k);
        rule.weights[k] = first * first;
    }
    return rule;
}

QuadratureRule angular_rule(int num_nodes)
{
    if (num_nodes < 1) throw std::invalid_argument("angular rule needs at least one node");
    QuadratureRule rule;
    rule.nodes.resize(num_nodes);
    rule.weights.assign(num_nodes, 1.0 / num_nodes);
    for (int k = 0; k < num_nodes; ++k) rule.nodes[k] = 2.0 * kPi * k / num_nodes;
    return rule;
}

double thermostat_eigenvalue(int n)
{
    if (n < 0) throw std::invalid_argument("thermostat eigenvalue needs n >= 0");
    // binom(2n, n) / 4^n
    double a = 1.0;
    for (int k = 1; k <= n; ++k) a *= (2.0 * k - 1.0) / (2.0 * k);
    return a;
}

double thermostat_factor(int degree)
{
    if (degree % 2 != 0) return 0.0;
    return thermostat_eigenvalue(degree / 2);
}

Eigen::MatrixXd rotation_block(int total_degree, int angular_nodes)
{
    if (total_degree < 0) throw std::invalid_argument("rotation block degree must be non-negative");
    if (angular_nodes < 1) throw std::invalid_argument("angular rule needs at least one node");
    using Real = long double;
    using MatR = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
    const int d = total_degree;
    const int dim = d + 1;
    // Integrand in (x, y) has degree <= 2d, so d+1 Gauss nodes suffice.
    // Extended precision keeps the degree-16 blocks idempotent to 1e-12.
    const int q = d + 1;
    MatR jacobi = MatR::Zero(q, q);
    for (int k = 1; k < q; ++k) jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(Real(k));
    Eigen::SelfAdjointEigenSolver<MatR> eig(jacobi);
    const Real scale = 1.0L / std::sqrt(2.0L * std::numbers::pi_v<long double>);
    std::vector<Real> nodes(q), gw(q);
    for (int k = 0; k < q; ++k) {
        nodes[k] = eig.eigenvalues()(k) * scale;
        gw[k] = eig.eigenvectors()(0, k) * eig.eigenvectors()(0, k);
    }

    auto values = [](int n, Real v, std::vector<Real>& out) {
        const Real x = std::sqrt(2.0L * std::numbers::pi_v<long double>) * v;
        out[0] = 1.0L;
        if (n == 0) return;
        out[1] = x;
        for (int k = 1; k < n; ++k) out[k + 1] = (x * out[k] - std::sqrt(Real(k)) * out[k - 1]) / std::sqrt(Real(k + 1));
    };

    // H_a(x) H_{d-a}(y) on the tensor grid, pre-multiplied by the weights.
    MatR unrotated(q * q, dim);
    std::vector<Real> hx(dim), hy(dim);
    for (int ix = 0; ix < q; ++ix) {
        values(d, nodes[ix], hx);
        for (int iy = 0; iy < q; ++iy) {
            values(d, nodes[iy], hy);
            for (int a = 0; a < dim; ++a) unrotated(ix * q + iy, a) = gw[ix] * gw[iy] * hx[a] * hy[d - a];
        }
    }

    MatR block = MatR::Zero(dim, dim);
    MatR rotated(q * q, dim);
    for (int k = 0; k < angular_nodes; ++k) {
        const Real th = 2.0L * std::numbers::pi_v<long double> * k / angular_nodes;
        const Real c = std::cos(th);
        const Real s = std::sin(th);
        for (int ix = 0; ix < q; ++ix) {
            for (int iy = 0; iy < q; ++iy) {
                const Real x = nodes[ix], y = nodes[iy];
                values(d, x * c + y * s, hx);
                values(d, -x * s + y * c, hy);
                for (int a = 0; a < dim; ++a) rotated(ix * q + iy, a) = hx[a] * hy[d - a];
            }
        }
        // block(a, c) += <(H_c (x) H_{d-c}) o R_theta, H_a (x) H_{d-a}>
        block.noalias() += unrotated.transpose() * rotated;
    }
    block /= Real(angular_nodes);
    return block.cast<double>();
}

Eigen::MatrixXd rotation_block(int total_degree)
{
    return rotation_block(total_degree, 4 * total_degree + 1);
}

RotationBlocks::RotationBlocks(int max_total_degree) : max_degree_(max_total_degree)
{
    if (max_total_degree < 0) throw std::invalid_argument("rotation table degree must be non-negative");
    blocks_.reserve(max_total_degree + 1);
    const int nodes = 4 * max_total_degree + 1;
    for (int d = 0; d <= max_total_degree; ++d) blocks_.push_back(rotation_block(d, nodes));
}

const Eigen::MatrixXd& RotationBlocks::block(int total_degree) const
{
    if (total_degree < 0 || total_degree > max_degree_) {
        throw std::out_of_range("rotation block of degree " + std::to_string(total_degree) +
                                " not tabulated (max " + std::to_string(max_degree_) + ")");
    }
    return blocks_[total_degree];
}

} // namespace kaclab
