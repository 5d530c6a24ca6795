#ifndef KACLAB_HERMITE_HPP
#define KACLAB_HERMITE_HPP

#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace kaclab {

inline constexpr double kPi = std::numbers::pi;
/// Inverse temperature of the reservoir and thermostat. Fixed by rescaling.
inline constexpr double kBeta = 2.0 * kPi;

/// Orthonormal Hermite polynomials for the unit-mass weight e^{-pi v^2}.
///
/// H_n(v) = He_n(sqrt(2 pi) v) / sqrt(n!), where He_n are the probabilists'
/// polynomials. H_0 = 1 and H_1(v) = sqrt(2 pi) v.
class HermiteBasis1D {
public:
    explicit HermiteBasis1D(int cutoff);

    int cutoff() const { return cutoff_; }

    /// Value of H_n at v. Throws std::out_of_range when n > cutoff.
    double eval(int n, double v) const;

    /// Fills out[0..cutoff] with H_0(v)..H_cutoff(v).
    void eval_all(double v, std::span<double> out) const;

    /// Leading coefficient (2 pi)^{n/2} / sqrt(n!). Dividing by it gives the
    /// monic polynomial.
    double leading_coefficient(int n) const;

    /// Monic Hermite polynomial for the same weight.
    double eval_monic(int n, double v) const;

private:
    int cutoff_;
};

/// Unchecked three-term recurrence; out must hold max_degree+1 entries.
void hermite_values(int max_degree, double v, std::span<double> out);

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    template <class F>
    double integrate(F&& f) const
    {
        double acc = 0.0;
        for (std::size_t k = 0; k < nodes.size(); ++k) acc += weights[k] * f(nodes[k]);
        return acc;
    }
};

/// Gauss rule for the weight e^{-pi v^2} (weights sum to one). Exact for
/// polynomials of degree <= 2*num_nodes-1.
QuadratureRule gauss_hermite_rule(int num_nodes);

/// Uniform rule on [0, 2 pi) normalised to the average (1/2pi) int d theta.
/// Exact for trigonometric polynomials of degree < num_nodes.
QuadratureRule angular_rule(int num_nodes);

/// a(n) = average of cos^{2n} over the circle: the eigenvalue of the
/// thermostat operator T on H_{2n}.
double thermostat_eigenvalue(int n);

/// Eigenvalue of T on H_m for any degree m (zero for odd m).
double thermostat_factor(int degree);

/// theta-averaged pair rotation restricted to span{H_a (x) H_{d-a}}.
/// Rows/cols are indexed by a = degree in the first coordinate. Computed by
/// angular quadrature with `angular_nodes` uniform nodes.
Eigen::MatrixXd rotation_block(int total_degree, int angular_nodes);

/// Overload using the default 4*d+1 angular nodes.
Eigen::MatrixXd rotation_block(int total_degree);

/// Cache of rotation blocks for every total degree up to a maximum.
class RotationBlocks {
public:
    /// Uses 4*max_total_degree+1 angular nodes for every block.
    explicit RotationBlocks(int max_total_degree);

    int max_total_degree() const { return max_degree_; }
    const Eigen::MatrixXd& block(int total_degree) const;

private:
    int max_degree_;
    std::vector<Eigen::MatrixXd> blocks_;
};

} // namespace kaclab

#endif
