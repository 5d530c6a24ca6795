#ifndef KACLAB_METRICS_HPP
#define KACLAB_METRICS_HPP

#include <complex>
#include <memory>
#include <optional>
#include <utility>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "kaclab/initial_state.hpp"
#include "kaclab/propagator.hpp"
#include "kaclab/sup_search.hpp"

namespace kaclab {

/// L^2(Gamma) norm of a ground-state function: the coefficient norm.
double l2_gamma_norm(const HermiteState& h);

/// Fourier transform f-hat(xi) = int f(x) exp(-2 pi i xi.x) dx of a density.
///
/// Three representations:
///  - from_coefficients: f = h Gamma with h a Hermite state. Each H_n Gamma
///    transforms to (-i)^n (sqrt(2 pi) xi)^n / sqrt(n!) Gamma(xi), so f-hat is
///    a polynomial times Gamma.
///  - mixture_product: every coordinate is an independent two-component
///    centred Gaussian mixture (Gamma itself is the case beta = 2 pi).
///  - empirical: mean of exp(-2 pi i xi.x) over samples, with standard error.
class CharFunction {
public:
    enum class Provenance { Analytic, Empirical };

    static CharFunction from_coefficients(const HermiteState& h);
    static CharFunction mixture_product(int dim, double beta1, double beta2, double weight);
    static CharFunction gaussian(int dim, double beta = kBeta) { return mixture_product(dim, beta, beta, 1.0); }
    /// rows are samples
    static CharFunction empirical(Eigen::MatrixXd samples);

    int dim() const { return dim_; }
    Provenance provenance() const { return prov_; }
    std::complex<double> operator()(std::span<const double> xi) const;
    /// Standard error of the value (0 for analytic evaluators).
    double stderr_at(std::span<const double> xi) const;
    /// Upper bound on sup_{|xi| >= R} |f-hat(xi)|.
    double tail_bound(double R) const;

    bool even() const { return even_; }
    bool radial() const { return radial_; }
    /// Coordinate blocks inside which f-hat is permutation invariant.
    const std::vector<int>& sym_blocks() const { return blocks_; }
    /// Largest |first moment| over coordinates (d2 needs zero).
    double max_first_moment() const;
    /// Mass and raw second-moment matrix of an analytic representation.
    std::optional<std::pair<double, Eigen::MatrixXd>> second_moments() const;

    /// Coefficient representation, if any.
    const HermiteState* coefficients() const { return coeffs_ ? coeffs_.get() : nullptr; }

private:
    enum class Kind { Coefficients, Mixture, Empirical };
    Kind kind_ = Kind::Mixture;
    Provenance prov_ = Provenance::Analytic;
    int dim_ = 0;
    bool even_ = false;
    bool radial_ = false;
    std::vector<int> blocks_;

    // Coefficients
    std::shared_ptr<const HermiteState> coeffs_;
    std::vector<std::size_t> nz_;
    int max_degree_ = 0;
    // Mixture
    double beta1_ = kBeta, beta2_ = kBeta, weight_ = 1.0;
    // Empirical
    std::shared_ptr<const Eigen::MatrixXd> samples_;
};

struct D2Result {
    double lower_bound = 0.0;
    std::vector<double> argmax;
    double radius = 0.0;
    /// Bound on the ratio outside the searched ball.
    double tail_bound = 0.0;
    bool certified = false;
    /// 2 pi^2 max |eig(Sigma_f - Sigma_g)|, the limit of the ratio at the
    /// origin (0 when unavailable). Included in lower_bound.
    double small_xi_limit = 0.0;
    /// MC standard error of the ratio at argmax.
    double stderr = 0.0;
    SearchResult search;
};

/// Certified lower bound on sup |f-hat - g-hat| / |xi|^2. Symmetries shared
/// by both inputs (evenness, permutation blocks, radial) reduce the search
/// when use_symmetry is set. Points with |xi| < 1e-4 are not evaluated; the
/// exact limit at the origin is used instead when both inputs are analytic.
/// Throws std::invalid_argument on dimension mismatch or a nonzero first
/// moment.
D2Result d2(const CharFunction& f, const CharFunction& g, const SearchConfig& cfg, bool use_symmetry = true);

/// Matrix of Lambda^{-1}(Q_S + Q_T + lambda_R N/2 I) on the basis
/// {H4, H3, H2, H0} of symmetric even polynomials of degree <= 4 (monic
/// Hermite building blocks). For M = 1 the H3 row and column are zero.
struct PropHiResult {
    Eigen::Matrix4d L = Eigen::Matrix4d::Zero();
    Eigen::Vector4d a = Eigen::Vector4d::Zero();
    /// Gram matrix of the basis in L^2(Gamma)
    Eigen::Matrix4d gram = Eigen::Matrix4d::Zero();
    double norm_euclidean = 0.0;
    /// operator norm in L^2(Gamma): |G^{1/2} L G^{-1/2}|
    double norm_l2 = 0.0;
    double spectral_radius = 0.0;
    bool has_h3 = true;
};

PropHiResult prop_hi_matrix(const SystemParams& p);

/// E_{4,k} for k = 0..kmax via a_k = L^k a and the moment pairing.
std::vector<double> moment_recursion(const PropHiResult& r, const Moments& m, int kmax);

/// E_{4,k} by forward evolution of a v-only state h0 under
/// Lambda^{-1}(Q_S + Q_T + lambda_R N/2 I).
std::vector<double> fourth_moment_forward(const SystemParams& p, const HermiteState& h0, int kmax);

/// G-hat_k(xi, eta) for a v-only state l_k (system coordinates only).
double g_hat(const HermiteState& lk, std::span<const double> xi, double eta);
/// Same with a prebuilt transform of l_k; exact when angular_nodes > 2 cutoff + 2.
double g_hat(const CharFunction& f, int angular_nodes, std::span<const double> xi, double eta);

} // namespace kaclab

#endif
