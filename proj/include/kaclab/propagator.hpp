#ifndef KACLAB_PROPAGATOR_HPP
#define KACLAB_PROPAGATOR_HPP

#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "kaclab/operators.hpp"

namespace kaclab {

/// Ground-state function h (density f = h * Gamma) as orthonormal Hermite
/// coefficients. coeffs(0) is <h, 1>.
struct HermiteState {
    Eigen::VectorXd coeffs;
    BasisPtr basis;

    double normalization() const { return coeffs(0); }
};

HermiteState constant_state(BasisPtr basis);

struct SeriesOptions {
    double tol = 1e-12;
    int max_terms = 200000;
};

class SeriesNotConverged : public std::runtime_error {
public:
    SeriesNotConverged(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

/// exp((Q - Lambda) t) h by uniformization. q_total must be FullFR or FullT.
HermiteState evolve(const HermiteState& state, const GeneratorMatrix& q_total, double t,
                    const SeriesOptions& opts = {});

/// Same for a list of times, sharing the Krylov powers.
std::vector<HermiteState> evolve_grid(const HermiteState& state, const GeneratorMatrix& q_total,
                                      const std::vector<double>& times, const SeriesOptions& opts = {});

/// Both generators of the comparison on a common (v, w) basis.
struct SemigroupPair {
    SystemParams params;
    SpectralSpace space;
    double lambda = 0.0;
    GeneratorMatrix fr; // Q_S + Q_R + Q_I
    GeneratorMatrix th; // Q_S + Q_R + Q_T
    SparseMatrix diff;  // Q_I - Q_T

    static SemigroupPair build(const SystemParams& params, int cutoff,
                               std::size_t max_size = kDefaultMaxBasisSize);
};

/// exp(Lt) h0 - exp(Lbar t) h0 via the telescoped expansion
///   sum_n p_n(Lambda t) sum_{k<n} (A/Lambda)^{n-k-1} (D/Lambda) (B/Lambda)^k u0
/// with A = Q_S+Q_R+Q_I, B = Q_S+Q_R+Q_T, D = A - B, u0 = h0 - 1.
HermiteState difference_series(const SemigroupPair& pair, const HermiteState& h0, double t,
                               const SeriesOptions& opts = {});

/// Norm of A^{n-k-1} D B^k u0 for one term of the expansion.
double difference_term_norm(const SemigroupPair& pair, const Eigen::VectorXd& u0, int n, int k);

/// Orthonormal radial vectors r_m (coefficients of the degree-2m part of
/// |x|^{2m}, normalised) for 2m <= cutoff.
std::vector<Eigen::VectorXd> radial_basis(const TensorBasis& basis);

/// Rotation-average steady state: projection onto the radial subspace.
HermiteState steady_state(const HermiteState& h0);

/// Same projection by iterating the mean of all pair projectors until the
/// update falls below tol. Used as an independent check.
HermiteState steady_state_iterative(const HermiteState& h0, const RotationBlocks& rot,
                                    double tol = 1e-12, int max_iter = 100000);

} // namespace kaclab

#endif
