#ifndef KACLAB_OPERATORS_HPP
#define KACLAB_OPERATORS_HPP

#include <iosfwd>
#include <memory>
#include <string>

#include <Eigen/Sparse>

#include "kaclab/hermite.hpp"
#include "kaclab/tensor_basis.hpp"

namespace kaclab {

struct SystemParams {
    int M = 1;
    int N = 1;
    double lambda_s = 1.0;
    double lambda_r = 1.0;
    double mu = 1.0;

    /// Throws std::invalid_argument on M < 1, N < 1 or negative rates.
    void validate() const;
};

/// Lambda = lambda_S M/2 + lambda_R N/2 + mu M, where the S-S term is dropped
/// for M = 1 and the R-R term for N = 1 (the pair sums are empty there).
double lambda_total(const SystemParams& p);

enum class GeneratorTag { QS, QR, QI, QT, FullFR, FullT };
enum class Representation { GroundState };

std::string to_string(GeneratorTag tag);

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// A truncated basis together with the rotation blocks it needs.
///
/// A basis with zero reservoir coordinates is a "v-only" space: functions
/// that do not depend on w. There Q_R acts as (lambda_R N/2) I and Q_I is not
/// defined.
struct SpectralSpace {
    BasisPtr basis;
    std::shared_ptr<const RotationBlocks> rotations;

    static SpectralSpace make(int system_coords, int reservoir_coords, int cutoff,
                              std::size_t max_size = kDefaultMaxBasisSize);
    bool v_only() const { return basis->reservoir_coords() == 0; }
};

struct GeneratorMatrix {
    GeneratorTag tag;
    Representation representation = Representation::GroundState;
    SystemParams params;
    BasisPtr basis;
    SparseMatrix matrix;
};

/// Assembles one generator piece (or FullFR = Q_S+Q_R+Q_I, FullT = Q_S+Q_R+Q_T)
/// in the ground-state representation. Throws std::invalid_argument if the
/// space does not match the params or the rotation table is shorter than the
/// basis cutoff.
GeneratorMatrix assemble(const SystemParams& params, GeneratorTag tag, const SpectralSpace& space);

/// Rotation average R_pq over coordinates p != q.
SparseMatrix pair_projector(const TensorBasis& basis, const RotationBlocks& rot, int p, int q);

/// Thermostat operator T_i on coordinate i (diagonal).
SparseMatrix thermostat_operator(const TensorBasis& basis, int i);

/// Coefficient vector of the constant function 1.
Eigen::VectorXd constant_vector(const TensorBasis& basis);

/// Largest eigenvalue of a symmetric matrix that preserves total degree,
/// computed block by block.
double max_eigenvalue_by_degree(const SparseMatrix& a, const TensorBasis& basis);

/// Text dump: a header line "# rows cols nnz" then "row col value" per entry.
void write_triplets(std::ostream& os, const SparseMatrix& a);

} // namespace kaclab

#endif
