#include "kaclab/operators.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <vector>

#include <Eigen/Eigenvalues>

namespace kaclab {

namespace {

using Triplet = Eigen::Triplet<double>;

constexpr double kPruneTol = 1e-14;

void add_pair_triplets(const TensorBasis& basis, const RotationBlocks& rot, int p, int q,
                       double scale, std::vector<Triplet>& out)
{
    std::vector<std::uint8_t> idx(basis.num_coords());
    for (std::size_t col = 0; col < basis.size(); ++col) {
        const auto mi = basis.multi_index(col);
        const int np = mi[p];
        const int d = np + mi[q];
        const Eigen::MatrixXd& b = rot.block(d);
        idx.assign(mi.begin(), mi.end());
        for (int a = 0; a <= d; ++a) {
            const double v = b(a, np);
            if (std::abs(v) < kPruneTol) continue;
            idx[p] = std::uint8_t(a);
            idx[q] = std::uint8_t(d - a);
            out.emplace_back(int(basis.index_of(idx)), int(col), scale * v);
        }
    }
}

void add_thermostat_triplets(const TensorBasis& basis, int i, double scale, std::vector<Triplet>& out)
{
    for (std::size_t k = 0; k < basis.size(); ++k) {
        const double a = thermostat_factor(basis.degree(k, i));
        if (a != 0.0) out.emplace_back(int(k), int(k), scale * a);
    }
}

SparseMatrix from_triplets(std::size_t n, const std::vector<Triplet>& t)
{
    SparseMatrix m{Eigen::Index(n), Eigen::Index(n)};
    m.setFromTriplets(t.begin(), t.end());
    m.makeCompressed();
    return m;
}

} // namespace

void SystemParams::validate() const
{
    if (M < 1) throw std::invalid_argument("params.M must be >= 1");
    if (N < 1) throw std::invalid_argument("params.N must be >= 1");
    if (!(lambda_s >= 0) || !(lambda_r >= 0) || !(mu >= 0)) {
        throw std::invalid_argument("rates lambda_s, lambda_r, mu must be >= 0");
    }
}

double lambda_total(const SystemParams& p)
{
    p.validate();
    double l = p.mu * p.M;
    if (p.M >= 2) l += p.lambda_s * p.M / 2.0;
    if (p.N >= 2) l += p.lambda_r * p.N / 2.0;
    return l;
}

std::string to_string(GeneratorTag tag)
{
    switch (tag) {
    case GeneratorTag::QS: return "Q_S";
    case GeneratorTag::QR: return "Q_R";
    case GeneratorTag::QI: return "Q_I";
    case GeneratorTag::QT: return "Q_T";
    case GeneratorTag::FullFR: return "FULL_FR";
    case GeneratorTag::FullT: return "FULL_T";
    }
    return "?";
}

SpectralSpace SpectralSpace::make(int system_coords, int reservoir_coords, int cutoff, std::size_t max_size)
{
    SpectralSpace s;
    s.basis = std::make_shared<const TensorBasis>(system_coords, reservoir_coords, cutoff, max_size);
    s.rotations = std::make_shared<const RotationBlocks>(cutoff);
    return s;
}

SparseMatrix pair_projector(const TensorBasis& basis, const RotationBlocks& rot, int p, int q)
{
    if (p == q || p < 0 || q < 0 || p >= basis.num_coords() || q >= basis.num_coords()) {
        throw std::invalid_argument("pair_projector: bad coordinate pair");
    }
    std::vector<Triplet> t;
    add_pair_triplets(basis, rot, p, q, 1.0, t);
    return from_triplets(basis.size(), t);
}

SparseMatrix thermostat_operator(const TensorBasis& basis, int i)
{
    if (i < 0 || i >= basis.num_coords()) throw std::invalid_argument("thermostat_operator: bad coordinate");
    std::vector<Triplet> t;
    add_thermostat_triplets(basis, i, 1.0, t);
    return from_triplets(basis.size(), t);
}

GeneratorMatrix assemble(const SystemParams& params, GeneratorTag tag, const SpectralSpace& space)
{
    params.validate();
    const TensorBasis& basis = *space.basis;
    const RotationBlocks& rot = *space.rotations;
    if (rot.max_total_degree() < basis.cutoff()) {
        throw std::invalid_argument("rotation table degree " + std::to_string(rot.max_total_degree()) +
                                    " is below the basis cutoff " + std::to_string(basis.cutoff()));
    }
    const bool v_only = space.v_only();
    if (basis.system_coords() != params.M || (!v_only && basis.reservoir_coords() != params.N)) {
        throw std::invalid_argument("basis coordinates do not match params (M, N)");
    }

    const int M = params.M;
    const int N = params.N;
    std::vector<Triplet> t;

    const bool want_s = tag == GeneratorTag::QS || tag == GeneratorTag::FullFR || tag == GeneratorTag::FullT;
    const bool want_r = tag == GeneratorTag::QR || tag == GeneratorTag::FullFR || tag == GeneratorTag::FullT;
    const bool want_i = tag == GeneratorTag::QI || tag == GeneratorTag::FullFR;
    const bool want_t = tag == GeneratorTag::QT || tag == GeneratorTag::FullT;

    if (want_s && M >= 2 && params.lambda_s != 0.0) {
        const double s = params.lambda_s / (M - 1);
        for (int p = 0; p < M; ++p)
            for (int q = p + 1; q < M; ++q) add_pair_triplets(basis, rot, p, q, s, t);
    }
    if (want_r && N >= 2 && params.lambda_r != 0.0) {
        if (v_only) {
            const double s = params.lambda_r * N / 2.0;
            for (std::size_t k = 0; k < basis.size(); ++k) t.emplace_back(int(k), int(k), s);
        } else {
            const double s = params.lambda_r / (N - 1);
            for (int p = M; p < M + N; ++p)
                for (int q = p + 1; q < M + N; ++q) add_pair_triplets(basis, rot, p, q, s, t);
        }
    }
    if (want_i) {
        if (v_only) throw std::invalid_argument("Q_I needs reservoir coordinates in the basis");
        if (params.mu != 0.0) {
            const double s = params.mu / N;
            for (int i = 0; i < M; ++i)
                for (int j = M; j < M + N; ++j) add_pair_triplets(basis, rot, i, j, s, t);
        }
    }
    if (want_t && params.mu != 0.0) {
        for (int i = 0; i < M; ++i) add_thermostat_triplets(basis, i, params.mu, t);
    }

    GeneratorMatrix g{tag, Representation::GroundState, params, space.basis, from_triplets(basis.size(), t)};
    return g;
}

Eigen::VectorXd constant_vector(const TensorBasis& basis)
{
    Eigen::VectorXd one = Eigen::VectorXd::Zero(Eigen::Index(basis.size()));
    one(0) = 1.0;
    return one;
}

double max_eigenvalue_by_degree(const SparseMatrix& a, const TensorBasis& basis)
{
    // Basis is graded by total degree, so each degree is a contiguous range.
    double best = -INFINITY;
    std::size_t start = 0;
    while (start < basis.size()) {
        const int d = basis.total_degree(start);
        std::size_t end = start;
        while (end < basis.size() && basis.total_degree(end) == d) ++end;
        const Eigen::Index n = Eigen::Index(end - start);
        Eigen::MatrixXd block = Eigen::MatrixXd(a.block(Eigen::Index(start), Eigen::Index(start), n, n));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(block, Eigen::EigenvaluesOnly);
        best = std::max(best, eig.eigenvalues().maxCoeff());
        start = end;
    }
    return best;
}

void write_triplets(std::ostream& os, const SparseMatrix& a)
{
    os << "# " << a.rows() << ' ' << a.cols() << ' ' << a.nonZeros() << '\n';
    char buf[96];
    for (Eigen::Index r = 0; r < a.outerSize(); ++r) {
        for (SparseMatrix::InnerIterator it(a, r); it; ++it) {
            std::snprintf(buf, sizeof buf, "%ld %ld %.17g\n", long(it.row()), long(it.col()), it.value());
            os << buf;
        }
    }
}

} // namespace kaclab
