#include "kaclab/saturation.hpp"

#include <cmath>
#include <stdexcept>

namespace kaclab {

namespace {

double binom(int n, int k)
{
    if (k < 0 || k > n) return 0.0;
    return std::round(std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)));
}

} // namespace

double composition_count(int M, int P) { return binom(M + P - 1, M - 1); }
double alternative_count(int M, int P) { return binom(M + P, P - 1); }

SaturatingState build_saturating(int M, int P, BasisPtr basis, bool find_amplitude)
{
    if (M < 2 || P < 2) throw std::invalid_argument("saturating state needs M >= 2 and P >= 2");
    if (basis->system_coords() != M) throw std::invalid_argument("basis has the wrong number of system coordinates");
    if (2 * P > basis->cutoff()) throw std::invalid_argument("saturating state degree 2P exceeds the basis cutoff");
    SaturatingState s;
    s.M = M;
    s.P = P;
    s.u = HermiteState{Eigen::VectorXd::Zero(Eigen::Index(basis->size())), basis};
    std::vector<std::uint8_t> mi(basis->num_coords(), 0);
    for (const auto& c : compositions(M, P)) {
        for (int i = 0; i < M; ++i) mi[i] = std::uint8_t(2 * c[i]);
        s.u.coeffs(Eigen::Index(basis->index_of(mi))) = 1.0;
        ++s.support;
    }
    if (find_amplitude) s.amplitude = saturating_amplitude(M, P);
    return s;
}

CrossTerm cross_term(const HermiteState& u, const RotationBlocks& rot)
{
    const TensorBasis& b = *u.basis;
    const int M = b.system_coords();
    if (M < 2 || b.reservoir_coords() < 1) throw std::invalid_argument("cross term needs M >= 2 and a reservoir coordinate");
    const SparseMatrix r11 = pair_projector(b, rot, 0, M);
    const SparseMatrix r21 = pair_projector(b, rot, 1, M);
    const SparseMatrix t1 = thermostat_operator(b, 0);
    const SparseMatrix t2 = thermostat_operator(b, 1);
    CrossTerm c;
    const Eigen::VectorXd a = r11 * u.coeffs, bb = r21 * u.coeffs;
    const Eigen::VectorXd ta = t1 * u.coeffs, tb = t2 * u.coeffs;
    c.value = a.dot(bb) - ta.dot(tb);
    c.norm2 = u.coeffs.squaredNorm();
    if (c.norm2 > 0) {
        c.ratio_norm = c.value / std::sqrt(c.norm2);
        c.ratio_norm2 = c.value / c.norm2;
    }
    return c;
}

CrossTerm cross_term(int M, int P)
{
    auto space = SpectralSpace::make(M, 1, 2 * P);
    const auto s = build_saturating(M, P, space.basis, false);
    return cross_term(s.u, *space.rotations);
}

double combinatorial_bound(int M, int P, double c)
{
    const double num = (P - 1.0) * (P - 2.0) * (M + 1.0) * M;
    const double den = (M + P) * (M + P - 1.0) * (M + P - 2.0) * (M + P - 3.0);
    return c * num / den;
}

SaturationResult saturation_experiment(const SystemParams& p, int P, const std::vector<double>& times,
                                       const SeriesOptions& opts)
{
    p.validate();
    SaturationResult r;
    r.params = p;
    r.P = P;
    auto pair = SemigroupPair::build(p, 2 * P);
    const auto s = build_saturating(p.M, P, pair.space.basis);
    r.amplitude = s.amplitude;
    HermiteState h0 = constant_state(pair.space.basis);
    h0.coeffs += s.amplitude * s.u.coeffs;
    const Eigen::VectorXd u0 = h0.coeffs - constant_vector(*pair.space.basis);
    r.norm_u0 = u0.norm();
    const double lam = pair.lambda;
    const double scale = p.M / std::sqrt(double(p.N)) * r.norm_u0;
    r.slope = (pair.diff * u0).norm();
    r.slope_bound = kSaturationC * scale;
    const double tfd = 1e-5 / lam;
    r.slope_fd = difference_series(pair, h0, tfd, opts).coeffs.norm() / tfd;
    r.pass = r.slope >= r.slope_bound;
    for (double t : times) {
        SaturationPoint pt;
        pt.t = t;
        pt.measured = difference_series(pair, h0, t, opts).coeffs.norm();
        pt.lower_bound = scale * t * ((kSaturationC + 1) * std::exp(-lam * t) - 1);
        if (pt.lower_bound > 0 && pt.measured < pt.lower_bound) r.pass = false;
        r.points.push_back(pt);
    }
    return r;
}

} // namespace kaclab
