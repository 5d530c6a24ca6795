#include "kaclab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace kaclab {

namespace {

using cd = std::complex<double>;

// sup_{r >= R} r^d exp(-pi r^2)
double radial_envelope(int d, double R)
{
    const double rstar2 = d / (2 * kPi);
    const double r2 = std::max(R * R, rstar2);
    return std::pow(r2, 0.5 * d) * std::exp(-kPi * r2);
}

bool symmetric_under_swap(const HermiteState& h, int p, int q)
{
    const TensorBasis& b = *h.basis;
    std::vector<std::uint8_t> mi(b.num_coords());
    const double tol = 1e-12 * std::max(1.0, h.coeffs.norm());
    for (std::size_t k = 0; k < b.size(); ++k) {
        const auto src = b.multi_index(k);
        if (src[p] == src[q]) continue;
        mi.assign(src.begin(), src.end());
        std::swap(mi[p], mi[q]);
        if (std::abs(h.coeffs(Eigen::Index(k)) - h.coeffs(Eigen::Index(b.index_of(mi)))) > tol) return false;
    }
    return true;
}

std::vector<int> symmetry_blocks(const HermiteState& h)
{
    const TensorBasis& b = *h.basis;
    // Try merging neighbours left to right.
    std::vector<int> blocks;
    int start = 0;
    for (int c = 1; c <= b.num_coords(); ++c) {
        if (c < b.num_coords() && symmetric_under_swap(h, c - 1, c)) continue;
        blocks.push_back(c - start);
        start = c;
    }
    return blocks;
}

std::vector<int> common_blocks(const std::vector<int>& a, const std::vector<int>& b)
{
    // Coarsest partition refined by both: cut wherever either one cuts.
    std::vector<int> cuts;
    int s = 0;
    for (int x : a) cuts.push_back(s += x);
    s = 0;
    for (int x : b) cuts.push_back(s += x);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    std::vector<int> out;
    int prev = 0;
    for (int c : cuts) {
        out.push_back(c - prev);
        prev = c;
    }
    return out;
}

constexpr double kMinRadius = 1e-4;

} // namespace

double l2_gamma_norm(const HermiteState& h) { return h.coeffs.norm(); }

CharFunction CharFunction::from_coefficients(const HermiteState& h)
{
    CharFunction f;
    f.kind_ = Kind::Coefficients;
    f.prov_ = Provenance::Analytic;
    f.dim_ = h.basis->num_coords();
    f.coeffs_ = std::make_shared<const HermiteState>(h);
    const TensorBasis& b = *h.basis;
    f.even_ = true;
    for (std::size_t k = 0; k < b.size(); ++k) {
        if (h.coeffs(Eigen::Index(k)) == 0.0) continue;
        f.nz_.push_back(k);
        f.max_degree_ = std::max(f.max_degree_, b.total_degree(k));
        for (int c = 0; c < f.dim_; ++c)
            if (b.degree(k, c) % 2) f.even_ = false;
    }
    const double n = h.coeffs.norm();
    f.radial_ = (steady_state(h).coeffs - h.coeffs).norm() <= 1e-12 * std::max(1.0, n);
    f.blocks_ = symmetry_blocks(h);
    return f;
}

CharFunction CharFunction::mixture_product(int dim, double beta1, double beta2, double weight)
{
    if (dim < 1 || !(beta1 > 0) || !(beta2 > 0) || !(weight >= 0 && weight <= 1)) {
        throw std::invalid_argument("bad mixture parameters");
    }
    CharFunction f;
    f.kind_ = Kind::Mixture;
    f.dim_ = dim;
    f.beta1_ = beta1;
    f.beta2_ = beta2;
    f.weight_ = weight;
    f.even_ = true;
    f.radial_ = beta1 == beta2 || weight == 0.0 || weight == 1.0;
    f.blocks_ = {dim};
    return f;
}

CharFunction CharFunction::empirical(Eigen::MatrixXd samples)
{
    if (samples.rows() < 2) throw std::invalid_argument("empirical characteristic function needs >= 2 samples");
    CharFunction f;
    f.kind_ = Kind::Empirical;
    f.prov_ = Provenance::Empirical;
    f.dim_ = int(samples.cols());
    f.samples_ = std::make_shared<const Eigen::MatrixXd>(std::move(samples));
    f.blocks_.assign(f.dim_, 1);
    return f;
}

std::complex<double> CharFunction::operator()(std::span<const double> xi) const
{
    if (int(xi.size()) != dim_) throw std::invalid_argument("characteristic function: dimension mismatch");
    switch (kind_) {
    case Kind::Coefficients: {
        const TensorBasis& b = *coeffs_->basis;
        const int D = max_degree_;
        // pw[c][n] = (-i)^n (sqrt(2 pi) xi_c)^n / sqrt(n!)
        std::vector<cd> pw(std::size_t(dim_) * (D + 1));
        double r2 = 0.0;
        for (int c = 0; c < dim_; ++c) {
            r2 += xi[c] * xi[c];
            const double x = std::sqrt(2 * kPi) * xi[c];
            cd v = 1.0;
            pw[c * (D + 1)] = v;
            for (int n = 1; n <= D; ++n) {
                v *= cd(0.0, -1.0) * x / std::sqrt(double(n));
                pw[c * (D + 1) + n] = v;
            }
        }
        cd s = 0.0;
        for (std::size_t k : nz_) {
            cd t = coeffs_->coeffs(Eigen::Index(k));
            for (int c = 0; c < dim_; ++c) {
                const int n = b.degree(k, c);
                if (n) t *= pw[c * (D + 1) + n];
            }
            s += t;
        }
        return s * std::exp(-kPi * r2);
    }
    case Kind::Mixture: {
        double p = 1.0;
        for (double x : xi) {
            const double a = 2 * kPi * kPi * x * x;
            p *= weight_ * std::exp(-a / beta1_) + (1 - weight_) * std::exp(-a / beta2_);
        }
        return p;
    }
    case Kind::Empirical: {
        const auto& s = *samples_;
        double re = 0.0, im = 0.0;
        for (Eigen::Index r = 0; r < s.rows(); ++r) {
            double ph = 0.0;
            for (int c = 0; c < dim_; ++c) ph += xi[c] * s(r, c);
            re += std::cos(2 * kPi * ph);
            im -= std::sin(2 * kPi * ph);
        }
        return {re / double(s.rows()), im / double(s.rows())};
    }
    }
    return 0.0;
}

double CharFunction::stderr_at(std::span<const double> xi) const
{
    if (kind_ != Kind::Empirical) return 0.0;
    const auto& s = *samples_;
    const double K = double(s.rows());
    double sc = 0, sc2 = 0, ss = 0, ss2 = 0;
    for (Eigen::Index r = 0; r < s.rows(); ++r) {
        double ph = 0.0;
        for (int c = 0; c < dim_; ++c) ph += xi[c] * s(r, c);
        const double co = std::cos(2 * kPi * ph), si = std::sin(2 * kPi * ph);
        sc += co;
        sc2 += co * co;
        ss += si;
        ss2 += si * si;
    }
    const double vc = (sc2 - sc * sc / K) / (K - 1);
    const double vs = (ss2 - ss * ss / K) / (K - 1);
    return std::sqrt(std::max(0.0, vc + vs) / K);
}

double CharFunction::tail_bound(double R) const
{
    switch (kind_) {
    case Kind::Coefficients: {
        const TensorBasis& b = *coeffs_->basis;
        double s = 0.0;
        for (std::size_t k : nz_) {
            double lf = 0.0;
            for (int c = 0; c < dim_; ++c) lf += std::lgamma(b.degree(k, c) + 1.0);
            const int d = b.total_degree(k);
            s += std::abs(coeffs_->coeffs(Eigen::Index(k))) * std::pow(2 * kPi, 0.5 * d) * std::exp(-0.5 * lf) *
                 radial_envelope(d, R);
        }
        return s;
    }
    case Kind::Mixture: {
        const double a = 2 * kPi * kPi / std::max(beta1_, beta2_);
        return std::exp(-a * R * R);
    }
    case Kind::Empirical: return 1.0;
    }
    return 1.0;
}

double CharFunction::max_first_moment() const
{
    switch (kind_) {
    case Kind::Coefficients: {
        const TensorBasis& b = *coeffs_->basis;
        double m = 0.0;
        std::vector<std::uint8_t> mi(dim_, 0);
        if (b.cutoff() < 1) return 0.0;
        for (int c = 0; c < dim_; ++c) {
            mi.assign(dim_, 0);
            mi[c] = 1;
            m = std::max(m, std::abs(coeffs_->coeffs(Eigen::Index(b.index_of(mi)))) / std::sqrt(2 * kPi));
        }
        return m;
    }
    case Kind::Mixture: return 0.0;
    case Kind::Empirical: {
        const auto& s = *samples_;
        double m = 0.0;
        for (int c = 0; c < dim_; ++c) {
            const double mean = s.col(c).mean();
            const double sd = std::sqrt((s.col(c).array() - mean).square().sum() / double(s.rows() - 1));
            // excess over a 6-sigma sampling allowance
            m = std::max(m, std::max(0.0, std::abs(mean) - 6 * sd / std::sqrt(double(s.rows()))));
        }
        return m;
    }
    }
    return 0.0;
}

std::optional<std::pair<double, Eigen::MatrixXd>> CharFunction::second_moments() const
{
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim_, dim_);
    switch (kind_) {
    case Kind::Coefficients: {
        const TensorBasis& b = *coeffs_->basis;
        if (b.cutoff() < 2) return std::nullopt;
        auto coef = [&](int i, int di, int j, int dj) {
            std::vector<std::uint8_t> mi(dim_, 0);
            mi[i] = std::uint8_t(di);
            mi[j] = std::uint8_t(mi[j] + dj);
            return coeffs_->coeffs(Eigen::Index(b.index_of(mi)));
        };
        const double c0 = coeffs_->coeffs(0);
        // x^2 = (sqrt2 H2 + 1) / (2 pi), x y = H1(x) H1(y) / (2 pi)
        for (int i = 0; i < dim_; ++i) {
            m(i, i) = (std::sqrt(2.0) * coef(i, 2, i, 0) + c0) / (2 * kPi);
            for (int j = i + 1; j < dim_; ++j) m(i, j) = m(j, i) = coef(i, 1, j, 1) / (2 * kPi);
        }
        return std::pair{c0, m};
    }
    case Kind::Mixture:
        m.diagonal().setConstant(weight_ / beta1_ + (1 - weight_) / beta2_);
        return std::pair{1.0, m};
    case Kind::Empirical: return std::nullopt;
    }
    return std::nullopt;
}

D2Result d2(const CharFunction& f, const CharFunction& g, const SearchConfig& cfg_in, bool use_symmetry)
{
    if (f.dim() != g.dim()) throw std::invalid_argument("d2: dimension mismatch");
    if (f.max_first_moment() > 1e-10 || g.max_first_moment() > 1e-10) {
        throw std::invalid_argument("d2 needs zero first moments");
    }
    SearchConfig cfg = cfg_in;
    if (use_symmetry) {
        cfg.sign_symmetric = cfg.sign_symmetric || (f.even() && g.even());
        cfg.radial = cfg.radial || (f.radial() && g.radial());
        if (cfg.perm_blocks.empty()) cfg.perm_blocks = common_blocks(f.sym_blocks(), g.sym_blocks());
    }
    auto ratio = [&](std::span<const double> xi) {
        double r2 = 0.0;
        for (double x : xi) r2 += x * x;
        // Closer to the origin the difference is lost to cancellation.
        if (r2 < kMinRadius * kMinRadius) return -std::numeric_limits<double>::infinity();
        return std::abs(f(xi) - g(xi)) / r2;
    };

    D2Result res;
    res.search = maximize(ratio, f.dim(), cfg);
    res.lower_bound = res.search.best;
    res.argmax = res.search.argmax;
    const auto mf = f.second_moments(), mg = g.second_moments();
    if (mf && mg && std::abs(mf->first - mg->first) <= 1e-12) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mf->second - mg->second);
        res.small_xi_limit = 2 * kPi * kPi * es.eigenvalues().cwiseAbs().maxCoeff();
        res.lower_bound = std::max(res.lower_bound, res.small_xi_limit);
    }
    res.radius = cfg.half_width;
    const double R = res.radius;
    double env;
    const HermiteState* cf = f.coefficients();
    const HermiteState* cg = g.coefficients();
    if (cf && cg && cf->basis == cg->basis) {
        HermiteState diff{cf->coeffs - cg->coeffs, cf->basis};
        env = CharFunction::from_coefficients(diff).tail_bound(R);
    } else {
        env = f.tail_bound(R) + g.tail_bound(R);
    }
    res.tail_bound = std::min(2.0, env) / (R * R);
    res.certified = res.lower_bound >= res.tail_bound;
    double r2 = 0.0;
    for (double x : res.argmax) r2 += x * x;
    if (r2 > 0) res.stderr = (f.stderr_at(res.argmax) + g.stderr_at(res.argmax)) / r2;
    return res;
}

PropHiResult prop_hi_matrix(const SystemParams& p)
{
    p.validate();
    const int M = p.M;
    auto space = SpectralSpace::make(M, 0, 4);
    const TensorBasis& b = *space.basis;
    const double lam = lambda_total(p);
    const auto op = assemble(p, GeneratorTag::FullT, space);

    const double lead2 = std::sqrt(2.0) * kPi;              // (2 pi) / sqrt(2)
    const double lead4 = 4 * kPi * kPi / std::sqrt(24.0);   // (2 pi)^2 / sqrt(4!)
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(Eigen::Index(b.size()), 4);
    std::vector<std::uint8_t> mi(M);
    for (int i = 0; i < M; ++i) {
        mi.assign(M, 0);
        mi[i] = 4;
        H(Eigen::Index(b.index_of(mi)), 0) += 1.0 / (M * lead4);
        mi[i] = 2;
        H(Eigen::Index(b.index_of(mi)), 2) += 1.0 / (M * lead2);
        for (int j = i + 1; j < M; ++j) {
            mi[j] = 2;
            H(Eigen::Index(b.index_of(mi)), 1) += 2.0 / (M * (M - 1) * lead2 * lead2);
            mi[j] = 0;
        }
    }
    H(0, 3) = 1.0;

    PropHiResult r;
    r.has_h3 = M >= 2;
    std::vector<int> cols = r.has_h3 ? std::vector<int>{0, 1, 2, 3} : std::vector<int>{0, 2, 3};
    const int nc = int(cols.size());
    Eigen::MatrixXd Hc(H.rows(), nc);
    for (int c = 0; c < nc; ++c) Hc.col(c) = H.col(cols[c]);
    Eigen::MatrixXd Y = (op.matrix * Hc) / lam;
    Eigen::MatrixXd Lc = Hc.colPivHouseholderQr().solve(Y);
    if ((Hc * Lc - Y).norm() > 1e-10 * std::max(1.0, Y.norm())) {
        throw std::logic_error("degree-4 symmetric space is not invariant");
    }
    Eigen::MatrixXd Gc = Hc.transpose() * Hc;
    for (int a = 0; a < nc; ++a)
        for (int c = 0; c < nc; ++c) {
            r.L(cols[a], cols[c]) = Lc(a, c);
            r.gram(cols[a], cols[c]) = Gc(a, c);
        }
    r.a << 1.0, 0.0, 3 / kPi, 3 / (4 * kPi * kPi);

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Lc);
    r.norm_euclidean = svd.singularValues()(0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ge(Gc);
    const Eigen::MatrixXd gh = ge.operatorSqrt();
    const Eigen::MatrixXd ghi = ge.operatorInverseSqrt();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd2(gh * Lc * ghi);
    r.norm_l2 = svd2.singularValues()(0);
    r.spectral_radius = Eigen::EigenSolver<Eigen::MatrixXd>(Lc).eigenvalues().cwiseAbs().maxCoeff();
    return r;
}

std::vector<double> moment_recursion(const PropHiResult& r, const Moments& m, int kmax)
{
    const double pi = kPi;
    Eigen::Vector4d pairing;
    pairing << m.E4 - 3 / pi * m.E2 + 3 / (4 * pi * pi), m.E3 - m.E2 / pi + 1 / (4 * pi * pi),
        m.E2 - 1 / (2 * pi), 1.0;
    std::vector<double> out;
    Eigen::Vector4d a = r.a;
    for (int k = 0; k <= kmax; ++k) {
        out.push_back(a.dot(pairing));
        a = r.L * a;
    }
    return out;
}

std::vector<double> fourth_moment_forward(const SystemParams& p, const HermiteState& h0, int kmax)
{
    if (h0.basis->reservoir_coords() != 0) throw std::invalid_argument("forward moments need a v-only state");
    SpectralSpace space{h0.basis, std::make_shared<const RotationBlocks>(h0.basis->cutoff())};
    const auto op = assemble(p, GeneratorTag::FullT, space);
    const double lam = lambda_total(p);
    std::vector<double> out;
    HermiteState h = h0;
    for (int k = 0; k <= kmax; ++k) {
        out.push_back(moments_from_coefficients(h).E4);
        h.coeffs = (op.matrix * h.coeffs) / lam;
    }
    return out;
}

double g_hat(const HermiteState& lk, std::span<const double> xi, double eta)
{
    if (lk.basis->reservoir_coords() != 0) throw std::invalid_argument("g_hat needs a v-only state");
    return g_hat(CharFunction::from_coefficients(lk), 2 * lk.basis->cutoff() + 3, xi, eta);
}

double g_hat(const CharFunction& f, int angular_nodes, std::span<const double> xi, double eta)
{
    const int M = f.dim();
    if (int(xi.size()) != M) throw std::invalid_argument("g_hat: xi has the wrong dimension");
    const auto rule = angular_rule(angular_nodes);
    auto gamma1 = [](double x) { return std::exp(-kPi * x * x); };
    std::vector<double> x(xi.begin(), xi.end());
    cd total = 0.0;
    for (int i = 0; i < M; ++i) {
        cd with = 0.0, without = 0.0;
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
            const double c = std::cos(rule.nodes[k]), s = std::sin(rule.nodes[k]);
            x[i] = xi[i] * c + eta * s;
            with += rule.weights[k] * f(x) * gamma1(-xi[i] * s + eta * c);
            x[i] = xi[i] * c;
            without += rule.weights[k] * f(x) * gamma1(-xi[i] * s);
            x[i] = xi[i];
        }
        total += with - without * gamma1(eta);
    }
    total /= double(M);
    return total.real();
}

} // namespace kaclab
