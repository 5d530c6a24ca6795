#include "kaclab/initial_state.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kaclab {

namespace {

void compose(int pos, int remaining, std::vector<int>& cur, std::vector<std::vector<int>>& out)
{
    if (pos == int(cur.size()) - 1) {
        cur[pos] = remaining;
        out.push_back(cur);
        return;
    }
    for (int k = remaining; k >= 0; --k) {
        cur[pos] = k;
        compose(pos + 1, remaining - k, cur, out);
    }
}

std::vector<HermiteTerm> saturating_terms(int M, int P, double amplitude)
{
    std::vector<HermiteTerm> terms;
    for (auto& c : compositions(M, P)) {
        HermiteTerm t;
        t.degrees.resize(M);
        for (int i = 0; i < M; ++i) t.degrees[i] = 2 * c[i];
        t.coeff = amplitude;
        terms.push_back(std::move(t));
    }
    return terms;
}

int max_term_degree(const std::vector<HermiteTerm>& terms)
{
    int d = 0;
    for (const auto& t : terms) {
        int s = 0;
        for (int n : t.degrees) s += n;
        d = std::max(d, s);
    }
    return d;
}

// sum_terms coeff * prod_i H_{n_i}(v_i)
double eval_terms(const std::vector<HermiteTerm>& terms, std::span<const double> v, int max_deg)
{
    const int M = int(v.size());
    std::vector<double> h((max_deg + 1) * M);
    for (int i = 0; i < M; ++i) hermite_values(max_deg, v[i], std::span<double>(h.data() + i * (max_deg + 1), max_deg + 1));
    double s = 0.0;
    for (const auto& t : terms) {
        double p = t.coeff;
        for (int i = 0; i < M; ++i) p *= h[i * (max_deg + 1) + t.degrees[i]];
        s += p;
    }
    return s;
}

// Visits every point of a uniform grid on [lo, hi]^M.
template <class F>
void for_each_grid_point(int M, double lo, double hi, int points, F&& f)
{
    std::vector<int> idx(M, 0);
    std::vector<double> v(M);
    const double h = points > 1 ? (hi - lo) / (points - 1) : 0.0;
    while (true) {
        for (int i = 0; i < M; ++i) v[i] = lo + idx[i] * h;
        f(std::span<const double>(v));
        int i = 0;
        while (i < M && ++idx[i] == points) idx[i++] = 0;
        if (i == M) break;
    }
}

std::vector<double> mixture_coefficients(const InitialSpec& s, int cutoff)
{
    auto g1 = gaussian_coefficients(s.beta1, cutoff);
    auto g2 = gaussian_coefficients(s.beta2, cutoff);
    for (int n = 0; n <= cutoff; ++n) g1[n] = s.weight * g1[n] + (1 - s.weight) * g2[n];
    return g1;
}

} // namespace

std::string InitialSpec::describe() const
{
    std::ostringstream os;
    switch (kind) {
    case InitialKind::Hermite: os << "hermite(" << terms.size() << " terms)"; break;
    case InitialKind::Gaussian: os << "gaussian(beta_s=" << beta_s << ")"; break;
    case InitialKind::Mixture:
        os << "mixture(beta1=" << beta1 << ", beta2=" << beta2 << ", weight=" << weight << ")";
        break;
    case InitialKind::Saturating: os << "saturating(P=" << P << ", amplitude=" << amplitude << ")"; break;
    }
    return os.str();
}

std::vector<std::vector<int>> compositions(int M, int P)
{
    if (M < 1 || P < 0) throw std::invalid_argument("compositions needs M >= 1, P >= 0");
    std::vector<std::vector<int>> out;
    std::vector<int> cur(M, 0);
    compose(0, P, cur, out);
    return out;
}

std::vector<double> gaussian_coefficients(double beta_s, int cutoff)
{
    if (!(beta_s > 0)) throw std::invalid_argument("gaussian inverse temperature must be > 0");
    // sqrt(2 pi) v ~ N(0, rho2); E He_{2m} = (2m)!/(m! 2^m) (rho2 - 1)^m
    const double rho2 = kBeta / beta_s;
    std::vector<double> c(cutoff + 1, 0.0);
    for (int m = 0; 2 * m <= cutoff; ++m) {
        const double lc = 0.5 * std::lgamma(2 * m + 1.0) - std::lgamma(m + 1.0) - m * std::log(2.0);
        c[2 * m] = std::exp(lc) * std::pow(rho2 - 1.0, m);
    }
    return c;
}

void require_l2(const InitialSpec& spec)
{
    auto check = [](double b, const char* name) {
        if (!(2 * b > kBeta)) {
            throw NotInL2(std::string("h0 is not in L2(Gamma): ") + name + " must exceed pi (2 beta_s > beta)");
        }
    };
    switch (spec.kind) {
    case InitialKind::Gaussian: check(spec.beta_s, "beta_s"); break;
    case InitialKind::Mixture:
        if (spec.weight > 0) check(spec.beta1, "beta1");
        if (spec.weight < 1) check(spec.beta2, "beta2");
        break;
    default: break;
    }
}

double saturating_amplitude(int M, int P, int points_per_axis)
{
    if (points_per_axis <= 0) points_per_axis = M <= 2 ? 501 : M == 3 ? 121 : 41;
    auto terms = saturating_terms(M, P, 1.0);
    double mn = INFINITY;
    // u is even in every coordinate, so [0, 5]^M covers [-5, 5]^M.
    for_each_grid_point(M, 0.0, 5.0, points_per_axis,
                        [&](std::span<const double> v) { mn = std::min(mn, eval_terms(terms, v, 2 * P)); });
    return mn < 0 ? 0.9 / std::abs(mn) : 1.0;
}

HermiteState initial_coefficients(const InitialSpec& spec, BasisPtr basis)
{
    const TensorBasis& b = *basis;
    const int M = b.system_coords();
    HermiteState h = constant_state(basis);
    auto add_terms = [&](const std::vector<HermiteTerm>& terms) {
        std::vector<std::uint8_t> mi(b.num_coords(), 0);
        for (const auto& t : terms) {
            if (int(t.degrees.size()) != M) throw std::invalid_argument("hermite term needs one degree per system particle");
            for (int i = 0; i < M; ++i) {
                if (t.degrees[i] < 0) throw std::invalid_argument("hermite degree must be >= 0");
                mi[i] = std::uint8_t(std::min(t.degrees[i], 255));
            }
            auto k = b.find(mi);
            if (!k) throw std::invalid_argument("initial hermite term exceeds the basis cutoff");
            h.coeffs(Eigen::Index(*k)) += t.coeff;
        }
    };
    auto product = [&](const std::vector<double>& c1) {
        for (std::size_t k = 1; k < b.size(); ++k) {
            if (!b.is_system_only(k)) continue;
            double p = 1.0;
            for (int i = 0; i < M; ++i) p *= c1[b.degree(k, i)];
            h.coeffs(Eigen::Index(k)) = p;
        }
    };
    switch (spec.kind) {
    case InitialKind::Hermite: add_terms(spec.terms); break;
    case InitialKind::Gaussian: product(gaussian_coefficients(spec.beta_s, b.cutoff())); break;
    case InitialKind::Mixture: product(mixture_coefficients(spec, b.cutoff())); break;
    case InitialKind::Saturating: {
        if (2 * spec.P > b.cutoff()) throw std::invalid_argument("saturating state degree 2P exceeds the basis cutoff");
        const double a = spec.amplitude > 0 ? spec.amplitude : saturating_amplitude(M, spec.P);
        add_terms(saturating_terms(M, spec.P, a));
        break;
    }
    }
    return h;
}

Moments moments_from_coefficients(const HermiteState& h)
{
    const TensorBasis& b = *h.basis;
    const int M = b.system_coords();
    if (b.cutoff() < 4) throw std::invalid_argument("moments need a basis cutoff >= 4");
    auto coef = [&](int i, int di, int j, int dj) {
        std::vector<std::uint8_t> mi(b.num_coords(), 0);
        mi[i] = std::uint8_t(di);
        if (j >= 0) mi[j] = std::uint8_t(dj);
        return h.coeffs(Eigen::Index(b.index_of(mi)));
    };
    const double c0 = h.coeffs(0);
    const double tp = 2 * kPi;
    Moments m;
    for (int i = 0; i < M; ++i) {
        // v^2 = (sqrt2 H2 + 1) / (2 pi);  v^4 = sqrt24 H4 / (2 pi)^2 + (3/pi) v^2 - 3/(4 pi^2)
        const double e2 = (std::sqrt(2.0) * coef(i, 2, -1, 0) + c0) / tp;
        const double e4 = std::sqrt(24.0) * coef(i, 4, -1, 0) / (tp * tp) + 3 / kPi * e2 - 3 / (tp * tp) * c0;
        m.E2 += e2 / M;
        m.E4 += e4 / M;
    }
    if (M == 1) {
        m.E3 = m.E2 * m.E2;
    } else {
        for (int i = 0; i < M; ++i)
            for (int j = i + 1; j < M; ++j) {
                const double e = (2 * coef(i, 2, j, 2) + std::sqrt(2.0) * (coef(i, 2, -1, 0) + coef(j, 2, -1, 0)) + c0) /
                                 (tp * tp);
                m.E3 += e / (M * (M - 1) / 2.0);
            }
    }
    return m;
}

Moments analytic_moments(const InitialSpec& spec, int M)
{
    Moments m;
    switch (spec.kind) {
    case InitialKind::Gaussian:
        m.E2 = 1 / spec.beta_s;
        m.E4 = 3 / (spec.beta_s * spec.beta_s);
        m.E3 = m.E2 * m.E2;
        return m;
    case InitialKind::Mixture: {
        const double w = spec.weight;
        m.E2 = w / spec.beta1 + (1 - w) / spec.beta2;
        m.E4 = 3 * (w / (spec.beta1 * spec.beta1) + (1 - w) / (spec.beta2 * spec.beta2));
        m.E3 = m.E2 * m.E2;
        return m;
    }
    case InitialKind::Hermite: {
        const int cutoff = std::max(4, max_term_degree(spec.terms));
        auto basis = std::make_shared<const TensorBasis>(M, 0, cutoff);
        return moments_from_coefficients(initial_coefficients(spec, basis));
    }
    case InitialKind::Saturating: {
        auto basis = std::make_shared<const TensorBasis>(M, 0, std::max(4, 2 * spec.P));
        return moments_from_coefficients(initial_coefficients(spec, basis));
    }
    }
    return m;
}

SystemSampler::SystemSampler(const InitialSpec& spec, int M) : spec_(spec), M_(M)
{
    if (spec.kind == InitialKind::Hermite) poly_terms_ = spec.terms;
    if (spec.kind == InitialKind::Saturating) {
        const double a = spec.amplitude > 0 ? spec.amplitude : saturating_amplitude(M, spec.P);
        spec_.amplitude = a;
        poly_terms_ = saturating_terms(M, spec.P, a);
    }
    if (spec.kind == InitialKind::Mixture && !(spec.weight >= 0 && spec.weight <= 1)) {
        throw std::invalid_argument("mixture weight must lie in [0, 1]");
    }
    for (const auto& t : poly_terms_)
        if (int(t.degrees.size()) != M) throw std::invalid_argument("hermite term needs one degree per system particle");
    if (!poly_terms_.empty()) {
        // Bound on h0(v) * kappa^M * exp(-pi (1 - 1/kappa^2) |v|^2) over a grid.
        const int points = std::min(2001, std::max(9, int(std::pow(2e6, 1.0 / M))));
        double mx = 0.0;
        for_each_grid_point(M, -6.0, 6.0, points | 1, [&](std::span<const double> v) {
            double r2 = 0.0;
            for (double x : v) r2 += x * x;
            mx = std::max(mx, h0(v) * std::exp(-kPi * 0.75 * r2));
        });
        bound_ = 1.1 * std::pow(2.0, M) * mx;
    }
}

double SystemSampler::h0(std::span<const double> v) const
{
    return 1.0 + eval_terms(poly_terms_, v, std::max(1, max_term_degree(poly_terms_)));
}

void SystemSampler::sample(std::mt19937_64& rng, std::span<double> v) const
{
    switch (spec_.kind) {
    case InitialKind::Gaussian: {
        std::normal_distribution<double> g(0.0, 1.0 / std::sqrt(spec_.beta_s));
        for (auto& x : v) x = g(rng);
        return;
    }
    case InitialKind::Mixture: {
        std::normal_distribution<double> g1(0.0, 1.0 / std::sqrt(spec_.beta1));
        std::normal_distribution<double> g2(0.0, 1.0 / std::sqrt(spec_.beta2));
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (auto& x : v) x = u(rng) < spec_.weight ? g1(rng) : g2(rng);
        return;
    }
    default: break;
    }
    const double kappa = 2.0;
    std::normal_distribution<double> prop(0.0, kappa / std::sqrt(kBeta));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int attempt = 0; attempt < 10000000; ++attempt) {
        double r2 = 0.0;
        for (auto& x : v) {
            x = prop(rng);
            r2 += x * x;
        }
        const double h = h0(v);
        if (h < 0) throw std::invalid_argument("initial state is negative at a sampled point; lower the amplitude");
        const double ratio = std::pow(kappa, M_) * h * std::exp(-kPi * (1 - 1 / (kappa * kappa)) * r2) / bound_;
        if (ratio > 1.0) throw std::runtime_error("rejection sampler bound exceeded");
        if (u(rng) < ratio) return;
    }
    throw std::runtime_error("rejection sampler did not accept within the attempt cap");
}

void sample_reservoir(std::mt19937_64& rng, std::span<double> w)
{
    std::normal_distribution<double> g(0.0, 1.0 / std::sqrt(kBeta));
    for (auto& x : w) x = g(rng);
}

} // namespace kaclab
