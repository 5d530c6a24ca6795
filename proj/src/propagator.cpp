#include "kaclab/propagator.hpp"

#include <cmath>
#include <string>

namespace kaclab {

namespace {

double log_poisson(int n, double x)
{
    if (x == 0.0) return n == 0 ? 0.0 : -INFINITY;
    return -x + n * std::log(x) - std::lgamma(n + 1.0);
}

// Upper bound on sum_{m > n} p_m(x), valid once n + 1 > x.
double poisson_tail(int n, double x)
{
    const double r = x / (n + 1.0);
    if (r >= 1.0) return INFINITY;
    return std::exp(log_poisson(n, x)) * r / (1.0 - r);
}

void require_full(const GeneratorMatrix& q)
{
    if (q.tag != GeneratorTag::FullFR && q.tag != GeneratorTag::FullT) {
        throw std::invalid_argument("evolve needs a FULL_FR or FULL_T generator, got " + to_string(q.tag));
    }
}

} // namespace

HermiteState constant_state(BasisPtr basis)
{
    HermiteState s{Eigen::VectorXd::Zero(Eigen::Index(basis->size())), basis};
    s.coeffs(0) = 1.0;
    return s;
}

HermiteState evolve(const HermiteState& state, const GeneratorMatrix& q_total, double t, const SeriesOptions& opts)
{
    return evolve_grid(state, q_total, {t}, opts).front();
}

std::vector<HermiteState> evolve_grid(const HermiteState& state, const GeneratorMatrix& q_total,
                                      const std::vector<double>& times, const SeriesOptions& opts)
{
    require_full(q_total);
    if (state.coeffs.size() != q_total.matrix.cols()) throw std::invalid_argument("state/generator size mismatch");
    const double lambda = lambda_total(q_total.params);
    const double hnorm = state.coeffs.norm();

    std::vector<Eigen::VectorXd> powers{state.coeffs};
    auto power = [&](int n) -> const Eigen::VectorXd& {
        while (int(powers.size()) <= n) {
            Eigen::VectorXd next = q_total.matrix * powers.back();
            powers.push_back(next / lambda);
        }
        return powers[n];
    };

    std::vector<HermiteState> out;
    out.reserve(times.size());
    for (double t : times) {
        if (!(t >= 0)) throw std::invalid_argument("evolve: t must be >= 0");
        const double x = lambda * t;
        HermiteState r{Eigen::VectorXd::Zero(state.coeffs.size()), state.basis};
        if (x == 0.0) {
            r.coeffs = state.coeffs;
            out.push_back(std::move(r));
            continue;
        }
        double tail = INFINITY;
        int n = 0;
        for (;; ++n) {
            r.coeffs += std::exp(log_poisson(n, x)) * power(n);
            if (n + 1 > x) {
                tail = poisson_tail(n, x) * hnorm;
                if (tail < opts.tol) break;
            }
            if (n >= opts.max_terms) {
                throw SeriesNotConverged("uniformization series did not reach tol " + std::to_string(opts.tol) +
                                             " within " + std::to_string(opts.max_terms) + " terms",
                                         tail);
            }
        }
        out.push_back(std::move(r));
    }
    return out;
}

SemigroupPair SemigroupPair::build(const SystemParams& params, int cutoff, std::size_t max_size)
{
    SemigroupPair p;
    p.params = params;
    p.space = SpectralSpace::make(params.M, params.N, cutoff, max_size);
    p.lambda = lambda_total(params);
    p.fr = assemble(params, GeneratorTag::FullFR, p.space);
    p.th = assemble(params, GeneratorTag::FullT, p.space);
    p.diff = p.fr.matrix - p.th.matrix;
    return p;
}

HermiteState difference_series(const SemigroupPair& pair, const HermiteState& h0, double t, const SeriesOptions& opts)
{
    if (!(t >= 0)) throw std::invalid_argument("difference_series: t must be >= 0");
    const double lambda = pair.lambda;
    Eigen::VectorXd u0 = h0.coeffs;
    u0(0) -= 1.0;
    HermiteState r{Eigen::VectorXd::Zero(u0.size()), h0.basis};
    const double x = lambda * t;
    const double unorm = u0.norm();
    if (x == 0.0 || unorm == 0.0) return r;

    Eigen::VectorXd s = Eigen::VectorXd::Zero(u0.size());
    Eigen::VectorXd y = u0;
    double tail = INFINITY;
    for (int n = 1;; ++n) {
        // s_n = (A s_{n-1} + D y_{n-1}) / Lambda,  y_n = B y_{n-1} / Lambda
        Eigen::VectorXd s_next = (pair.fr.matrix * s + pair.diff * y) / lambda;
        Eigen::VectorXd y_next = (pair.th.matrix * y) / lambda;
        s.swap(s_next);
        y.swap(y_next);
        r.coeffs += std::exp(log_poisson(n, x)) * s;
        if (n + 1 > x) {
            tail = 2.0 * unorm * poisson_tail(n, x);
            if (tail < opts.tol) break;
        }
        if (n >= opts.max_terms) {
            throw SeriesNotConverged("difference series did not reach tol " + std::to_string(opts.tol), tail);
        }
    }
    return r;
}

double difference_term_norm(const SemigroupPair& pair, const Eigen::VectorXd& u0, int n, int k)
{
    if (k < 0 || k >= n) throw std::invalid_argument("difference_term_norm needs 0 <= k < n");
    Eigen::VectorXd x = u0;
    for (int i = 0; i < k; ++i) x = pair.th.matrix * x;
    x = pair.diff * x;
    for (int i = 0; i < n - k - 1; ++i) x = pair.fr.matrix * x;
    return x.norm();
}

std::vector<Eigen::VectorXd> radial_basis(const TensorBasis& basis)
{
    std::vector<Eigen::VectorXd> out;
    for (int m = 0; 2 * m <= basis.cutoff(); ++m) {
        Eigen::VectorXd r = Eigen::VectorXd::Zero(Eigen::Index(basis.size()));
        for (std::size_t k = 0; k < basis.size(); ++k) {
            if (basis.total_degree(k) != 2 * m) continue;
            double c = 1.0;
            bool even = true;
            for (int i = 0; i < basis.num_coords() && even; ++i) {
                const int d = basis.degree(k, i);
                if (d % 2) {
                    even = false;
                    break;
                }
                // sqrt((2j)!) / j!
                c *= std::exp(0.5 * std::lgamma(d + 1.0) - std::lgamma(d / 2 + 1.0));
            }
            if (even) r(Eigen::Index(k)) = c;
        }
        r.normalize();
        out.push_back(std::move(r));
    }
    return out;
}

HermiteState steady_state(const HermiteState& h0)
{
    HermiteState r{Eigen::VectorXd::Zero(h0.coeffs.size()), h0.basis};
    for (const auto& v : radial_basis(*h0.basis)) r.coeffs += v.dot(h0.coeffs) * v;
    return r;
}

HermiteState steady_state_iterative(const HermiteState& h0, const RotationBlocks& rot, double tol, int max_iter)
{
    const TensorBasis& basis = *h0.basis;
    const int n = basis.num_coords();
    HermiteState r = h0;
    if (n < 2) return r;
    SparseMatrix avg{Eigen::Index(basis.size()), Eigen::Index(basis.size())};
    for (int p = 0; p < n; ++p)
        for (int q = p + 1; q < n; ++q) avg += pair_projector(basis, rot, p, q);
    avg /= double(n * (n - 1) / 2);

    double prev_step = INFINITY;
    for (int it = 0; it < max_iter; ++it) {
        Eigen::VectorXd next = avg * r.coeffs;
        const double step = (next - r.coeffs).norm();
        r.coeffs.swap(next);
        const double ratio = step / prev_step;
        prev_step = step;
        if (step == 0.0) return r;
        if (it > 0 && ratio < 1.0 && step * ratio / (1.0 - ratio) < tol) return r;
    }
    throw SeriesNotConverged("pair-average iteration did not converge", prev_step);
}

} // namespace kaclab
