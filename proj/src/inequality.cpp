#include "kaclab/inequality.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "kaclab/hermite.hpp"
#include "kaclab/sup_search.hpp"

namespace kaclab {

namespace {

// sup_{|x| >= R} |x|^d exp(-s x^2)
double poly_gauss_sup(int d, double s, double R)
{
    const double x2 = std::max(R * R, d / (2 * s));
    return std::pow(x2, 0.5 * d) * std::exp(-s * x2);
}

double interval_for(double s) { return std::sqrt(40.0 / s); }

int grid_for(int N)
{
    switch (N) {
    case 1: return 4001;
    case 2: return 401;
    case 3: return 65;
    case 4: return 33;
    default: return 17;
    }
}

// Best of a 1D search of g over (0, hw].
std::pair<double, double> search_1d(const std::function<double(double)>& g, double hw, int points = 801)
{
    SearchConfig cfg;
    cfg.grid_points = points;
    cfg.half_width = hw;
    cfg.sign_symmetric = true;
    cfg.refine_rounds = 40;
    cfg.starts = 8;
    auto r = maximize([&](std::span<const double> x) { return g(x[0]); }, 1, cfg);
    return {r.best, r.argmax[0]};
}

bool layer(DnBoundsReport& rep, const std::string& name, double lhs, double rhs, bool le)
{
    InequalityLayer l;
    l.name = name;
    l.lhs = lhs;
    l.rhs = rhs;
    l.slack = le ? rhs - lhs : lhs - rhs;
    l.pass = l.slack >= -1e-12 * std::max({1.0, std::abs(lhs), std::abs(rhs)});
    rep.layers.push_back(l);
    rep.pass = rep.pass && l.pass;
    return l.pass;
}

} // namespace

void TestFunction::validate() const
{
    if (!f || !tail_sup) throw std::invalid_argument("test function " + name + " needs an evaluator and a tail envelope");
    if (!(interval > 0)) throw std::invalid_argument("test function " + name + " needs a positive interval");
    if (vanishes_at_zero && std::abs(f(0.0)) > 1e-14) {
        throw std::invalid_argument("test function " + name + " claims H(0) = 0 but H(0) = " + std::to_string(f(0.0)));
    }
    if (!vanishes_at_zero || !even) throw std::invalid_argument("test function " + name + " must be even with H(0) = 0");
    for (int k = 1; k <= 64; ++k) {
        const double x = interval * k / 64.0 * 0.987;
        if (std::abs(f(x) - f(-x)) > 1e-12 * std::max(1.0, std::abs(f(x)))) {
            throw std::invalid_argument("test function " + name + " claims to be even but is not");
        }
    }
}

TestFunction bump(double A, double s)
{
    TestFunction t;
    t.name = "bump(A=" + std::to_string(A) + ",s=" + std::to_string(s) + ")";
    t.f = [A, s](double x) { return A * x * x * std::exp(-s * x * x); };
    t.tail_sup = [A, s](double R) { return std::abs(A) * poly_gauss_sup(2, s, R); };
    t.interval = interval_for(s);
    return t;
}

TestFunction quartic(double b, double c, double s)
{
    TestFunction t;
    t.name = "quartic(b=" + std::to_string(b) + ",c=" + std::to_string(c) + ",s=" + std::to_string(s) + ")";
    t.f = [b, c, s](double x) { return (b * x * x - c * x * x * x * x) * std::exp(-s * x * x); };
    t.tail_sup = [b, c, s](double R) { return std::abs(b) * poly_gauss_sup(2, s, R) + std::abs(c) * poly_gauss_sup(4, s, R); };
    t.interval = interval_for(s);
    return t;
}

TestFunction oscillating(double omega, double s)
{
    TestFunction t;
    t.name = "oscillating(omega=" + std::to_string(omega) + ",s=" + std::to_string(s) + ")";
    t.f = [omega, s](double x) {
        const double h = std::sin(0.5 * omega * x);
        return 2 * h * h * std::exp(-s * x * x);
    };
    t.tail_sup = [s](double R) { return 2 * std::exp(-s * R * R); };
    t.interval = interval_for(s);
    return t;
}

TestFunction h_r(double r)
{
    TestFunction t;
    t.name = "h_r(r=" + std::to_string(r) + ")";
    t.f = [r](double x) { return x * x * x * x * std::exp(-r * x * x); };
    t.tail_sup = [r](double R) { return poly_gauss_sup(4, r, R); };
    t.interval = interval_for(r);
    return t;
}

C4Estimate estimate_c4(const std::function<double(double)>& f, double interval, int points, double abs_tol)
{
    C4Estimate est;
    double h0 = interval / 100.0;
    for (int attempt = 0; attempt <= 6; ++attempt, h0 *= 0.5) {
        std::vector<double> sup(5, 0.0), sup_coarse(5, 0.0);
        double worst_diff[5] = {0, 0, 0, 0, 0};
        for (int i = 0; i < points; ++i) {
            const double x = -interval + 2 * interval * i / (points - 1);
            const double f0 = f(x);
            sup[0] = std::max(sup[0], std::abs(f0));
            double D[5][5]; // [order][width]
            for (int k = 0; k < 5; ++k) {
                const double h = h0 / std::pow(2.0, k);
                const double p1 = f(x + h), m1 = f(x - h), p2 = f(x + 2 * h), m2 = f(x - 2 * h);
                D[1][k] = (p1 - m1) / (2 * h);
                D[2][k] = (p1 - 2 * f0 + m1) / (h * h);
                D[3][k] = (p2 - 2 * p1 + 2 * m1 - m2) / (2 * h * h * h);
                D[4][k] = (p2 - 4 * p1 + 6 * f0 - 4 * m1 + m2) / (h * h * h * h);
            }
            for (int p = 1; p <= 4; ++p) {
                const double r2 = (4 * D[p][3] - D[p][2]) / 3;
                const double r3 = (4 * D[p][4] - D[p][3]) / 3;
                sup[p] = std::max(sup[p], std::abs(r3));
                sup_coarse[p] = std::max(sup_coarse[p], std::abs(r2));
                worst_diff[p] = std::max(worst_diff[p], std::abs(r3 - r2));
            }
        }
        est.consistency = 0.0;
        bool ok = true;
        for (int p = 1; p <= 4; ++p) {
            if (sup[p] > 0) est.consistency = std::max(est.consistency, worst_diff[p] / sup[p]);
            ok = ok && worst_diff[p] <= 1e-4 * sup[p] + abs_tol;
        }
        est.per_order = sup;
        est.value = *std::max_element(sup.begin(), sup.end());
        est.refinements = attempt;
        if (ok) return est;
    }
    throw CertificationError("C4 finite differences did not reach 1e-4 consistency");
}

D1Result d1(const TestFunction& h, double a)
{
    if (a < 0) throw std::invalid_argument("d1 needs a >= 0");
    auto [best, arg] = search_1d([&](double x) { return std::abs(h(x)) / (a * a + x * x); }, h.interval, 4001);
    D1Result r;
    r.value = best;
    r.argmax = arg;
    r.tail = h.tail_sup(h.interval) / (a * a + h.interval * h.interval);
    if (r.tail > r.value) {
        throw CertificationError("d1: tail envelope " + std::to_string(r.tail) + " exceeds the supremum found for " + h.name);
    }
    return r;
}

double dn_objective(const TestFunction& h, double a, const std::vector<double>& eta)
{
    double r2 = 0.0;
    for (double x : eta) r2 += x * x;
    if (r2 == 0.0) return 0.0;
    double s = 0.0;
    for (double x : eta) s += h(x) * std::exp(-kPi * (r2 - x * x));
    return std::abs(s) / (a * a + r2);
}

std::optional<double> eta0(double d1_zero, double d1_a, double a)
{
    if (!(d1_zero > d1_a) || a == 0.0) return std::nullopt;
    return std::sqrt(d1_a * a * a / (d1_zero - d1_a));
}

TestFunction majorant(double d1_zero, double d1_a, double a, double interval)
{
    TestFunction t;
    t.name = "majorant";
    t.f = [=](double x) { return std::min(d1_zero * x * x, d1_a * (a * a + x * x)); };
    t.tail_sup = [=](double R) { return d1_a * (a * a + R * R); };
    t.interval = interval;
    return t;
}

double dn_majorant_structured(double d1_zero, double d1_a, double a, int N)
{
    const auto e0 = eta0(d1_zero, d1_a, a);
    if (!e0) throw std::invalid_argument("eta0 undefined: D1(H,0) must exceed D1(H,a) with a > 0");
    const double q = *e0 * *e0;
    double best = 0.0;
    for (int k = 0; k < N; ++k) {
        auto g = [&](double eta) {
            const double y = eta * eta;
            const double num = k * q * std::exp(-kPi * ((k - 1) * q + y)) + y * std::exp(-kPi * k * q);
            return num / (a * a + k * q + y);
        };
        best = std::max(best, search_1d(g, *e0).first);
        best = std::max(best, g(*e0));
    }
    best = std::max(best, N * q * std::exp(-kPi * (N - 1) * q) / (a * a + N * q));
    return d1_zero * best;
}

DnResult dn(const TestFunction& h, double a, int N, DnMode mode)
{
    if (N < 1) throw std::invalid_argument("dn needs N >= 1");
    DnResult res;
    const double L = h.interval;
    if (mode != DnMode::Random) {
        // equal-coordinate configurations (x,..,x,0,..)
        for (int k = 1; k <= N; ++k) {
            auto [v, x] = search_1d([&](double x) { return dn_objective(h, a, std::vector<double>(k, x)); }, L, 2001);
            if (v > res.structured) {
                res.structured = v;
                res.argmax.assign(N, 0.0);
                std::fill(res.argmax.begin(), res.argmax.begin() + k, x);
            }
        }
        const double z = d1(h, 0.0).value, da = d1(h, a).value;
        res.eta0 = eta0(z, da, a);
        if (!res.eta0) {
            res.structured_skipped = true;
        } else {
            const double e = *res.eta0;
            for (int k = 0; k < N; ++k) {
                auto cfgv = [&](double x) {
                    std::vector<double> eta(N, 0.0);
                    std::fill(eta.begin(), eta.begin() + k, e);
                    eta[k] = x;
                    return eta;
                };
                auto [v, x] = search_1d([&](double x) { return dn_objective(h, a, cfgv(x)); }, e);
                if (v > res.structured) {
                    res.structured = v;
                    res.argmax = cfgv(x);
                }
            }
        }
    }
    if (mode != DnMode::Structured) {
        SearchConfig cfg;
        cfg.grid_points = grid_for(N);
        cfg.half_width = L;
        cfg.sign_symmetric = true;
        cfg.perm_blocks = {N};
        cfg.max_evals = 20000;
        cfg.starts = 16;
        cfg.refine_rounds = 25;
        std::vector<double> buf(N);
        auto r = maximize(
            [&](std::span<const double> x) {
                std::copy(x.begin(), x.end(), buf.begin());
                return dn_objective(h, a, buf);
            },
            N, cfg);
        res.random = r.best;
        if (r.best > res.structured) res.argmax = r.argmax;
    }
    res.value = std::max(res.structured, res.random);
    return res;
}

DnBoundsReport check_dn_bounds(const TestFunction& h, double a, int N)
{
    h.validate();
    if (a < 0 || N < 1) throw std::invalid_argument("check_dn_bounds needs a >= 0 and N >= 1");
    DnBoundsReport rep;
    rep.function = h.name;
    rep.a = a;
    rep.N = N;
    rep.c4 = std::isnan(h.c4) ? estimate_c4(h.f, h.interval).value : h.c4;
    rep.d1_zero = d1(h, 0.0).value;
    rep.d1_a = d1(h, a).value;
    rep.dn = N == 1 ? rep.d1_a : dn(h, a, N).value;
    const double C4 = rep.c4, z = rep.d1_zero, da = rep.d1_a;

    layer(rep, "dn-sqrt-c4", rep.dn, std::sqrt((8 * C4 + da) * da), true);
    layer(rep, "dn-n-free", rep.dn, std::max(da, 2 * z / (1 + kPi / 2 * a * a)), true);
    layer(rep, "d1a-lower", da, z * z / (1.5 * C4 * a * a + 4 * z), false);
    layer(rep, "d1a-lower-c4", da, 2 * z * z / C4 / (3 * a * a + 4), false);
    layer(rep, "2D1(H,0)<=C4", 2 * z, C4, true);
    layer(rep, "dn-le-n-d1a", rep.dn, N * da, true);
    layer(rep, "dn-le-d1-zero", rep.dn, z, true);

    rep.eta0 = eta0(z, da, a);
    if (rep.eta0) {
        const double e2 = *rep.eta0 * *rep.eta0;
        const double left = z * e2, right = da * (a * a + e2);
        rep.eta0_continuity = std::abs(left - right) / std::max(1.0, right);
        layer(rep, "eta0-continuity", rep.eta0_continuity, 1e-10, true);
        if (N > 1) {
            const double structured = dn_majorant_structured(z, da, a, N);
            const double random = dn(majorant(z, da, a, h.interval), a, N, DnMode::Random).value;
            layer(rep, "majorant-structured", random, structured * (1 + 1e-6), true);
        }
    }
    return rep;
}

double counterexample_ratio(double r, int N, double a)
{
    if (!(r > 0)) throw std::invalid_argument("counterexample_ratio needs r > 0");
    const auto h = h_r(r);
    const double one = d1(h, a).value;
    const double many = N == 1 ? one : dn(h, a, N).value;
    return many / one;
}

std::vector<TestFunction> corpus(std::uint64_t seed, int count)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto in = [&](double lo, double hi) { return lo + (hi - lo) * u(rng); };
    std::vector<TestFunction> out;
    for (int i = 0; i < count; ++i) {
        switch (i % 4) {
        case 0: out.push_back(bump(in(0.2, 3.0), in(0.3, 5.0))); break;
        case 1: out.push_back(quartic(in(0.2, 3.0), in(-1.0, 2.0), in(0.5, 4.0))); break;
        case 2: out.push_back(oscillating(in(0.5, 4.0), in(0.3, 3.0))); break;
        default: out.push_back(h_r(std::exp(in(std::log(0.1), std::log(100.0))))); break;
        }
    }
    return out;
}

} // namespace kaclab
