// Acceptance suite: one PASS/FAIL line per criterion.
//   kaclab_acceptance [--criterion N]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <string>

#include "kaclab/dsmc.hpp"
#include "kaclab/experiments.hpp"
#include "kaclab/inequality.hpp"
#include "kaclab/metrics.hpp"
#include "kaclab/operators.hpp"
#include "kaclab/saturation.hpp"

using namespace kaclab;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

std::string fmt(const char* f, double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::size_t failed_records(const ExperimentReport& r)
{
    std::size_t n = 0;
    for (const auto& x : r.records) n += x.pass ? 0 : 1;
    return n;
}

double worst_margin(const ExperimentReport& r, const std::string& label_prefix = {})
{
    double m = INFINITY;
    for (const auto& x : r.records)
        if (x.label.rfind(label_prefix, 0) == 0) m = std::min(m, x.margin);
    return m;
}

Eigen::VectorXd random_v_only(const TensorBasis& b, std::mt19937_64& rng, bool mean_zero)
{
    std::normal_distribution<double> g;
    Eigen::VectorXd u = Eigen::VectorXd::Zero(Eigen::Index(b.size()));
    for (std::size_t k = 0; k < b.size(); ++k)
        if (b.is_system_only(k)) u(Eigen::Index(k)) = g(rng);
    if (mean_zero) u(0) = 0.0;
    return u;
}

Outcome criterion1()
{
    Outcome o;
    for (auto [M, N] : {std::pair{1, 2}, std::pair{2, 2}, std::pair{2, 4}}) {
        Config cfg;
        cfg.set("params.M", std::to_string(M));
        cfg.set("params.N", std::to_string(N));
        cfg.set("spectral.cutoff", "8");
        cfg.set("state.terms", "2:0.1");
        const auto t0 = std::chrono::steady_clock::now();
        const auto rep = verify_thm1(cfg);
        const double secs = seconds_since(t0);
        const std::string tag = "(" + std::to_string(M) + "," + std::to_string(N) + ")";
        o.require(rep.pass(), tag + " " + std::to_string(failed_records(rep)) + " grid points violate the bound");
        o.require(secs < 60, tag + " took " + fmt("%.1f s", secs));
        o.detail += (o.detail.empty() ? "" : ", ") + tag + " min slack " + fmt("%.3g", worst_margin(rep)) + " in " +
                    fmt("%.2f s", secs);
    }
    return o;
}

Outcome criterion2()
{
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentReport rep;
    try {
        rep = verify_thm2(Config{});
    } catch (const CertificationError& e) {
        o.require(false, std::string("certification: ") + e.what());
        return o;
    }
    const double secs = seconds_since(t0);
    o.require(failed_records(rep) == 0, std::to_string(failed_records(rep)) + " records fail");
    o.require(secs < 300, "took " + fmt("%.1f s", secs));
    o.detail = "d2(l0, Gamma) = " + fmt("%.4g", rep.meta["d2_initial"].get<double>()) + ", min slack on the grid " +
               fmt("%.3g", worst_margin(rep, "d2")) + ", contraction slack " +
               fmt("%.3g", worst_margin(rep, "contraction")) + ", " + fmt("%.1f s", secs) +
               (o.pass ? "" : "; " + o.detail);
    return o;
}

Outcome criterion3()
{
    Outcome o;
    std::mt19937_64 rng(3);
    double worst = 0.0;
    for (auto [M, N] : {std::pair{1, 2}, std::pair{2, 3}}) {
        auto space = SpectralSpace::make(M, N, 6);
        const auto& b = *space.basis;
        for (int s = 0; s < 20; ++s) {
            const Eigen::VectorXd u = random_v_only(b, rng, false);
            for (int i = 0; i < M; ++i) {
                SparseMatrix avg{Eigen::Index(b.size()), Eigen::Index(b.size())};
                for (int j = M; j < M + N; ++j) avg += pair_projector(b, *space.rotations, i, j);
                avg /= double(N);
                const Eigen::VectorXd tu = thermostat_operator(b, i) * u;
                const double lhs = (avg * u - tu).squaredNorm();
                const double rhs = (tu.dot(u) - tu.squaredNorm()) / N;
                worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, rhs));
            }
        }
    }
    o.require(worst <= 1e-10, "identity residual " + fmt("%.3g", worst));
    o.detail = "largest relative residual " + fmt("%.3g", worst) + " over 40 states" + (o.pass ? "" : "; " + o.detail);
    return o;
}

Outcome criterion4()
{
    Outcome o;
    double eig_err = 0.0;
    std::mt19937_64 rng(4);
    double worst_qt = -INFINITY;
    for (auto p : {SystemParams{1, 2, 1, 1, 1}, SystemParams{2, 3, 1, 1, 1}, SystemParams{3, 2, 0.5, 1, 2}}) {
        auto space = SpectralSpace::make(p.M, p.N, 6);
        const auto th = assemble(p, GeneratorTag::FullT, space);
        eig_err = std::max(eig_err, std::abs(max_eigenvalue_by_degree(th.matrix, *space.basis) - lambda_total(p)));
        const auto qt = assemble(p, GeneratorTag::QT, space);
        for (int s = 0; s < 100; ++s) {
            const Eigen::VectorXd u = random_v_only(*space.basis, rng, true);
            worst_qt = std::max(worst_qt, (qt.matrix * u).norm() - p.mu * (p.M - 0.5) * u.norm());
        }
    }
    o.require(eig_err <= 1e-10, "top eigenvalue off by " + fmt("%.3g", eig_err));
    o.require(thermostat_eigenvalue(0) == 1.0, "a(0) != 1");
    double amax = 0.0;
    for (int n = 1; n <= 4; ++n) amax = std::max(amax, thermostat_eigenvalue(n));
    o.require(amax <= 0.5, "a(n) > 1/2");
    o.require(worst_qt <= 1e-12, "mean-zero Q_T bound exceeded by " + fmt("%.3g", worst_qt));
    o.detail = "|top eig - Lambda| = " + fmt("%.2g", eig_err) + ", max a(1..4) = " + fmt("%.4g", amax) +
               ", worst |Q_T u| - mu(M-1/2)|u| = " + fmt("%.3g", worst_qt) + (o.pass ? "" : "; " + o.detail);
    return o;
}

Outcome criterion5()
{
    Outcome o;
    std::string info;
    for (auto [M, N] : {std::pair{1, 4}, std::pair{2, 5}}) {
        Config cfg;
        cfg.set("params.M", std::to_string(M));
        cfg.set("params.N", std::to_string(N));
        cfg.set("spectral.cutoff", "8");
        const auto rep = verify_steady(cfg);
        const std::string tag = "(" + std::to_string(M) + "," + std::to_string(N) + ")";
        const double l2 = worst_margin(rep, "L2"), d2m = worst_margin(rep, "d2"), match = worst_margin(rep, "long-time");
        bool l2_ok = true, d2_ok = true;
        for (const auto& x : rep.records) {
            if (x.label.rfind("L2", 0) == 0) l2_ok = l2_ok && x.pass;
            if (x.label.rfind("d2", 0) == 0) d2_ok = d2_ok && x.pass;
        }
        o.require(l2_ok, tag + " L2 bound violated");
        o.require(d2_ok, tag + " d2 bound violated");
        double err = 0.0;
        for (const auto& x : rep.records)
            if (x.label.rfind("long-time", 0) == 0) err = std::max(err, x.measured);
        o.require(match >= 0, tag + " t=50/Lambda residual " + fmt("%.3g", err) + " > 1e-6");
        info += (info.empty() ? "" : ", ") + tag + " L2 slack " + fmt("%.3g", l2) + ", d2 slack " + fmt("%.3g", d2m);
    }
    o.detail = info + (o.pass ? "" : "; " + o.detail);
    return o;
}

Outcome criterion6()
{
    Outcome o;
    const auto rep = inequality_experiment(Config{});
    double eta = 0.0;
    double slack = INFINITY;
    for (const auto& x : rep.records) {
        if (x.label.find("eta0-continuity") != std::string::npos) eta = std::max(eta, x.measured);
        else if (x.label.find("D_N/D_1") == std::string::npos) slack = std::min(slack, x.margin);
    }
    o.require(failed_records(rep) == 0, std::to_string(failed_records(rep)) + " layer checks fail");
    o.require(eta <= 1e-10, "eta0 continuity " + fmt("%.3g", eta));
    o.detail = std::to_string(rep.meta["cases"].get<std::size_t>()) + " cases, min slack " + fmt("%.3g", slack) +
               ", eta0 continuity " + fmt("%.2g", eta) + (o.pass ? "" : "; " + o.detail);
    return o;
}

Outcome criterion7()
{
    Outcome o;
    std::string info;
    for (int N : {2, 4, 8})
        for (double r : {1.0, 10.0, 100.0, 1000.0}) {
            const double q = counterexample_ratio(r, N, 1.0);
            o.require(q <= N * (1 + 1e-12), "ratio " + fmt("%.4g", q) + " > N at r=" + fmt("%g", r));
        }
    const double q = counterexample_ratio(1e3, 4, 1.0);
    o.require(q >= 0.9 * 4, "ratio at r=1e3 only " + fmt("%.4g", q));
    o.detail = "D_4/D_1 at r=1e3, a=1: " + fmt("%.4f", q) + (o.pass ? "" : "; " + o.detail);
    return o;
}

Outcome criterion8()
{
    Outcome o;
    const auto c = cross_term(2, 2);
    o.require(std::abs(c.value - 11.0 / 8.0) <= 1e-9, "cross term of u-bar is " + fmt("%.12f", c.value) + ", not 11/8");
    std::string ratios;
    for (auto [M, P] : {std::pair{2, 2}, std::pair{3, 3}}) {
        const auto x = cross_term(M, P);
        o.require(x.ratio_norm2 >= kSaturationC, "ratio below 3/128 at M=" + std::to_string(M));
        ratios += fmt(" %.4f", x.ratio_norm2);
    }
    const SystemParams p{2, 4, 1, 1, 1};
    const auto r = saturation_experiment(p, 2, {});
    o.require(r.slope >= r.slope_bound, "initial slope below the bound");
    o.detail = "value/|u|^2 at (2,2),(3,3):" + ratios + "; slope " + fmt("%.4f", r.slope) + " >= " +
               fmt("%.4f", r.slope_bound) + (o.pass ? "" : "; " + o.detail);
    return o;
}

Outcome criterion9()
{
    Outcome o;
    // v^4 = H4 + (3/pi) H2 + 3/(4 pi^2) in monic polynomials for e^{-pi v^2}
    const auto pr = prop_hi_matrix({2, 4, 1, 1, 1});
    HermiteBasis1D hb(4);
    double a_err = 0.0;
    for (double v : {-2.0, -0.7, 0.1, 0.9, 1.6}) {
        const double rep = pr.a(0) * hb.eval_monic(4, v) + pr.a(1) * hb.eval_monic(3, v) + pr.a(2) * hb.eval_monic(2, v) +
                           pr.a(3) * hb.eval_monic(0, v);
        a_err = std::max(a_err, std::abs(rep - std::pow(v, 4)));
    }
    o.require(a_err <= 1e-12, "a does not reproduce v^4");
    double norm = 0.0, worst_e4 = -INFINITY;
    for (auto p : {SystemParams{1, 2, 1, 1, 1}, SystemParams{2, 4, 1, 1, 1}, SystemParams{4, 40, 1, 1, 1}}) {
        norm = std::max(norm, prop_hi_matrix(p).norm_l2);
        std::vector<InitialSpec> menu(5);
        menu[0].kind = InitialKind::Gaussian;
        menu[0].beta_s = 4.0;
        menu[1].kind = InitialKind::Gaussian;
        menu[1].beta_s = 12.0;
        menu[2].kind = InitialKind::Mixture;
        menu[2].beta1 = 4.0;
        menu[2].beta2 = 12.0;
        menu[3].kind = InitialKind::Hermite;
        menu[3].terms = {{std::vector<int>(p.M, 0), 0.0}};
        menu[3].terms[0].degrees[0] = 4;
        menu[3].terms[0].coeff = 0.1;
        menu[4].kind = InitialKind::Saturating;
        menu[4].P = 2;
        auto b = std::make_shared<const TensorBasis>(p.M, 0, 4);
        for (const auto& s : menu) {
            if (s.kind == InitialKind::Saturating && p.M < 2) continue;
            const auto h0 = initial_coefficients(s, b);
            const double E4 = moments_from_coefficients(h0).E4;
            for (double e : fourth_moment_forward(p, h0, 50)) worst_e4 = std::max(worst_e4, e - 2 * (E4 + 1));
        }
    }
    o.require(norm <= 1 + 1e-10, "|L| = " + fmt("%.12f", norm));
    o.require(worst_e4 <= 0, "E_4k above 2(E4+1)");
    Config cfg;
    cfg.set("params.M", "4");
    cfg.set("params.N", "40");
    cfg.set("dsmc.mode", "moment-bound");
    cfg.set("dsmc.replicas", "10000");
    cfg.set("dsmc.t_grid", "0.1, 0.5, 1, 2, 5");
    const auto rep = dsmc_experiment(cfg);
    o.require(rep.pass(), "DSMC fourth moment above 2(E4+1) + 4 sigma");
    o.detail = "|L| in L2(Gamma) " + fmt("%.12f", norm) + ", max E_4k - 2(E4+1) = " + fmt("%.4f", worst_e4) +
               ", DSMC min slack " + fmt("%.4f", worst_margin(rep, "v4")) + (o.pass ? "" : "; " + o.detail);
    return o;
}

Outcome criterion10()
{
    Outcome o;
    Config cfg;
    cfg.set("dsmc.replicas", "100000");
    cfg.set("dsmc.t_grid", "0.5, 1, 2");
    RunOptions one, two;
    two.threads = 2;
    const auto a = dsmc_experiment(cfg, one);
    const auto b = dsmc_experiment(cfg, two);
    double worst = 0.0, drift = 0.0;
    for (const auto& x : a.records) {
        if (x.label == "FR energy drift") drift = x.measured;
        else if (x.stderr > 0) worst = std::max(worst, x.measured / x.stderr);
    }
    o.require(a.pass(), std::to_string(failed_records(a)) + " records fail");
    o.require(drift <= 1e-10, "energy drift " + fmt("%.3g", drift));
    o.require(to_json(a).dump() == to_json(b).dump() && to_csv(a) == to_csv(b), "reports differ between runs");
    o.detail = "largest |MC - spectral| / stderr " + fmt("%.2f", worst) + ", energy drift " + fmt("%.2g", drift) +
               ", reruns byte-identical" + (o.pass ? "" : "; " + o.detail);
    return o;
}

const std::function<Outcome()> kCriteria[] = {criterion1, criterion2, criterion3, criterion4, criterion5,
                                              criterion6, criterion7, criterion8, criterion9, criterion10};

} // namespace

int main(int argc, char** argv)
{
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);
        else {
            std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
            return 2;
        }
    }
    if (only < 0 || only > 10) {
        std::fprintf(stderr, "criterion must be 1..10\n");
        return 2;
    }
    bool all = true;
    for (int k = 1; k <= 10; ++k) {
        if (only && k != only) continue;
        Outcome o;
        try {
            o = kCriteria[k - 1]();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("error: ") + e.what();
        }
        std::printf("criterion %2d: %s  %s\n", k, o.pass ? "PASS" : "FAIL", o.detail.c_str());
        std::fflush(stdout);
        all = all && o.pass;
    }
    return all ? 0 : 1;
}
