#include "kaclab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "kaclab/dsmc.hpp"
#include "kaclab/inequality.hpp"
#include "kaclab/metrics.hpp"
#include "kaclab/propagator.hpp"
#include "kaclab/saturation.hpp"

namespace kaclab {

using json = nlohmann::ordered_json;

namespace {

std::string fmt(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

std::uint64_t common_keys(const Config& cfg, const RunOptions& opt, const std::string& name)
{
    const std::string e = cfg.get_string("experiment", name);
    if (e != name) throw ConfigError("experiment", "config is for '" + e + "', not '" + name + "'");
    cfg.get_string("output.dir", "");
    const std::uint64_t seed = cfg.get_u64("seed", 1);
    return opt.seed ? *opt.seed : seed;
}

SystemParams read_params(const Config& cfg, SystemParams p)
{
    p.M = cfg.get_int("params.M", p.M);
    p.N = cfg.get_int("params.N", p.N);
    p.lambda_s = cfg.get_double("params.lambda_s", p.lambda_s);
    p.lambda_r = cfg.get_double("params.lambda_r", p.lambda_r);
    p.mu = cfg.get_double("params.mu", p.mu);
    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError("params", e.what());
    }
    return p;
}

InitialSpec read_state(const Config& cfg, int M, InitialSpec s)
{
    const std::string kind = cfg.get_string("state.kind", s.kind == InitialKind::Mixture ? "mixture" : "hermite");
    if (kind == "hermite") s.kind = InitialKind::Hermite;
    else if (kind == "gaussian") s.kind = InitialKind::Gaussian;
    else if (kind == "mixture") s.kind = InitialKind::Mixture;
    else if (kind == "saturating") s.kind = InitialKind::Saturating;
    else throw ConfigError("state.kind", "unknown kind '" + kind + "' (hermite, gaussian, mixture, saturating)");
    const std::string terms = cfg.get_string("state.terms", "");
    if (!terms.empty()) s.terms = parse_hermite_terms(terms, M);
    s.beta_s = cfg.get_double("state.beta_s", s.beta_s);
    s.beta1 = cfg.get_double("state.beta1", s.beta1);
    s.beta2 = cfg.get_double("state.beta2", s.beta2);
    s.weight = cfg.get_double("state.weight", s.weight);
    s.P = cfg.get_int("state.P", s.P);
    s.amplitude = cfg.get_double("state.amplitude", s.amplitude);
    if (s.kind == InitialKind::Hermite && s.terms.empty())
        throw ConfigError("state.terms", "a hermite state needs at least one term");
    return s;
}

SearchConfig read_search(const Config& cfg, SearchConfig s, int threads)
{
    s.grid_points = cfg.get_int("search.grid_points", s.grid_points);
    s.half_width = cfg.get_double("search.half_width", s.half_width);
    s.refine_rounds = cfg.get_int("search.refine_rounds", s.refine_rounds);
    s.starts = cfg.get_int("search.starts", s.starts);
    s.max_evals = cfg.get_u64("search.max_evals", s.max_evals);
    if (s.grid_points < 2) throw ConfigError("search.grid_points", "must be >= 2");
    if (!(s.half_width > 0)) throw ConfigError("search.half_width", "must be positive");
    s.threads = std::max(1, threads);
    return s;
}

SeriesOptions read_series(const Config& cfg)
{
    SeriesOptions o;
    o.tol = cfg.get_double("series.tol", o.tol);
    if (!(o.tol > 0)) throw ConfigError("series.tol", "must be positive");
    return o;
}

std::size_t read_max_basis(const Config& cfg)
{
    return cfg.get_u64("spectral.max_basis", kDefaultMaxBasisSize);
}

// Basis construction with a diagnostic that names the knobs.
template <class F>
auto feasible(F&& build, int cutoff)
{
    try {
        return build();
    } catch (const std::length_error& e) {
        throw ConfigError("spectral.cutoff", std::string(e.what()) + " (cutoff " + std::to_string(cutoff) +
                                                 "); lower spectral.cutoff, raise spectral.max_basis or use the dsmc experiment");
    }
}

json params_json(const SystemParams& p)
{
    json j;
    j["M"] = p.M;
    j["N"] = p.N;
    j["lambda_s"] = p.lambda_s;
    j["lambda_r"] = p.lambda_r;
    j["mu"] = p.mu;
    j["lambda"] = lambda_total(p);
    return j;
}

double distance_to_one(const HermiteState& h)
{
    Eigen::VectorXd u = h.coeffs;
    u(0) -= 1.0;
    return u.norm();
}

CharFunction cf_of(const HermiteState& h) { return CharFunction::from_coefficients(h); }

D2Result certified_d2(const HermiteState& f, const HermiteState& g, const SearchConfig& s, const std::string& what)
{
    D2Result r;
    try {
        r = d2(cf_of(f), cf_of(g), s);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("state", std::string("d2 is undefined: ") + e.what());
    }
    if (!r.certified) {
        throw CertificationError("d2 (" + what + ") not certified: lower bound " + fmt(r.lower_bound) +
                                 " below tail bound " + fmt(r.tail_bound) + " at radius " + fmt(r.radius) +
                                 "; raise search.half_width");
    }
    return r;
}

// <v_i^2>, <v_i^4> of a coefficient state.
std::pair<double, double> coordinate_moments(const HermiteState& h, int i)
{
    const TensorBasis& b = *h.basis;
    auto coef = [&](int d) {
        std::vector<std::uint8_t> mi(b.num_coords(), 0);
        mi[i] = std::uint8_t(d);
        return h.coeffs(Eigen::Index(b.index_of(mi)));
    };
    const double tp = 2 * kPi, c0 = h.coeffs(0);
    const double e2 = (std::sqrt(2.0) * coef(2) + c0) / tp;
    const double e4 = std::sqrt(24.0) * coef(4) / (tp * tp) + 3 / kPi * e2 - 3 / (tp * tp) * c0;
    return {e2, e4};
}

// Runs f(k) for k < n on up to `threads` workers; f must write to slot k only.
template <class F>
void parallel_for(std::size_t n, int threads, F&& f)
{
    threads = std::max(1, std::min<int>(threads, int(n)));
    if (threads == 1) {
        for (std::size_t k = 0; k < n; ++k) f(k);
        return;
    }
    std::mutex m;
    std::size_t next = 0;
    std::exception_ptr err;
    auto work = [&] {
        for (;;) {
            std::size_t k;
            {
                std::lock_guard lock(m);
                if (next >= n || err) return;
                k = next++;
            }
            try {
                f(k);
            } catch (...) {
                std::lock_guard lock(m);
                if (!err) err = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

} // namespace

std::vector<HermiteTerm> parse_hermite_terms(const std::string& text, int M)
{
    std::vector<HermiteTerm> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ';')) {
        if (item.find_first_not_of(" \t") == std::string::npos) continue;
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw ConfigError("state.terms", "expected 'degrees:coefficient', got '" + item + "'");
        HermiteTerm t;
        std::stringstream ds(item.substr(0, colon));
        std::string d;
        while (std::getline(ds, d, ',')) {
            try {
                t.degrees.push_back(std::stoi(d));
            } catch (const std::exception&) {
                throw ConfigError("state.terms", "bad degree '" + d + "'");
            }
        }
        if (int(t.degrees.size()) > M) throw ConfigError("state.terms", "term '" + item + "' has more degrees than params.M");
        t.degrees.resize(M, 0);
        try {
            t.coeff = std::stod(item.substr(colon + 1));
        } catch (const std::exception&) {
            throw ConfigError("state.terms", "bad coefficient in '" + item + "'");
        }
        out.push_back(std::move(t));
    }
    return out;
}

const std::vector<std::string>& experiment_names()
{
    static const std::vector<std::string> names = {"verify-thm1", "verify-thm2", "steady-state",
                                                   "dsmc",        "inequality",  "saturate"};
    return names;
}

ExperimentReport run_experiment(const std::string& name, const Config& cfg, const RunOptions& opt)
{
    if (name == "verify-thm1") return verify_thm1(cfg, opt);
    if (name == "verify-thm2") return verify_thm2(cfg, opt);
    if (name == "steady-state") return verify_steady(cfg, opt);
    if (name == "dsmc") return dsmc_experiment(cfg, opt);
    if (name == "inequality") return inequality_experiment(cfg, opt);
    if (name == "saturate") return saturate_experiment(cfg, opt);
    throw ConfigError("experiment", "unknown experiment '" + name + "'");
}

ExperimentReport verify_thm1(const Config& cfg, const RunOptions& opt)
{
    ExperimentReport rep;
    rep.experiment = "verify-thm1";
    rep.config_hash = cfg.hash();
    rep.seed = common_keys(cfg, opt, rep.experiment);
    const auto p = read_params(cfg, {1, 2, 1, 1, 1});
    InitialSpec def;
    def.terms = parse_hermite_terms("2:0.1", p.M);
    const auto spec = read_state(cfg, p.M, def);
    const int cutoff = cfg.get_int("spectral.cutoff", 8);
    const auto max_basis = read_max_basis(cfg);
    const auto series = read_series(cfg);
    const auto grid = cfg.get_time_grid("thm1.t_grid", "geom(0.01, 50, 25)");
    const double tol = cfg.get_double("thm1.tol", 1e-8);
    cfg.reject_unused();

    require_l2(spec);
    const auto pair = feasible([&] { return SemigroupPair::build(p, cutoff, max_basis); }, cutoff);
    const auto h0 = initial_coefficients(spec, pair.space.basis);
    const double u0 = distance_to_one(h0);
    const double scale = p.M / std::sqrt(double(p.N)) * u0;
    rep.meta["params"] = params_json(p);
    rep.meta["state"] = spec.describe();
    rep.meta["cutoff"] = cutoff;
    rep.meta["basis_size"] = pair.space.basis->size();
    rep.meta["norm_h0_minus_1"] = u0;
    rep.meta["series_tol"] = series.tol;
    double ratio = 0.0;
    for (double t : grid) {
        const double measured = difference_series(pair, h0, t, series).coeffs.norm();
        const double bound = scale * (1 - std::exp(-p.mu * t / 2));
        if (bound > 0) ratio = std::max(ratio, measured / bound);
        rep.records.push_back(upper_record(t, measured, bound, tol, 0.0, "L2 difference"));
    }
    // how much of the M/sqrt(N) prefactor is used
    rep.meta["largest_measured_over_bound"] = ratio;
    return rep;
}

ExperimentReport verify_thm2(const Config& cfg, const RunOptions& opt)
{
    ExperimentReport rep;
    rep.experiment = "verify-thm2";
    rep.config_hash = cfg.hash();
    rep.seed = common_keys(cfg, opt, rep.experiment);
    const auto p = read_params(cfg, {1, 2, 1, 1, 1});
    InitialSpec def;
    def.kind = InitialKind::Mixture;
    def.beta1 = 4.0;
    def.beta2 = 12.0;
    def.weight = 0.5;
    const auto spec = read_state(cfg, p.M, def);
    const int cutoff = cfg.get_int("spectral.cutoff", 8);
    const auto max_basis = read_max_basis(cfg);
    const auto series = read_series(cfg);
    const auto grid = cfg.get_time_grid("thm2.t_grid", "geom(0.05, 20, 12)");
    SearchConfig sdef;
    sdef.half_width = 3.0;
    sdef.refine_rounds = 6;
    const auto search = read_search(cfg, sdef, opt.threads);
    const int c4_k = cfg.get_int("thm2.c4_k", 4);
    const auto c4_xi = cfg.get_doubles("thm2.c4_xi", {0.25, 0.5, 1.0});
    const int c4_points = cfg.get_int("thm2.c4_points", 801);
    const double c4_interval = cfg.get_double("thm2.c4_interval", 6.0);
    cfg.reject_unused();

    require_l2(spec);
    const double lam = lambda_total(p);
    const auto vspace = feasible([&] { return SpectralSpace::make(p.M, 0, cutoff, max_basis); }, cutoff);
    const auto hv = initial_coefficients(spec, vspace.basis);
    const auto d0r = certified_d2(hv, constant_state(vspace.basis), search, "initial state");
    const double d0 = d0r.lower_bound;
    const double E4 = moments_from_coefficients(hv).E4;
    const double F4 = 48 * std::pow(kPi, 4) * (E4 + 1);
    const double K = 16 * std::sqrt(2.0);
    const double scale = K * p.M / p.N * std::sqrt(d0 * (F4 + d0));

    const auto pair = feasible([&] { return SemigroupPair::build(p, cutoff, max_basis); }, cutoff);
    const auto h0 = initial_coefficients(spec, pair.space.basis);
    rep.meta["params"] = params_json(p);
    rep.meta["state"] = spec.describe();
    rep.meta["cutoff"] = cutoff;
    rep.meta["basis_size"] = pair.space.basis->size();
    rep.meta["d2_initial"] = d0;
    rep.meta["E4"] = E4;
    rep.meta["F4"] = F4;
    rep.meta["K"] = K;
    rep.meta["search_half_width"] = search.half_width;

    const auto fr = evolve_grid(h0, pair.fr, grid, series);
    const auto th = evolve_grid(h0, pair.th, grid, series);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double t = grid[k];
        const auto r = certified_d2(fr[k], th[k], search, "t = " + fmt(t));
        const double bound = scale * (1 - std::exp(-p.mu * t / 4));
        rep.records.push_back(upper_record(t, r.lower_bound, bound, 0.0, 0.0, "d2 difference"));
    }

    // one step of Lambda^{-1}(Q_S + Q_R + Q_T) from l0 Gamma_N
    const auto qt = assemble(p, GeneratorTag::FullT, pair.space);
    HermiteState h1{qt.matrix * h0.coeffs / lam, pair.space.basis};
    const auto r1 = certified_d2(h1, constant_state(pair.space.basis), search, "one thermostat step");
    rep.records.push_back(upper_record(0.0, r1.lower_bound, (1 - p.mu / (2 * lam)) * d0, 1e-12, 0.0, "contraction step"));

    // C^4 norm of G-hat_k and the fourth-moment chain
    const auto e4k = fourth_moment_forward(p, hv, c4_k);
    const auto qv = assemble(p, GeneratorTag::FullT, vspace);
    HermiteState lk = hv;
    json chain = json::array();
    for (int k = 0; k <= c4_k; ++k) {
        const auto f = CharFunction::from_coefficients(lk);
        const double c4_bound = 32 * std::pow(kPi, 4) * (e4k[k] + 1);
        double worst = 0.0;
        for (double s : c4_xi) {
            std::vector<double> xi(p.M, s);
            const auto est = estimate_c4([&](double eta) { return g_hat(f, 2 * cutoff + 3, xi, eta); }, c4_interval,
                                         c4_points, 1e-6 * c4_bound);
            worst = std::max(worst, est.value);
        }
        rep.records.push_back(upper_record(k, worst, c4_bound, 1e-6 * c4_bound, 0.0, "C4 norm of G-hat_k"));
        rep.records.push_back(upper_record(k, c4_bound, 2 * F4, 1e-12 * F4, 0.0, "32 pi^4 (E4k + 1) <= 2 F4"));
        chain.push_back({{"k", k}, {"E4k", e4k[k]}, {"c4", worst}});
        lk.coeffs = qv.matrix * lk.coeffs / lam;
    }
    rep.meta["c4_chain"] = chain;
    return rep;
}

ExperimentReport verify_steady(const Config& cfg, const RunOptions& opt)
{
    ExperimentReport rep;
    rep.experiment = "steady-state";
    rep.config_hash = cfg.hash();
    rep.seed = common_keys(cfg, opt, rep.experiment);
    const auto p = read_params(cfg, {1, 4, 1, 1, 1});
    const int cutoff = cfg.get_int("spectral.cutoff", 6);
    const auto max_basis = read_max_basis(cfg);
    const auto series = read_series(cfg);
    const int nstates = cfg.get_int("steady.states", 20);
    const double scale = cfg.get_double("steady.scale", 0.05);
    const double t_match = cfg.get_double("steady.t_match", 50.0);
    const double match_tol = cfg.get_double("steady.match_tol", 1e-6);
    SearchConfig sdef;
    sdef.half_width = 3.0;
    sdef.refine_rounds = 6;
    const auto search = read_search(cfg, sdef, opt.threads);
    cfg.reject_unused();
    if (nstates < 1) throw ConfigError("steady.states", "must be >= 1");
    if (!(scale >= 0)) throw ConfigError("steady.scale", "must be >= 0");

    const auto pair = feasible([&] { return SemigroupPair::build(p, cutoff, max_basis); }, cutoff);
    const auto vspace = SpectralSpace::make(p.M, 0, cutoff);
    const auto& b = *pair.space.basis;
    const auto& bv = *vspace.basis;
    const double lam = pair.lambda;
    rep.meta["params"] = params_json(p);
    rep.meta["cutoff"] = cutoff;
    rep.meta["basis_size"] = b.size();
    rep.meta["t_match"] = t_match / lam;
    if (p.N < 3) rep.notes.push_back("N < 3: the L2 steady-state bound is skipped");

    std::mt19937_64 rng(rep.seed);
    std::normal_distribution<double> g;
    double worst_ratio = 0.0;
    for (int s = 0; s < nstates; ++s) {
        // random v-only perturbation with zero first moments
        HermiteState hv = constant_state(vspace.basis);
        Eigen::VectorXd u = Eigen::VectorXd::Zero(Eigen::Index(bv.size()));
        for (std::size_t k = 1; k < bv.size(); ++k)
            if (bv.total_degree(k) >= 2) u(Eigen::Index(k)) = g(rng);
        if (u.norm() > 0) u *= scale / u.norm();
        hv.coeffs += u;
        HermiteState h0 = constant_state(pair.space.basis);
        for (std::size_t k = 1; k < bv.size(); ++k) {
            std::vector<std::uint8_t> mi(b.num_coords(), 0);
            const auto src = bv.multi_index(k);
            std::copy(src.begin(), src.end(), mi.begin());
            h0.coeffs(Eigen::Index(b.index_of(mi))) = hv.coeffs(Eigen::Index(k));
        }
        const auto hinf = steady_state(h0);
        const double u0 = distance_to_one(h0), ui = distance_to_one(hinf);
        const std::string tag = " (state " + std::to_string(s) + ")";
        if (p.N >= 3) {
            const double c = double(p.M) / (p.N - 2);
            rep.records.push_back(upper_record(s, ui * ui, c * u0 * u0, 1e-14, 0.0, "L2 steady bound" + tag));
            worst_ratio = std::max(worst_ratio, ui * ui / (u0 * u0));
        }
        const double d0 = certified_d2(hv, constant_state(vspace.basis), search, "initial state" + tag).lower_bound;
        const double dinf = certified_d2(hinf, constant_state(pair.space.basis), search, "steady state" + tag).lower_bound;
        rep.records.push_back(upper_record(s, dinf, double(p.M) / (p.M + p.N) * d0, 1e-12, 0.0, "d2 steady bound" + tag));
        const double err = (evolve(h0, pair.fr, t_match / lam, series).coeffs - hinf.coeffs).norm();
        rep.records.push_back(upper_record(s, err, match_tol, 0.0, 0.0, "long-time match" + tag));
    }
    if (p.N >= 3) rep.meta["largest_l2_ratio"] = worst_ratio;
    return rep;
}

ExperimentReport dsmc_experiment(const Config& cfg, const RunOptions& opt)
{
    ExperimentReport rep;
    rep.experiment = "dsmc";
    rep.config_hash = cfg.hash();
    rep.seed = common_keys(cfg, opt, rep.experiment);
    const auto p = read_params(cfg, {1, 2, 1, 1, 1});
    InitialSpec def;
    def.kind = InitialKind::Mixture;
    def.beta1 = 4.0;
    def.beta2 = 12.0;
    def.weight = 0.5;
    const auto spec = read_state(cfg, p.M, def);
    const std::string mode = cfg.get_string("dsmc.mode", "crossval");
    const std::string dyn_s = cfg.get_string("dsmc.dynamics", "fr");
    const auto replicas = cfg.get_u64("dsmc.replicas", 100000);
    const auto grid = cfg.get_time_grid("dsmc.t_grid", "0.5, 1, 2");
    const double sigmas = cfg.get_double("dsmc.sigmas", mode == "crossval" ? 3.0 : 4.0);
    const bool dump = cfg.get_bool("dsmc.raw_dump", false);
    const int cutoff = cfg.get_int("spectral.cutoff", 4);
    const auto max_basis = read_max_basis(cfg);
    const auto series = read_series(cfg);
    cfg.reject_unused();
    if (mode != "crossval" && mode != "moment-bound") throw ConfigError("dsmc.mode", "expected crossval or moment-bound");
    if (dyn_s != "fr" && dyn_s != "t") throw ConfigError("dsmc.dynamics", "expected fr or t");
    if (replicas < 2) throw ConfigError("dsmc.replicas", "need at least two replicas");
    const Dynamics dyn = dyn_s == "fr" ? Dynamics::FR : Dynamics::T;

    ObservableSpec obs;
    obs.per_coordinate = true;
    EnsembleOptions eo;
    eo.replicas = replicas;
    eo.seed = rep.seed;
    eo.threads = opt.threads;
    eo.keep_samples = dump;
    const SystemSampler sampler(spec, p.M);
    const auto res = run_ensemble(p, dyn, sampler, grid, obs, eo);
    rep.meta["params"] = params_json(p);
    rep.meta["state"] = spec.describe();
    rep.meta["mode"] = mode;
    rep.meta["dynamics"] = dyn_s;
    rep.meta["replicas"] = res.replicas;
    rep.meta["flagged"] = res.flagged;
    rep.meta["events"] = res.events;
    if (res.flagged) rep.notes.push_back(std::to_string(res.flagged) + " replicas flagged non-finite and excluded");
    if (dump) {
        std::ostringstream os;
        write_raw_samples(os, res.samples.back());
        rep.artifacts.emplace_back("samples.bin", os.str());
    }

    auto strict = [](Record r) {
        r.pass = r.margin >= 0;
        return r;
    };
    if (mode == "crossval") {
        std::vector<HermiteState> spec_t;
        if (cutoff < 4) throw ConfigError("spectral.cutoff", "moments need cutoff >= 4");
        const auto pair = feasible([&] { return SemigroupPair::build(p, cutoff, max_basis); }, cutoff);
        const auto h0 = initial_coefficients(spec, pair.space.basis);
        spec_t = evolve_grid(h0, dyn == Dynamics::FR ? pair.fr : pair.th, grid, series);
        for (std::size_t k = 0; k < grid.size(); ++k) {
            for (int i = 0; i < p.M; ++i) {
                const auto [e2, e4] = coordinate_moments(spec_t[k], i);
                for (auto [name, exact] : {std::pair{std::string("v2[") + std::to_string(i) + "]", e2},
                                           std::pair{std::string("v4[") + std::to_string(i) + "]", e4}}) {
                    const int c = res.column(name);
                    const double se = res.stderr(Eigen::Index(k), c);
                    const double diff = std::abs(res.mean(Eigen::Index(k), c) - exact);
                    rep.records.push_back(strict(upper_record(grid[k], diff, sigmas * se, 0.0, se, name + " vs spectral")));
                }
            }
        }
    } else {
        const double E4 = analytic_moments(spec, p.M).E4;
        const double bound = 2 * (E4 + 1);
        rep.meta["E4"] = E4;
        for (std::size_t k = 0; k < grid.size(); ++k) {
            for (int i = 0; i < p.M; ++i) {
                const std::string name = "v4[" + std::to_string(i) + "]";
                const int c = res.column(name);
                const double se = res.stderr(Eigen::Index(k), c);
                Record r = upper_record(grid[k], res.mean(Eigen::Index(k), c), bound, 0.0, se, name + " <= 2(E4 + 1)");
                r.pass = r.margin >= -sigmas * se;
                rep.records.push_back(r);
            }
        }
    }
    if (dyn == Dynamics::FR) {
        rep.records.push_back(strict(upper_record(grid.back(), res.max_energy_drift, 1e-10, 0.0, 0.0, "FR energy drift")));
    }
    return rep;
}

ExperimentReport inequality_experiment(const Config& cfg, const RunOptions& opt)
{
    ExperimentReport rep;
    rep.experiment = "inequality";
    rep.config_hash = cfg.hash();
    rep.seed = common_keys(cfg, opt, rep.experiment);
    const int count = cfg.get_int("inequality.count", 100);
    const auto avals = cfg.get_doubles("inequality.a", {0.0, 0.5, 1.0, 2.0});
    const auto nvals = cfg.get_ints("inequality.N", {1, 2, 4, 8});
    const auto rvals = cfg.get_doubles("inequality.r", {1.0, 10.0, 100.0, 1000.0});
    const int rN = cfg.get_int("inequality.r_N", 4);
    const double ra = cfg.get_double("inequality.r_a", 1.0);
    const double rfrac = cfg.get_double("inequality.r_fraction", 0.9);
    cfg.reject_unused();
    if (count < 0) throw ConfigError("inequality.count", "must be >= 0");
    for (int N : nvals)
        if (N < 1 || N > 8) throw ConfigError("inequality.N", "N must lie in [1, 8]");
    for (double a : avals)
        if (!(a >= 0)) throw ConfigError("inequality.a", "a must be >= 0");

    const auto fns = corpus(rep.seed, count);
    struct Job {
        std::size_t f;
        double a;
        int N;
    };
    std::vector<Job> jobs;
    for (std::size_t f = 0; f < fns.size(); ++f)
        for (double a : avals)
            for (int N : nvals) jobs.push_back({f, a, N});
    std::vector<DnBoundsReport> out(jobs.size());
    parallel_for(jobs.size(), opt.threads, [&](std::size_t k) { out[k] = check_dn_bounds(fns[jobs[k].f], jobs[k].a, jobs[k].N); });

    std::size_t failed = 0;
    for (std::size_t k = 0; k < jobs.size(); ++k) {
        failed += out[k].pass ? 0 : 1;
        for (const auto& layer : out[k].layers) {
            Record r{double(k), layer.lhs, layer.rhs, layer.slack, 0.0,
                     out[k].function + " a=" + fmt(jobs[k].a) + " N=" + std::to_string(jobs[k].N) + " " + layer.name,
                     layer.pass};
            rep.records.push_back(std::move(r));
        }
    }
    json cex = json::array();
    for (double r : rvals) {
        const double ratio = counterexample_ratio(r, rN, ra);
        rep.records.push_back(upper_record(r, ratio, rN, 1e-12 * rN, 0.0, "D_N/D_1 for H_r <= N"));
        rep.records.push_back(lower_record(r, ratio, 1.0, 1e-12, 0.0, "D_N/D_1 for H_r >= 1"));
        cex.push_back({{"r", r}, {"ratio", ratio}});
    }
    const double rmax = *std::max_element(rvals.begin(), rvals.end());
    rep.records.push_back(lower_record(rmax, counterexample_ratio(rmax, rN, ra), rfrac * rN, 0.0, 0.0,
                                       "D_N/D_1 for H_r near N at the largest r"));
    rep.meta["functions"] = fns.size();
    rep.meta["cases"] = jobs.size();
    rep.meta["cases_failed"] = failed;
    rep.meta["counterexample"] = cex;
    return rep;
}

ExperimentReport saturate_experiment(const Config& cfg, const RunOptions& opt)
{
    ExperimentReport rep;
    rep.experiment = "saturate";
    rep.config_hash = cfg.hash();
    rep.seed = common_keys(cfg, opt, rep.experiment);
    const auto p = read_params(cfg, {2, 4, 1, 1, 1});
    const int P = cfg.get_int("saturate.P", 2);
    const double lam = lambda_total(p);
    const auto grid = cfg.get_time_grid("saturate.t_grid", "lin(0, " + fmt(1.0 / lam) + ", 41)");
    const auto cases = cfg.get_ints("saturate.ratio_cases", {2, 2, 3, 3});
    const bool check_ubar = cfg.get_bool("saturate.check_ubar", true);
    const auto max_basis = read_max_basis(cfg);
    const auto series = read_series(cfg);
    cfg.reject_unused();
    if (cases.size() % 2) throw ConfigError("saturate.ratio_cases", "expected M,P pairs");
    if (p.M < 2 || P < 2) throw ConfigError("saturate.P", "need M >= 2 and P >= 2");
    feasible([&] { return std::make_shared<const TensorBasis>(p.M, p.N, 2 * P, max_basis); }, 2 * P);

    rep.meta["params"] = params_json(p);
    rep.meta["P"] = P;
    rep.meta["C"] = kSaturationC;
    if (check_ubar) {
        const auto c = cross_term(2, 2);
        rep.meta["ubar_cross_term"] = c.value;
        rep.records.push_back(upper_record(0.0, std::abs(c.value - 11.0 / 8.0), 1e-9, 0.0, 0.0, "cross term of u-bar equals 11/8"));
    }
    json ratios = json::array();
    for (std::size_t k = 0; k < cases.size(); k += 2) {
        const int M = cases[k], Q = cases[k + 1];
        const auto c = cross_term(M, Q);
        auto b = std::make_shared<const TensorBasis>(M, 0, 2 * Q);
        const auto s = build_saturating(M, Q, b, false);
        const std::string tag = " (M=" + std::to_string(M) + ", P=" + std::to_string(Q) + ")";
        rep.records.push_back(lower_record(0.0, c.ratio_norm2, kSaturationC, 0.0, 0.0, "cross term / |u|^2 >= 3/128" + tag));
        rep.records.push_back(lower_record(0.0, c.ratio_norm2, combinatorial_bound(M, Q, 11.0 / 8.0), 0.0, 0.0,
                                           "cross term / |u|^2 >= combinatorial expression" + tag));
        rep.records.push_back(upper_record(0.0, std::abs(double(s.support) - composition_count(M, Q)), 0.0, 0.0, 0.0,
                                           "support count is the composition count" + tag));
        ratios.push_back({{"M", M},
                          {"P", Q},
                          {"value", c.value},
                          {"norm2", c.norm2},
                          {"ratio_norm", c.ratio_norm},
                          {"ratio_norm2", c.ratio_norm2},
                          {"support", s.support},
                          {"composition_count", composition_count(M, Q)},
                          {"alternative_count", alternative_count(M, Q)}});
    }
    rep.meta["ratios"] = ratios;

    const auto r = saturation_experiment(p, P, grid, series);
    rep.meta["amplitude"] = r.amplitude;
    rep.meta["norm_h0_minus_1"] = r.norm_u0;
    rep.meta["slope"] = r.slope;
    rep.meta["slope_fd"] = r.slope_fd;
    rep.meta["nonvacuous_until"] = std::log(1 + kSaturationC) / lam;
    rep.records.push_back(lower_record(0.0, r.slope, r.slope_bound, 0.0, 0.0, "initial slope"));
    for (const auto& pt : r.points)
        rep.records.push_back(lower_record(pt.t, pt.measured, pt.lower_bound, 1e-14, 0.0, "difference vs lower bound"));
    return rep;
}

} // namespace kaclab
