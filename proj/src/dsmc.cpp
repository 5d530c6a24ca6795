#include "kaclab/dsmc.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace kaclab {

namespace {

constexpr std::size_t kBlock = 256;

std::uint64_t splitmix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

void rotate(double& a, double& b, double theta)
{
    const double c = std::cos(theta), s = std::sin(theta);
    const double na = a * c + b * s;
    const double nb = -a * s + b * c;
    a = na;
    b = nb;
}

int pick(Rng& rng, int n)
{
    return int(std::uniform_int_distribution<int>(0, n - 1)(rng));
}

// Second, distinct index in [0, n).
int pick_other(Rng& rng, int n, int first)
{
    int j = pick(rng, n - 1);
    return j >= first ? j + 1 : j;
}

Mechanism apply_event(ParticleState& s, const SystemParams& p, const EventRates& r, Dynamics dyn, Rng& rng)
{
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const double theta = 2 * kPi * u01(rng);
    const double x = u01(rng) * r.total();
    const int M = int(s.v.size()), N = int(s.w.size());
    if (x < r.ss) {
        const int i = pick(rng, M), j = pick_other(rng, M, i);
        rotate(s.v[i], s.v[j], theta);
        return Mechanism::SS;
    }
    if (x < r.ss + r.rr) {
        const int i = pick(rng, N), j = pick_other(rng, N, i);
        rotate(s.w[i], s.w[j], theta);
        return Mechanism::RR;
    }
    const int i = pick(rng, M);
    if (dyn == Dynamics::FR) {
        rotate(s.v[i], s.w[pick(rng, N)], theta);
        return Mechanism::SR;
    }
    (void)p;
    double fresh = std::normal_distribution<double>(0.0, 1.0 / std::sqrt(kBeta))(rng);
    rotate(s.v[i], fresh, theta);
    return Mechanism::Thermostat;
}

Mechanism step(ParticleState& s, const SystemParams& p, Dynamics dyn, Rng& rng)
{
    const auto r = event_rates(p);
    if (r.total() <= 0) throw std::invalid_argument("all event rates are zero");
    s.clock += std::exponential_distribution<double>(r.total())(rng);
    return apply_event(s, p, r, dyn, rng);
}

struct Welford {
    Eigen::ArrayXXd mean, m2;
    double n = 0.0;

    void init(Eigen::Index rows, Eigen::Index cols)
    {
        mean = Eigen::ArrayXXd::Zero(rows, cols);
        m2 = Eigen::ArrayXXd::Zero(rows, cols);
    }
    void add(const Eigen::ArrayXXd& x)
    {
        n += 1;
        const Eigen::ArrayXXd d = x - mean;
        mean += d / n;
        m2 += d * (x - mean);
    }
    // Chan et al. pairwise combination.
    void merge(const Welford& o)
    {
        if (o.n == 0) return;
        if (n == 0) {
            *this = o;
            return;
        }
        const double tot = n + o.n;
        const Eigen::ArrayXXd d = o.mean - mean;
        mean += d * (o.n / tot);
        m2 += o.m2 + d * d * (n * o.n / tot);
        n = tot;
    }
};

struct BlockResult {
    Welford stats;
    std::size_t flagged = 0;
    std::uint64_t events = 0;
    double drift = 0.0;
};

std::vector<std::string> observable_names(int M, const ObservableSpec& obs)
{
    std::vector<std::string> n = {"E2", "E3", "E4", "H2", "H4", "momentum", "energy", "reservoir_E2"};
    if (obs.per_coordinate) {
        for (int i = 0; i < M; ++i) n.push_back("v2[" + std::to_string(i) + "]");
        for (int i = 0; i < M; ++i) n.push_back("v4[" + std::to_string(i) + "]");
    }
    for (std::size_t k = 0; k < obs.cf_points.size(); ++k) {
        n.push_back("cf_re[" + std::to_string(k) + "]");
        n.push_back("cf_im[" + std::to_string(k) + "]");
    }
    return n;
}

void observe(const ParticleState& s, const ObservableSpec& obs, Eigen::Ref<Eigen::ArrayXd> out)
{
    const int M = int(s.v.size()), N = int(s.w.size());
    double e2 = 0, e4 = 0, h2 = 0, h4 = 0, mom = 0, en = 0, re2 = 0, s2 = 0, s4 = 0;
    for (double v : s.v) {
        const double v2 = v * v, x2 = kBeta * v2;
        e2 += v2;
        e4 += v2 * v2;
        s2 += v2;
        s4 += v2 * v2;
        h2 += (x2 - 1) / std::sqrt(2.0);
        h4 += (x2 * x2 - 6 * x2 + 3) / std::sqrt(24.0);
        mom += v;
        en += v2;
    }
    for (double w : s.w) {
        mom += w;
        en += w * w;
        re2 += w * w;
    }
    // sum_{i<j} v_i^2 v_j^2 = ((sum v^2)^2 - sum v^4) / 2
    const double e3 = M > 1 ? (s2 * s2 - s4) / (M * (M - 1.0)) : (e2 / M) * (e2 / M);
    Eigen::Index c = 0;
    out(c++) = e2 / M;
    out(c++) = e3;
    out(c++) = e4 / M;
    out(c++) = h2 / M;
    out(c++) = h4 / M;
    out(c++) = mom;
    out(c++) = en;
    out(c++) = re2 / N;
    if (obs.per_coordinate) {
        for (double v : s.v) out(c++) = v * v;
        for (double v : s.v) out(c++) = v * v * v * v;
    }
    for (const auto& cp : obs.cf_points) {
        double ph = 0.0;
        for (int i = 0; i < M; ++i) ph += cp.xi[i] * s.v[i];
        for (int j = 0; j < N; ++j) ph += cp.eta[j] * s.w[j];
        out(c++) = std::cos(2 * kPi * ph);
        out(c++) = -std::sin(2 * kPi * ph);
    }
}

} // namespace

std::uint64_t replica_seed(std::uint64_t master, std::uint64_t replica)
{
    return splitmix64(splitmix64(master) ^ splitmix64(replica + 0x632be59bd9b4e019ULL));
}

EventRates event_rates(const SystemParams& p)
{
    EventRates r;
    r.ss = p.M > 1 ? p.lambda_s * p.M / 2.0 : 0.0;
    r.rr = p.N > 1 ? p.lambda_r * p.N / 2.0 : 0.0;
    r.coupling = p.mu * p.M;
    return r;
}

Mechanism step_fr(ParticleState& s, const SystemParams& p, Rng& rng) { return step(s, p, Dynamics::FR, rng); }
Mechanism step_t(ParticleState& s, const SystemParams& p, Rng& rng) { return step(s, p, Dynamics::T, rng); }

std::uint64_t advance_to(ParticleState& s, double t, Dynamics dyn, const SystemParams& p, Rng& rng)
{
    const auto r = event_rates(p);
    std::uint64_t n = 0;
    if (r.total() <= 0) {
        s.clock = std::max(s.clock, t);
        return 0;
    }
    std::exponential_distribution<double> hold(r.total());
    while (true) {
        const double next = s.clock + hold(rng);
        if (next > t) break;
        s.clock = next;
        apply_event(s, p, r, dyn, rng);
        ++n;
    }
    s.clock = std::max(s.clock, t);
    return n;
}

int EnsembleResult::column(const std::string& name) const
{
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw std::out_of_range("no observable named " + name);
    return int(it - names.begin());
}

EnsembleResult run_ensemble(const SystemParams& p, Dynamics dyn, const SystemSampler& sampler,
                            std::span<const double> t_grid, const ObservableSpec& obs, const EnsembleOptions& opt)
{
    p.validate();
    if (opt.replicas < 2) throw std::invalid_argument("run_ensemble needs at least 2 replicas");
    if (t_grid.empty()) throw std::invalid_argument("run_ensemble needs a non-empty time grid");
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
        if (!(t_grid[k] >= 0) || (k > 0 && t_grid[k] < t_grid[k - 1])) {
            throw std::invalid_argument("time grid must be non-negative and non-decreasing");
        }
    }
    for (const auto& cp : obs.cf_points) {
        if (int(cp.xi.size()) != p.M || int(cp.eta.size()) != p.N) {
            throw std::invalid_argument("characteristic-function point has the wrong dimension");
        }
    }
    EnsembleResult res;
    res.t.assign(t_grid.begin(), t_grid.end());
    res.names = observable_names(p.M, obs);
    res.replicas = opt.replicas;
    const auto T = Eigen::Index(t_grid.size());
    const auto nobs = Eigen::Index(res.names.size());
    if (opt.keep_samples) res.samples.assign(t_grid.size(), Eigen::MatrixXd(Eigen::Index(opt.replicas), p.M + p.N));

    const std::size_t nblocks = (opt.replicas + kBlock - 1) / kBlock;
    std::vector<BlockResult> blocks(nblocks);
    auto run_block = [&](std::size_t b) {
        BlockResult& br = blocks[b];
        br.stats.init(T, nobs);
        Eigen::ArrayXXd vals(T, nobs);
        ParticleState s;
        s.v.resize(p.M);
        s.w.resize(p.N);
        for (std::size_t r = b * kBlock; r < std::min(opt.replicas, (b + 1) * kBlock); ++r) {
            Rng rng(replica_seed(opt.seed, r));
            sampler.sample(rng, s.v);
            sample_reservoir(rng, s.w);
            s.clock = 0.0;
            double e0 = 0.0;
            for (double v : s.v) e0 += v * v;
            for (double w : s.w) e0 += w * w;
            bool ok = true;
            for (Eigen::Index k = 0; k < T; ++k) {
                br.events += advance_to(s, t_grid[k], dyn, p, rng);
                auto row = vals.row(k);
                Eigen::ArrayXd tmp(nobs);
                observe(s, obs, tmp);
                row = tmp.transpose();
                if (!tmp.allFinite()) ok = false;
                if (dyn == Dynamics::FR && e0 > 0) br.drift = std::max(br.drift, std::abs(tmp(6) - e0) / e0);
                if (opt.keep_samples) {
                    auto& m = res.samples[k];
                    for (int i = 0; i < p.M; ++i) m(Eigen::Index(r), i) = s.v[i];
                    for (int j = 0; j < p.N; ++j) m(Eigen::Index(r), p.M + j) = s.w[j];
                }
            }
            if (ok) {
                br.stats.add(vals);
            } else {
                ++br.flagged;
            }
        }
    };

    const int threads = std::max(1, std::min<int>(opt.threads, int(nblocks)));
    if (threads == 1) {
        for (std::size_t b = 0; b < nblocks; ++b) run_block(b);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                for (std::size_t b = std::size_t(t); b < nblocks; b += std::size_t(threads)) run_block(b);
            });
        }
        for (auto& th : pool) th.join();
    }

    Welford total;
    total.init(T, nobs);
    for (const auto& br : blocks) {
        total.merge(br.stats);
        res.flagged += br.flagged;
        res.events += br.events;
        res.max_energy_drift = std::max(res.max_energy_drift, br.drift);
    }
    if (total.n < 2) throw std::runtime_error("fewer than 2 replicas left after flagging");
    res.mean = total.mean.matrix();
    res.stderr = (total.m2 / (total.n - 1) / total.n).sqrt().matrix();
    return res;
}

void write_raw_samples(std::ostream& os, const Eigen::MatrixXd& samples)
{
    static_assert(std::endian::native == std::endian::little, "raw dump assumes a little-endian host");
    os.write("KACRAW01", 8);
    const std::uint64_t rows = std::uint64_t(samples.rows()), cols = std::uint64_t(samples.cols());
    os.write(reinterpret_cast<const char*>(&rows), 8);
    os.write(reinterpret_cast<const char*>(&cols), 8);
    for (Eigen::Index r = 0; r < samples.rows(); ++r)
        for (Eigen::Index c = 0; c < samples.cols(); ++c) {
            const double x = samples(r, c);
            os.write(reinterpret_cast<const char*>(&x), 8);
        }
}

Eigen::MatrixXd read_raw_samples(std::istream& is)
{
    char magic[8];
    std::uint64_t rows = 0, cols = 0;
    is.read(magic, 8);
    if (!is || std::memcmp(magic, "KACRAW01", 8) != 0) throw std::runtime_error("not a raw sample dump");
    is.read(reinterpret_cast<char*>(&rows), 8);
    is.read(reinterpret_cast<char*>(&cols), 8);
    Eigen::MatrixXd m{Eigen::Index(rows), Eigen::Index(cols)};
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) is.read(reinterpret_cast<char*>(&m(r, c)), 8);
    if (!is) throw std::runtime_error("truncated raw sample dump");
    return m;
}

} // namespace kaclab
