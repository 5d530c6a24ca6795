#include "kaclab/sup_search.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace kaclab {

namespace {

double binom(int n, int k)
{
    double c = 1.0;
    for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
    return c;
}

// Evaluates f on all points, split over threads; result order matches input.
std::vector<double> evaluate_all(const Objective& f, const std::vector<std::vector<double>>& pts, int threads)
{
    std::vector<double> out(pts.size());
    threads = std::max(1, std::min<int>(threads, int(pts.size() / 64) + 1));
    auto work = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) out[i] = f(pts[i]);
    };
    if (threads == 1) {
        work(0, pts.size());
        return out;
    }
    std::vector<std::thread> pool;
    const std::size_t chunk = (pts.size() + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const std::size_t lo = t * chunk, hi = std::min(pts.size(), lo + chunk);
        if (lo < hi) pool.emplace_back(work, lo, hi);
    }
    for (auto& th : pool) th.join();
    return out;
}

bool is_origin(std::span<const double> x)
{
    return std::all_of(x.begin(), x.end(), [](double v) { return v == 0.0; });
}

} // namespace

std::vector<std::vector<double>> halton_points(int dim, std::size_t count, double lo, double hi)
{
    static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
    if (dim > 16) throw std::invalid_argument("halton_points supports at most 16 dimensions");
    std::vector<std::vector<double>> pts(count, std::vector<double>(dim));
    for (std::size_t i = 0; i < count; ++i) {
        for (int d = 0; d < dim; ++d) {
            const int b = primes[d];
            double f = 1.0, r = 0.0;
            for (std::size_t n = i + 1; n > 0; n /= b) {
                f /= b;
                r += f * double(n % b);
            }
            pts[i][d] = lo + (hi - lo) * r;
        }
    }
    return pts;
}

SearchResult maximize(const Objective& f, int dim, const SearchConfig& cfg)
{
    if (dim < 1) throw std::invalid_argument("search dimension must be >= 1");
    if (cfg.grid_points < 2 || !(cfg.half_width > 0)) throw std::invalid_argument("bad search grid");
    const int sdim = cfg.radial ? 1 : dim;
    auto embed = [&](std::span<const double> x) {
        std::vector<double> full(dim, 0.0);
        std::copy(x.begin(), x.end(), full.begin());
        return full;
    };
    Objective g = f;
    if (cfg.radial) g = [&](std::span<const double> x) { return f(embed(x)); };

    std::vector<int> blocks = cfg.perm_blocks;
    if (cfg.radial || blocks.empty()) blocks.assign(sdim, 1);
    if (std::accumulate(blocks.begin(), blocks.end(), 0) != sdim) {
        throw std::invalid_argument("permutation blocks must cover every coordinate");
    }

    // 1D grid values; the sign-reduced grid keeps the non-negative half.
    std::vector<double> axis;
    const double spacing = 2 * cfg.half_width / (cfg.grid_points - 1);
    for (int i = 0; i < cfg.grid_points; ++i) {
        const double x = -cfg.half_width + i * spacing;
        if ((cfg.sign_symmetric || cfg.radial) && x < -1e-15) continue;
        axis.push_back(std::abs(x) < 1e-15 ? 0.0 : x);
    }
    const int na = int(axis.size());

    double count = 1.0;
    for (int b : blocks) count *= binom(na + b - 1, b);

    std::vector<std::vector<double>> pts;
    if (count <= double(cfg.max_evals)) {
        // Tuples of axis indices, non-increasing inside each block.
        std::vector<int> block_start(sdim);
        for (int b = 0, c = 0; b < int(blocks.size()); ++b)
            for (int k = 0; k < blocks[b]; ++k, ++c) block_start[c] = c - k;
        std::vector<double> x(sdim);
        std::function<void(int, int)> rec = [&](int c, int cap) {
            if (c == sdim) {
                if (!is_origin(x)) pts.push_back(x);
                return;
            }
            const int hi = c > block_start[c] ? cap : na - 1;
            for (int i = 0; i <= hi; ++i) {
                x[c] = axis[i];
                rec(c + 1, i);
            }
        };
        rec(0, na - 1);
    } else {
        const double lo = cfg.sign_symmetric ? 0.0 : -cfg.half_width;
        pts = halton_points(sdim, cfg.max_evals, lo, cfg.half_width);
    }

    SearchResult res;
    const auto vals = evaluate_all(g, pts, cfg.threads);
    res.evals = pts.size();
    std::vector<std::size_t> order(pts.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double va = std::isnan(vals[a]) ? -INFINITY : vals[a];
        const double vb = std::isnan(vals[b]) ? -INFINITY : vals[b];
        return va > vb;
    });
    if (order.empty()) throw std::invalid_argument("search grid is empty");

    const int nstarts = std::min<int>(cfg.starts, int(order.size()));
    std::vector<std::vector<double>> xs;
    std::vector<double> fx;
    for (int s = 0; s < nstarts; ++s) {
        xs.push_back(pts[order[s]]);
        fx.push_back(vals[order[s]]);
    }
    res.best = fx[0];
    std::vector<double> best_x = xs[0];
    res.history.push_back(res.best);

    double step = spacing;
    for (int round = 0; round < cfg.refine_rounds; ++round) {
        for (int s = 0; s < nstarts; ++s) {
            for (int iter = 0; iter < 1000; ++iter) {
                bool moved = false;
                for (int c = 0; c < sdim; ++c) {
                    for (double sgn : {1.0, -1.0}) {
                        std::vector<double> y = xs[s];
                        y[c] = std::clamp(y[c] + sgn * step, -cfg.half_width, cfg.half_width);
                        if (is_origin(y) || y == xs[s]) continue;
                        const double fy = g(y);
                        ++res.evals;
                        if (fy > fx[s]) {
                            xs[s] = std::move(y);
                            fx[s] = fy;
                            moved = true;
                        }
                    }
                }
                if (!moved) break;
            }
            if (fx[s] > res.best) {
                res.best = fx[s];
                best_x = xs[s];
            }
        }
        res.history.push_back(res.best);
        step *= 0.5;
    }
    res.argmax = cfg.radial ? embed(best_x) : best_x;
    return res;
}

} // namespace kaclab
