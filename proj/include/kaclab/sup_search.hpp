#ifndef KACLAB_SUP_SEARCH_HPP
#define KACLAB_SUP_SEARCH_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace kaclab {

/// Grid search on [-half_width, half_width]^dim followed by compass
/// refinement from the best grid points. The origin is skipped.
struct SearchConfig {
    int grid_points = 33;
    double half_width = 2.0;
    int refine_rounds = 5;
    int starts = 8;
    /// Above this many grid points the grid is replaced by a Halton set.
    std::size_t max_evals = 200000;
    /// Objective is even in every coordinate: search [0, hw]^dim.
    bool sign_symmetric = false;
    /// Consecutive coordinate blocks inside which the objective is
    /// permutation invariant; the grid keeps only non-increasing tuples.
    std::vector<int> perm_blocks;
    /// Objective depends on |x| only: 1D search along the first axis.
    bool radial = false;
    int threads = 1;
};

struct SearchResult {
    double best = 0.0;
    std::vector<double> argmax;
    /// best after the grid phase and after each refinement round
    std::vector<double> history;
    std::size_t evals = 0;
};

using Objective = std::function<double(std::span<const double>)>;

SearchResult maximize(const Objective& f, int dim, const SearchConfig& cfg);

/// Points of the Halton sequence (bases 2, 3, 5, ...) mapped to [lo, hi]^dim.
std::vector<std::vector<double>> halton_points(int dim, std::size_t count, double lo, double hi);

} // namespace kaclab

#endif
