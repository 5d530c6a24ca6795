#include "kaclab/tensor_basis.hpp"

#include <stdexcept>
#include <string>

namespace kaclab {

namespace {

// Appends all compositions of `remaining` into coords [pos, n), first
// coordinate largest first.
void enumerate(int pos, int remaining, std::vector<std::uint8_t>& current,
               std::vector<std::uint8_t>& out)
{
    const int n = int(current.size());
    if (pos == n - 1) {
        current[pos] = std::uint8_t(remaining);
        out.insert(out.end(), current.begin(), current.end());
        return;
    }
    for (int k = remaining; k >= 0; --k) {
        current[pos] = std::uint8_t(k);
        enumerate(pos + 1, remaining - k, current, out);
    }
    current[pos] = 0;
}

} // namespace

std::size_t TensorBasis::count(int num_coords, int cutoff)
{
    // binom(num_coords + cutoff, cutoff)
    double c = 1.0;
    for (int k = 1; k <= cutoff; ++k) c = c * (num_coords + k) / k;
    return std::size_t(c + 0.5);
}

TensorBasis::TensorBasis(int system_coords, int reservoir_coords, int cutoff, std::size_t max_size)
    : system_coords_(system_coords), reservoir_coords_(reservoir_coords), cutoff_(cutoff)
{
    const int n = num_coords();
    if (system_coords < 0 || reservoir_coords < 0 || n < 1) {
        throw std::invalid_argument("tensor basis needs at least one coordinate");
    }
    if (cutoff < 0 || cutoff > 15) throw std::invalid_argument("tensor basis cutoff must lie in [0, 15]");
    if (n > 16) throw std::invalid_argument("tensor basis supports at most 16 coordinates");
    const std::size_t expected = count(n, cutoff);
    if (expected > max_size) {
        throw std::length_error("tensor basis of size " + std::to_string(expected) +
                                " exceeds the configured limit " + std::to_string(max_size) +
                                "; lower the cutoff or use the particle simulator");
    }

    degrees_.reserve(expected * n);
    std::vector<std::uint8_t> current(n, 0);
    for (int d = 0; d <= cutoff; ++d) enumerate(0, d, current, degrees_);

    const std::size_t sz = degrees_.size() / n;
    total_degree_.resize(sz);
    lookup_.reserve(sz);
    for (std::size_t i = 0; i < sz; ++i) {
        int td = 0;
        for (int c = 0; c < n; ++c) td += degrees_[i * n + c];
        total_degree_[i] = td;
        lookup_.emplace(key(multi_index(i)), i);
    }
}

bool TensorBasis::is_system_only(std::size_t flat) const
{
    for (int c = system_coords_; c < num_coords(); ++c)
        if (degree(flat, c) != 0) return false;
    return true;
}

std::uint64_t TensorBasis::key(std::span<const std::uint8_t> index) const
{
    std::uint64_t k = 0;
    for (auto d : index) k = (k << 4) | d;
    return k;
}

std::optional<std::size_t> TensorBasis::find(std::span<const std::uint8_t> index) const
{
    if (index.size() != std::size_t(num_coords())) return std::nullopt;
    int td = 0;
    for (auto d : index) {
        if (d > 15) return std::nullopt;
        td += d;
    }
    if (td > cutoff_) return std::nullopt;
    auto it = lookup_.find(key(index));
    if (it == lookup_.end()) return std::nullopt;
    return it->second;
}

std::size_t TensorBasis::index_of(std::span<const std::uint8_t> index) const
{
    auto found = find(index);
    if (!found) throw std::out_of_range("multi-index outside the truncated basis");
    return *found;
}

} // namespace kaclab
