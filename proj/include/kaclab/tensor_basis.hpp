#ifndef KACLAB_TENSOR_BASIS_HPP
#define KACLAB_TENSOR_BASIS_HPP

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

namespace kaclab {

inline constexpr std::size_t kDefaultMaxBasisSize = 60000;

/// Truncated tensor Hermite basis on R^{M+N}.
///
/// Coordinates [0, system_coords) are the system velocities v, the remaining
/// ones the reservoir velocities w. Multi-indices with total degree <= cutoff
/// are ordered by total degree, then lexicographically (first coordinate
/// largest first). Index 0 is always the constant function.
class TensorBasis {
public:
    TensorBasis(int system_coords, int reservoir_coords, int cutoff,
                std::size_t max_size = kDefaultMaxBasisSize);

    int system_coords() const { return system_coords_; }
    int reservoir_coords() const { return reservoir_coords_; }
    int num_coords() const { return system_coords_ + reservoir_coords_; }
    int cutoff() const { return cutoff_; }
    std::size_t size() const { return total_degree_.size(); }

    std::span<const std::uint8_t> multi_index(std::size_t flat) const
    {
        return {degrees_.data() + flat * num_coords(), std::size_t(num_coords())};
    }
    int degree(std::size_t flat, int coord) const { return degrees_[flat * num_coords() + coord]; }
    int total_degree(std::size_t flat) const { return total_degree_[flat]; }
    /// True when every reservoir degree is zero.
    bool is_system_only(std::size_t flat) const;

    std::optional<std::size_t> find(std::span<const std::uint8_t> index) const;
    /// Like find() but throws std::out_of_range for indices outside the basis.
    std::size_t index_of(std::span<const std::uint8_t> index) const;

    /// Number of multi-indices over n coordinates with total degree <= cutoff.
    static std::size_t count(int num_coords, int cutoff);

private:
    std::uint64_t key(std::span<const std::uint8_t> index) const;

    int system_coords_;
    int reservoir_coords_;
    int cutoff_;
    std::vector<std::uint8_t> degrees_;
    std::vector<int> total_degree_;
    std::unordered_map<std::uint64_t, std::size_t> lookup_;
};

using BasisPtr = std::shared_ptr<const TensorBasis>;

} // namespace kaclab

#endif
