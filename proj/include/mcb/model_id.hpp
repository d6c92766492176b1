#pragma once

#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace mcb {

inline constexpr std::size_t kMaxRegressors = 63;

// A set of regressor indices stored as a bitmask: bit j set <=> variable j+1
// is in the model. Index arguments are 0-based; to_string() prints 1-based
// labels to match the usual statistical notation.
class ModelId {
 public:
  constexpr ModelId() = default;
  constexpr explicit ModelId(std::uint64_t mask) : mask_(mask) {}

  static constexpr ModelId empty() { return ModelId{}; }
  static constexpr ModelId full(std::size_t p) {
    return ModelId{p >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << p) - 1};
  }
  static ModelId from_indices(std::initializer_list<std::size_t> indices);
  static ModelId from_indices(const std::vector<std::size_t>& indices);

  constexpr std::uint64_t mask() const { return mask_; }
  constexpr std::size_t size() const {
    return static_cast<std::size_t>(std::popcount(mask_));
  }
  constexpr bool is_empty() const { return mask_ == 0; }
  constexpr bool contains(std::size_t j) const { return (mask_ >> j) & 1U; }
  constexpr ModelId with(std::size_t j) const {
    return ModelId{mask_ | (std::uint64_t{1} << j)};
  }
  constexpr ModelId without(std::size_t j) const {
    return ModelId{mask_ & ~(std::uint64_t{1} << j)};
  }
  constexpr bool subset_of(ModelId other) const {
    return (mask_ & ~other.mask_) == 0;
  }
  // True if no bit at or above position p is set.
  constexpr bool fits(std::size_t p) const {
    return p >= 64 || (mask_ >> p) == 0;
  }

  std::vector<std::size_t> indices() const;
  std::string to_string() const;

  friend constexpr bool operator==(ModelId, ModelId) = default;
  friend constexpr auto operator<=>(ModelId a, ModelId b) {
    return a.mask_ <=> b.mask_;
  }

 private:
  std::uint64_t mask_ = 0;
};

}  // namespace mcb
