#include "mcb/model_id.hpp"

#include <stdexcept>

namespace mcb {

ModelId ModelId::from_indices(std::initializer_list<std::size_t> indices) {
  return from_indices(std::vector<std::size_t>(indices));
}

ModelId ModelId::from_indices(const std::vector<std::size_t>& indices) {
  std::uint64_t mask = 0;
  for (std::size_t j : indices) {
    if (j >= kMaxRegressors) {
      throw std::out_of_range("ModelId: variable index " + std::to_string(j) +
                              " exceeds the 63-regressor limit");
    }
    mask |= std::uint64_t{1} << j;
  }
  return ModelId{mask};
}

std::vector<std::size_t> ModelId::indices() const {
  std::vector<std::size_t> out;
  out.reserve(size());
  for (std::uint64_t m = mask_; m != 0; m &= m - 1) {
    out.push_back(static_cast<std::size_t>(std::countr_zero(m)));
  }
  return out;
}

std::string ModelId::to_string() const {
  std::string out = "{";
  bool first = true;
  for (std::size_t j : indices()) {
    if (!first) out += ',';
    out += std::to_string(j + 1);
    first = false;
  }
  out += '}';
  return out;
}

}  // namespace mcb
