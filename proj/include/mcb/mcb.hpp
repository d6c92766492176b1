#pragma once

#include <cstddef>

#include "mcb/bootstrap.hpp"
#include "mcb/model_id.hpp"

namespace mcb {

struct McbBounds {
  ModelId lower;
  ModelId upper;
  std::size_t width = 0;   // |upper| - |lower|
  double r_hat = 0.0;      // achieved bootstrap coverage
  double alpha = 0.0;
};

// Fraction of draws d with m1 ⊆ d ⊆ m2. Throws ContractViolation unless m1 ⊆ m2.
double r_hat(const BootstrapDraws& draws, ModelId m1, ModelId m2);

// Smallest count c with c / B >= 1 - alpha (guarding against rounding in 1 - alpha).
std::size_t required_hits(std::size_t B, double alpha);

// Frequency-ordered prefix search: variables sorted by inclusion frequency
// (descending, ties by index), nested prefixes L_0 ⊂ ... ⊂ L_p, and the
// narrowest pair (L_j, L_{j+w}) with r_hat >= 1 - alpha. Among equal widths the
// largest r_hat wins, then the smallest j.
McbBounds solve_mcb(const BootstrapDraws& draws, double alpha, std::size_t p);

// Optimum over every nested pair m1 ⊆ m2 (3^p pairs): minimal width, then
// maximal r_hat, then lexicographically smallest (m1.mask, m2.mask). p <= 12.
McbBounds solve_mcb_exhaustive(const BootstrapDraws& draws, double alpha, std::size_t p);

// lower ⊆ m_star ⊆ upper.
bool covers(const McbBounds& bounds, ModelId m_star);

}  // namespace mcb
