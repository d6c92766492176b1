#include "mcb/mcb.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "mcb/error.hpp"
#include "mcb/kernels.hpp"

namespace mcb {

namespace {

constexpr std::size_t kExhaustiveLimit = 12;

void check_level(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ContractViolation("MCB requires a nominal level 0 < 1 - alpha < 1");
  }
}

std::size_t nested_hits(const BootstrapDraws& draws, ModelId m1, ModelId m2) {
  static_assert(sizeof(ModelId) == sizeof(std::uint64_t));
  return kernels::active().nested_count(reinterpret_cast<const std::uint64_t*>(draws.models.data()),
                                        draws.models.size(), m1.mask(), m2.mask());
}

McbBounds make_bounds(ModelId lower, ModelId upper, std::size_t hits, std::size_t B,
                      double alpha) {
  McbBounds out;
  out.lower = lower;
  out.upper = upper;
  out.width = upper.size() - lower.size();
  out.r_hat = static_cast<double>(hits) / static_cast<double>(B);
  out.alpha = alpha;
  return out;
}

}  // namespace

double r_hat(const BootstrapDraws& draws, ModelId m1, ModelId m2) {
  if (!m1.subset_of(m2)) {
    throw ContractViolation("r_hat: lower model " + m1.to_string() + " is not inside " +
                            m2.to_string());
  }
  if (draws.models.empty()) return 0.0;
  return static_cast<double>(nested_hits(draws, m1, m2)) /
         static_cast<double>(draws.models.size());
}

std::size_t required_hits(std::size_t B, double alpha) {
  const double target = (1.0 - alpha) * static_cast<double>(B);
  auto need = static_cast<std::size_t>(std::ceil(target - 1e-9));
  return std::min(need, B);
}

McbBounds solve_mcb(const BootstrapDraws& draws, double alpha, std::size_t p) {
  check_level(alpha);
  if (draws.models.empty()) throw ContractViolation("solve_mcb: no bootstrap draws");
  if (draws.freq.size() != p) throw ContractViolation("solve_mcb: frequency vector length != p");
  const std::size_t B = draws.models.size();
  const std::size_t need = required_hits(B, alpha);

  std::vector<std::size_t> order(p);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return draws.freq[a] > draws.freq[b]; });
  std::vector<ModelId> prefix(p + 1);
  for (std::size_t j = 0; j < p; ++j) prefix[j + 1] = prefix[j].with(order[j]);

  for (std::size_t w = 0; w <= p; ++w) {
    std::size_t best_hits = 0;
    std::size_t best_j = 0;
    for (std::size_t j = 0; j + w <= p; ++j) {
      const std::size_t hits = nested_hits(draws, prefix[j], prefix[j + w]);
      if (j == 0 || hits > best_hits) {
        best_hits = hits;
        best_j = j;
      }
    }
    if (best_hits >= need) {
      return make_bounds(prefix[best_j], prefix[best_j + w], best_hits, B, alpha);
    }
  }
  // Unreachable: (empty, full) contains every draw.
  throw ContractViolation("solve_mcb: no feasible pair (draws outside the p-variable range?)");
}

McbBounds solve_mcb_exhaustive(const BootstrapDraws& draws, double alpha, std::size_t p) {
  check_level(alpha);
  if (p > kExhaustiveLimit) {
    throw ContractViolation("solve_mcb_exhaustive: p = " + std::to_string(p) +
                            " exceeds the limit of " + std::to_string(kExhaustiveLimit));
  }
  if (draws.models.empty()) throw ContractViolation("solve_mcb_exhaustive: no bootstrap draws");
  const std::size_t B = draws.models.size();
  const std::size_t need = required_hits(B, alpha);

  // Distinct draws with multiplicities.
  std::map<std::uint64_t, std::size_t> histogram;
  for (ModelId m : draws.models) ++histogram[m.mask()];

  const std::uint64_t count = std::uint64_t{1} << p;
  bool found = false;
  std::size_t best_width = 0;
  std::size_t best_hits = 0;
  ModelId best_lower, best_upper;

  for (std::uint64_t upper = 0; upper < count; ++upper) {
    const ModelId up{upper};
    // Enumerate every submask of upper, including 0.
    std::uint64_t lower = upper;
    while (true) {
      const ModelId lo{lower};
      const std::size_t width = up.size() - lo.size();
      if (!found || width <= best_width) {
        std::size_t hits = 0;
        for (const auto& [mask, mult] : histogram) {
          if ((lower & ~mask) == 0 && (mask & ~upper) == 0) hits += mult;
        }
        if (hits >= need) {
          const bool better =
              !found || width < best_width ||
              (width == best_width &&
               (hits > best_hits ||
                (hits == best_hits &&
                 (lo < best_lower || (lo == best_lower && up < best_upper)))));
          if (better) {
            found = true;
            best_width = width;
            best_hits = hits;
            best_lower = lo;
            best_upper = up;
          }
        }
      }
      if (lower == 0) break;
      lower = (lower - 1) & upper;
    }
  }
  if (!found) {
    throw ContractViolation("solve_mcb_exhaustive: no feasible pair (draws outside p?)");
  }
  return make_bounds(best_lower, best_upper, best_hits, B, alpha);
}

bool covers(const McbBounds& bounds, ModelId m_star) {
  return bounds.lower.subset_of(m_star) && m_star.subset_of(bounds.upper);
}

}  // namespace mcb
