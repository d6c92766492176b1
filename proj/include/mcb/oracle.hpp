#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "mcb/bootstrap.hpp"

namespace mcb {

struct McbInstance {
  BootstrapDraws draws;
  double alpha = 0.1;
  std::size_t p = 0;
};

// Random mixture-of-models draws with p <= 8, B <= 200 and alpha in (0, 0.5).
McbInstance random_mcb_instance(std::uint64_t seed);

struct SuiteResult {
  std::string name;
  std::size_t instances = 0;
  std::size_t failures = 0;
  std::vector<std::string> messages;  // first few failure descriptions

  bool passed() const { return failures == 0; }
};

// Prefix solver vs exhaustive solver: width dominance, feasibility,
// nestedness, r_hat(empty, full) = 1, collapse consistency.
SuiteResult mcb_oracle_suite(std::uint64_t seed, std::size_t instances);

// Incremental subset walk vs naive per-subset refits (n = 80, p = 10) under
// both the AIC and BIC penalties.
SuiteResult best_subset_oracle_suite(std::uint64_t seed, std::size_t instances);

}  // namespace mcb
