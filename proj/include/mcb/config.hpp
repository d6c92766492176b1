#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

namespace mcb {

struct MinBic {
  friend bool operator==(const MinBic&, const MinBic&) = default;
};
struct MinAic {
  friend bool operator==(const MinAic&, const MinAic&) = default;
};
struct LassoCv {
  std::size_t folds = 10;
  std::size_t grid_size = 100;
  double grid_ratio = 1e-4;
  friend bool operator==(const LassoCv&, const LassoCv&) = default;
};
struct ScadCv {
  std::size_t folds = 10;
  std::size_t grid_size = 100;
  double grid_ratio = 1e-4;
  double a = 3.7;
  friend bool operator==(const ScadCv&, const ScadCv&) = default;
};

using SelectorKind = std::variant<MinBic, MinAic, LassoCv, ScadCv>;

enum class BootstrapKind { Residual, ModifiedResidual };

// "min_bic", "min_aic", "lasso_cv" or "scad_cv".
std::string_view selector_name(const SelectorKind& kind);
std::string_view bootstrap_name(BootstrapKind kind);
bool is_information_criterion(const SelectorKind& kind);

// Residual bootstrap for MinAIC/MinBIC/ScadCV; modified residual for LassoCV.
BootstrapKind paired_bootstrap(const SelectorKind& kind);

void validate(const SelectorKind& kind);

enum class Profile { Paper, Scaled };

struct ExperimentConfig {
  std::size_t n = 300;
  std::size_t p = 15;
  std::size_t p_star = 6;
  double sigma2 = 1.0;
  double rho = 0.5;
  std::vector<double> theta_last_values{0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 1.0, 2.0};
  std::size_t B = 500;
  std::size_t reps = 100;
  double alpha = 0.1;
  std::uint64_t master_seed = 20180701;
  std::vector<SelectorKind> selectors{MinBic{}};
  // Empty means "use the paired bootstrap for each selector".
  std::optional<BootstrapKind> bootstrap_kind;
  std::size_t workers = 1;
  bool allow_unpaired_bootstrap = false;

  BootstrapKind bootstrap_for(const SelectorKind& kind) const;
  void apply(Profile profile);
  // Throws ConfigError on any out-of-range field or forbidden pairing.
  void validate() const;
};

SelectorKind selector_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SelectorKind& kind);

// Strict reader: unknown keys and missing required keys are errors.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
nlohmann::json to_json(const ExperimentConfig& config);

Profile profile_from_string(std::string_view name);

}  // namespace mcb
