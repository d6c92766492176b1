#include "mcb/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "mcb/error.hpp"
#include "mcb/model_id.hpp"

namespace mcb {

namespace {

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

void reject_unknown_keys(const nlohmann::json& j, const std::set<std::string>& known,
                         std::string_view where) {
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) {
      throw ConfigError("unknown key '" + key + "' in " + std::string(where));
    }
  }
}

const nlohmann::json& required(const nlohmann::json& j, const std::string& key,
                               std::string_view where) {
  auto it = j.find(key);
  if (it == j.end()) {
    throw ConfigError("missing required key '" + key + "' in " + std::string(where));
  }
  return *it;
}

std::size_t as_count(const nlohmann::json& v, const std::string& key) {
  if (!v.is_number_integer() || (v.is_number_integer() && v.get<std::int64_t>() < 0 &&
                                 !v.is_number_unsigned())) {
    throw ConfigError("'" + key + "' must be a nonnegative integer");
  }
  return v.get<std::size_t>();
}

double as_real(const nlohmann::json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError("'" + key + "' must be a number");
  return v.get<double>();
}

BootstrapKind bootstrap_from_string(const std::string& s) {
  if (s == "residual") return BootstrapKind::Residual;
  if (s == "modified_residual") return BootstrapKind::ModifiedResidual;
  throw ConfigError("unknown bootstrap_kind '" + s + "'");
}

}  // namespace

std::string_view selector_name(const SelectorKind& kind) {
  return std::visit(Overloaded{[](const MinBic&) { return std::string_view{"min_bic"}; },
                               [](const MinAic&) { return std::string_view{"min_aic"}; },
                               [](const LassoCv&) { return std::string_view{"lasso_cv"}; },
                               [](const ScadCv&) { return std::string_view{"scad_cv"}; }},
                    kind);
}

std::string_view bootstrap_name(BootstrapKind kind) {
  return kind == BootstrapKind::Residual ? "residual" : "modified_residual";
}

bool is_information_criterion(const SelectorKind& kind) {
  return std::holds_alternative<MinBic>(kind) || std::holds_alternative<MinAic>(kind);
}

BootstrapKind paired_bootstrap(const SelectorKind& kind) {
  return std::holds_alternative<LassoCv>(kind) ? BootstrapKind::ModifiedResidual
                                               : BootstrapKind::Residual;
}

void validate(const SelectorKind& kind) {
  auto check_cv = [](std::size_t folds, std::size_t grid_size, double grid_ratio) {
    if (folds < 2) throw ConfigError("selector: folds must be >= 2");
    if (grid_size < 2) throw ConfigError("selector: grid_size must be >= 2");
    if (!(grid_ratio > 0.0 && grid_ratio < 1.0)) {
      throw ConfigError("selector: grid_ratio must lie in (0, 1)");
    }
  };
  std::visit(Overloaded{[](const MinBic&) {}, [](const MinAic&) {},
                        [&](const LassoCv& k) { check_cv(k.folds, k.grid_size, k.grid_ratio); },
                        [&](const ScadCv& k) {
                          check_cv(k.folds, k.grid_size, k.grid_ratio);
                          if (!(k.a > 2.0)) throw ConfigError("selector: SCAD a must be > 2");
                        }},
             kind);
}

BootstrapKind ExperimentConfig::bootstrap_for(const SelectorKind& kind) const {
  return bootstrap_kind.value_or(paired_bootstrap(kind));
}

void ExperimentConfig::apply(Profile profile) {
  if (profile == Profile::Paper) {
    reps = 200;
    B = 1000;
  } else {
    reps = 100;
    B = 500;
  }
}

void ExperimentConfig::validate() const {
  if (p < 1 || p > kMaxRegressors) throw ConfigError("p must lie in 1..=63");
  if (n <= p) throw ConfigError("n must exceed p");
  if (p_star > p) throw ConfigError("p_star must not exceed p");
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw ConfigError("sigma2 must be positive");
  if (!(rho >= 0.0 && rho < 1.0)) throw ConfigError("rho must lie in [0, 1)");
  if (theta_last_values.empty()) throw ConfigError("theta_last_values must be non-empty");
  for (double t : theta_last_values) {
    if (!std::isfinite(t)) throw ConfigError("theta_last_values must be finite");
  }
  if (B < 1) throw ConfigError("B must be positive");
  if (reps < 1) throw ConfigError("reps must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  if (workers < 1) throw ConfigError("workers must be positive");
  if (selectors.empty()) throw ConfigError("at least one selector is required");
  for (const auto& s : selectors) {
    mcb::validate(s);
    if (bootstrap_for(s) != paired_bootstrap(s) && !allow_unpaired_bootstrap) {
      throw ConfigError("selector '" + std::string(selector_name(s)) + "' requires the " +
                        std::string(bootstrap_name(paired_bootstrap(s))) +
                        " bootstrap; pass the explicit override to pair it with '" +
                        std::string(bootstrap_name(bootstrap_for(s))) + "'");
    }
  }
}

SelectorKind selector_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("selector must be a JSON object");
  const std::string kind = required(j, "kind", "selector").get<std::string>();
  SelectorKind out;
  if (kind == "min_bic" || kind == "min_aic") {
    reject_unknown_keys(j, {"kind"}, "selector");
    out = kind == "min_bic" ? SelectorKind{MinBic{}} : SelectorKind{MinAic{}};
  } else if (kind == "lasso_cv") {
    reject_unknown_keys(j, {"kind", "folds", "grid_size", "grid_ratio"}, "selector");
    LassoCv k;
    if (j.contains("folds")) k.folds = as_count(j["folds"], "folds");
    if (j.contains("grid_size")) k.grid_size = as_count(j["grid_size"], "grid_size");
    if (j.contains("grid_ratio")) k.grid_ratio = as_real(j["grid_ratio"], "grid_ratio");
    out = k;
  } else if (kind == "scad_cv") {
    reject_unknown_keys(j, {"kind", "folds", "grid_size", "grid_ratio", "a"}, "selector");
    ScadCv k;
    if (j.contains("folds")) k.folds = as_count(j["folds"], "folds");
    if (j.contains("grid_size")) k.grid_size = as_count(j["grid_size"], "grid_size");
    if (j.contains("grid_ratio")) k.grid_ratio = as_real(j["grid_ratio"], "grid_ratio");
    if (j.contains("a")) k.a = as_real(j["a"], "a");
    out = k;
  } else {
    throw ConfigError("unknown selector kind '" + kind + "'");
  }
  validate(out);
  return out;
}

nlohmann::json to_json(const SelectorKind& kind) {
  return std::visit(
      Overloaded{[](const MinBic&) { return nlohmann::json{{"kind", "min_bic"}}; },
                 [](const MinAic&) { return nlohmann::json{{"kind", "min_aic"}}; },
                 [](const LassoCv& k) {
                   return nlohmann::json{{"kind", "lasso_cv"},
                                         {"folds", k.folds},
                                         {"grid_size", k.grid_size},
                                         {"grid_ratio", k.grid_ratio}};
                 },
                 [](const ScadCv& k) {
                   return nlohmann::json{{"kind", "scad_cv"},
                                         {"folds", k.folds},
                                         {"grid_size", k.grid_size},
                                         {"grid_ratio", k.grid_ratio},
                                         {"a", k.a}};
                 }},
      kind);
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown_keys(j,
                      {"n", "p", "p_star", "sigma2", "rho", "theta_last_values", "B", "reps",
                       "alpha", "master_seed", "selector", "bootstrap_kind", "workers",
                       "allow_unpaired_bootstrap"},
                      "config");
  constexpr std::string_view where = "config";
  ExperimentConfig c;
  c.n = as_count(required(j, "n", where), "n");
  c.p = as_count(required(j, "p", where), "p");
  c.p_star = as_count(required(j, "p_star", where), "p_star");
  c.sigma2 = as_real(required(j, "sigma2", where), "sigma2");
  c.rho = as_real(required(j, "rho", where), "rho");
  const auto& thetas = required(j, "theta_last_values", where);
  if (!thetas.is_array()) throw ConfigError("'theta_last_values' must be an array");
  c.theta_last_values.clear();
  for (const auto& t : thetas) c.theta_last_values.push_back(as_real(t, "theta_last_values"));
  c.B = as_count(required(j, "B", where), "B");
  c.reps = as_count(required(j, "reps", where), "reps");
  c.alpha = as_real(required(j, "alpha", where), "alpha");
  const auto& seed = required(j, "master_seed", where);
  if (!seed.is_number_integer()) throw ConfigError("'master_seed' must be an integer");
  c.master_seed = seed.is_number_unsigned() ? seed.get<std::uint64_t>()
                                            : static_cast<std::uint64_t>(seed.get<std::int64_t>());
  const auto& sel = required(j, "selector", where);
  c.selectors.clear();
  if (sel.is_array()) {
    for (const auto& s : sel) c.selectors.push_back(selector_from_json(s));
  } else {
    c.selectors.push_back(selector_from_json(sel));
  }
  if (j.contains("bootstrap_kind")) {
    c.bootstrap_kind = bootstrap_from_string(j["bootstrap_kind"].get<std::string>());
  }
  if (j.contains("workers")) c.workers = as_count(j["workers"], "workers");
  if (j.contains("allow_unpaired_bootstrap")) {
    c.allow_unpaired_bootstrap = j["allow_unpaired_bootstrap"].get<bool>();
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["n"] = c.n;
  j["p"] = c.p;
  j["p_star"] = c.p_star;
  j["sigma2"] = c.sigma2;
  j["rho"] = c.rho;
  j["theta_last_values"] = c.theta_last_values;
  j["B"] = c.B;
  j["reps"] = c.reps;
  j["alpha"] = c.alpha;
  j["master_seed"] = c.master_seed;
  if (c.selectors.size() == 1) {
    j["selector"] = to_json(c.selectors.front());
  } else {
    j["selector"] = nlohmann::json::array();
    for (const auto& s : c.selectors) j["selector"].push_back(to_json(s));
  }
  if (c.bootstrap_kind) j["bootstrap_kind"] = bootstrap_name(*c.bootstrap_kind);
  // workers is an execution detail; results do not depend on it.
  if (c.allow_unpaired_bootstrap) j["allow_unpaired_bootstrap"] = true;
  return j;
}

Profile profile_from_string(std::string_view name) {
  if (name == "paper") return Profile::Paper;
  if (name == "scaled") return Profile::Scaled;
  throw ConfigError("unknown profile '" + std::string(name) + "' (expected paper|scaled)");
}

}  // namespace mcb
