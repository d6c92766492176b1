#include <doctest.h>

#include <json.hpp>

#include "mcb/config.hpp"
#include "mcb/error.hpp"

using nlohmann::json;

namespace {

json base() {
  return json::parse(R"({
    "n": 300, "p": 15, "p_star": 6, "sigma2": 1.0, "rho": 0.5,
    "theta_last_values": [0.05, 0.5, 2],
    "B": 500, "reps": 100, "alpha": 0.1, "master_seed": 20180701,
    "selector": {"kind": "min_bic"}
  })");
}

}  // namespace

TEST_CASE("a complete config parses") {
  const auto c = mcb::config_from_json(base());
  CHECK(c.n == 300);
  CHECK(c.p == 15);
  CHECK(c.theta_last_values.size() == 3);
  CHECK(c.selectors.size() == 1);
  CHECK(std::holds_alternative<mcb::MinBic>(c.selectors[0]));
  CHECK(c.bootstrap_for(c.selectors[0]) == mcb::BootstrapKind::Residual);
}

TEST_CASE("unknown and missing keys are rejected") {
  auto j = base();
  j["sigma"] = 1.0;
  CHECK_THROWS_AS(mcb::config_from_json(j), mcb::ConfigError);
  j = base();
  j.erase("alpha");
  CHECK_THROWS_AS(mcb::config_from_json(j), mcb::ConfigError);
  j = base();
  j["selector"] = json{{"kind", "lasso_cv"}, {"fold", 5}};
  CHECK_THROWS_AS(mcb::config_from_json(j), mcb::ConfigError);
  j = base();
  j["selector"] = json{{"kind", "ridge"}};
  CHECK_THROWS_AS(mcb::config_from_json(j), mcb::ConfigError);
}

TEST_CASE("out-of-range fields are rejected") {
  const std::vector<std::pair<std::string, json>> bad{
      {"p", 0},          {"p", 64},        {"p_star", 16},   {"sigma2", 0.0},
      {"rho", 1.0},      {"rho", -0.1},    {"B", 0},         {"reps", 0},
      {"alpha", 0.0},    {"alpha", 1.0},   {"n", 15},        {"theta_last_values", json::array()}};
  for (const auto& [key, value] : bad) {
    auto j = base();
    j[key] = value;
    CHECK_THROWS_AS(mcb::config_from_json(j), mcb::ConfigError);
  }
  auto j = base();
  j["selector"] = json{{"kind", "scad_cv"}, {"a", 2.0}};
  CHECK_THROWS_AS(mcb::config_from_json(j), mcb::ConfigError);
  j["selector"] = json{{"kind", "lasso_cv"}, {"folds", 1}};
  CHECK_THROWS_AS(mcb::config_from_json(j), mcb::ConfigError);
  j["selector"] = json{{"kind", "lasso_cv"}, {"grid_ratio", 1.0}};
  CHECK_THROWS_AS(mcb::config_from_json(j), mcb::ConfigError);
}

TEST_CASE("selector and bootstrap pairing is enforced unless overridden") {
  auto j = base();
  j["selector"] = json{{"kind", "lasso_cv"}};
  j["bootstrap_kind"] = "residual";
  CHECK_THROWS_AS(mcb::config_from_json(j), mcb::ConfigError);
  j["allow_unpaired_bootstrap"] = true;
  const auto c = mcb::config_from_json(j);
  CHECK(c.bootstrap_for(c.selectors[0]) == mcb::BootstrapKind::Residual);

  j = base();
  j["bootstrap_kind"] = "modified_residual";
  CHECK_THROWS_AS(mcb::config_from_json(j), mcb::ConfigError);

  j = base();
  j["selector"] = json::array({json{{"kind", "min_bic"}}, json{{"kind", "lasso_cv"}},
                               json{{"kind", "scad_cv"}}, json{{"kind", "min_aic"}}});
  const auto all = mcb::config_from_json(j);
  CHECK(all.bootstrap_for(all.selectors[0]) == mcb::BootstrapKind::Residual);
  CHECK(all.bootstrap_for(all.selectors[1]) == mcb::BootstrapKind::ModifiedResidual);
  CHECK(all.bootstrap_for(all.selectors[2]) == mcb::BootstrapKind::Residual);
  CHECK(all.bootstrap_for(all.selectors[3]) == mcb::BootstrapKind::Residual);
}

TEST_CASE("the echo round-trips and omits workers") {
  auto j = base();
  j["workers"] = 4;
  j["selector"] = json::array({json{{"kind", "scad_cv"}, {"folds", 5}}, json{{"kind", "min_aic"}}});
  const auto c = mcb::config_from_json(j);
  CHECK(c.workers == 4);
  const json echo = mcb::to_json(c);
  CHECK_FALSE(echo.contains("workers"));
  const auto again = mcb::config_from_json(echo);
  CHECK(mcb::to_json(again) == echo);
  CHECK(again.selectors == c.selectors);
}

TEST_CASE("profiles set reps and B") {
  mcb::ExperimentConfig c;
  c.apply(mcb::Profile::Paper);
  CHECK(c.reps == 200);
  CHECK(c.B == 1000);
  c.apply(mcb::profile_from_string("scaled"));
  CHECK(c.reps == 100);
  CHECK(c.B == 500);
  CHECK_THROWS_AS(mcb::profile_from_string("huge"), mcb::ConfigError);
}
