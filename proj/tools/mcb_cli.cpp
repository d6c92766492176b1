// Command-line harness for model confidence bound experiments.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mcb/error.hpp"
#include "mcb/harness.hpp"
#include "mcb/kernels.hpp"
#include "mcb/oracle.hpp"

namespace {

struct Common {
  std::optional<std::size_t> workers;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> profile;
  bool allow_unpaired = false;
};

mcb::ExperimentConfig load(const std::string& path, const Common& common) {
  std::ifstream in(path);
  if (!in) throw mcb::ConfigError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw mcb::ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  if (common.allow_unpaired && j.is_object()) j["allow_unpaired_bootstrap"] = true;
  mcb::ExperimentConfig config = mcb::config_from_json(j);
  if (common.profile) config.apply(mcb::profile_from_string(*common.profile));
  if (common.seed) config.master_seed = *common.seed;
  if (common.workers) config.workers = *common.workers;
  config.validate();
  return config;
}

std::vector<std::size_t> parse_n_list(const std::string& csv) {
  std::vector<std::size_t> out;
  std::stringstream in(csv);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(item, &pos);
    if (pos != item.size()) throw mcb::ConfigError("--n-list: '" + item + "' is not an integer");
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) throw mcb::ConfigError("--n-list must name at least one sample size");
  return out;
}

void print_cp_star(const mcb::CoverageReport& report) {
  for (const auto& s : report.cp_star) {
    std::printf("CP* %-9s %.4f\n", s.selector.c_str(), s.value);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bootstrap model confidence bounds: coverage experiments"};
  app.require_subcommand(1);
  app.fallthrough();

  Common common;
  app.add_option("--workers", common.workers, "Worker threads (overrides config)");
  app.add_option("--seed", common.seed, "Master seed (overrides config)");
  app.add_option("--profile", common.profile, "paper (reps=200, B=1000) or scaled (reps=100, B=500)")
      ->check(CLI::IsMember({"paper", "scaled"}));
  app.add_flag("--allow-unpaired-bootstrap", common.allow_unpaired,
               "Permit a bootstrap kind other than the selector's paired one");

  std::string config_path;
  std::string out_dir;

  auto* sweep = app.add_subcommand("sweep", "Coverage over the theta grid and CP* per selector");
  sweep->add_option("--config", config_path, "Experiment config (JSON)")->required();
  sweep->add_option("--out", out_dir, "Output directory")->required();

  double gamma = 0.0;
  std::string n_list_csv;
  std::size_t coord = 0;
  auto* drift = app.add_subcommand("drift", "Coverage along theta0 + gamma/sqrt(n) e_coord");
  drift->add_option("--config", config_path, "Experiment config (JSON)")->required();
  drift->add_option("--gamma", gamma, "Drift constant")->required();
  drift->add_option("--n-list", n_list_csv, "Comma-separated increasing sample sizes")->required();
  drift->add_option("--coord", coord, "1-based coordinate that is zero in theta0")->required();
  drift->add_option("--out", out_dir, "Output directory")->required();

  std::string collapse_n_list;
  auto* collapse = app.add_subcommand("check-collapse",
                                      "Selection consistency, collapse and bootstrap agreement rates");
  collapse->add_option("--config", config_path, "Experiment config (JSON)")->required();
  collapse->add_option("--out", out_dir, "Output directory")->required();
  collapse->add_option("--n-list", collapse_n_list, "Optional comma-separated sample sizes");

  std::size_t instances = 500;
  auto* oracle = app.add_subcommand("oracle-test", "Solver and best-subset oracle suites");
  oracle->add_option("--instances", instances, "Random instances per suite");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sweep) {
      const auto config = load(config_path, common);
      const auto report = mcb::run_sweep(config, config.workers);
      mcb::emit_report(report, out_dir, "sweep");
      print_cp_star(report);
    } else if (*drift) {
      if (coord < 1) throw mcb::ConfigError("--coord is 1-based");
      const auto config = load(config_path, common);
      const auto report = mcb::run_drift(config, gamma, parse_n_list(n_list_csv), coord - 1,
                                         config.workers);
      mcb::emit_report(report, out_dir, "drift");
      for (const auto& s : config.selectors) {
        for (const auto& pt : mcb::drift_points(report, s)) {
          std::printf("%-9s n=%-7zu cp=%.4f (se %.4f)\n",
                      std::string(mcb::selector_name(s)).c_str(), pt.n, pt.cp, pt.se);
        }
      }
    } else if (*collapse) {
      const auto config = load(config_path, common);
      std::vector<std::size_t> ns;
      if (!collapse_n_list.empty()) ns = parse_n_list(collapse_n_list);
      const auto report = mcb::run_collapse_check(config, ns, config.workers);
      mcb::emit_report(report, out_dir, "collapse");
      for (const auto& c : report.cells) {
        const auto e = mcb::collapse_estimate(c);
        std::printf("%-9s theta_last=%-6s n=%-6zu select_correct=%.3f collapse=%.3f agreement=%.3f\n",
                    std::string(mcb::selector_name(c.selector)).c_str(), c.theta_label.c_str(), c.n,
                    e.select_correct_rate, e.collapse_rate, e.agreement_mean);
      }
    } else if (*oracle) {
      const std::uint64_t seed = common.seed.value_or(1);
      bool ok = true;
      for (const auto& r : {mcb::mcb_oracle_suite(seed, instances),
                            mcb::best_subset_oracle_suite(seed, instances)}) {
        std::printf("[%s] %s: %zu/%zu instances\n", r.passed() ? "PASS" : "FAIL", r.name.c_str(),
                    r.instances - r.failures, r.instances);
        for (const auto& m : r.messages) std::printf("    %s\n", m.c_str());
        ok = ok && r.passed();
      }
      return ok ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
