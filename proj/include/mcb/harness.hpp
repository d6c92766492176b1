#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "mcb/config.hpp"
#include "mcb/datagen.hpp"
#include "mcb/mcb.hpp"
#include "mcb/rng.hpp"
#include "mcb/selectors.hpp"

namespace mcb {

// Aggregated Monte Carlo outcome of one (theta, selector) cell. All rates are
// stored as integer counts over `reps`.
struct CellResult {
  std::string theta_label;
  SelectorKind selector;
  BootstrapKind bootstrap = BootstrapKind::Residual;
  std::size_t n = 0;
  std::size_t B = 0;
  std::vector<double> theta;
  ModelId m_star;
  std::size_t reps = 0;
  std::size_t covered = 0;          // lower ⊆ m* ⊆ upper
  std::size_t collapsed = 0;        // width 0 and lower = m_hat
  std::size_t selected_true = 0;    // m_hat = m*
  std::size_t full_collapse = 0;    // lower = upper = m_hat = m*
  std::size_t width_sum = 0;
  std::size_t agreement_hits = 0;   // sum over reps of #{b : m^(b) = m_hat}

  double cp() const { return rate(covered); }
  double collapse_rate() const { return rate(collapsed); }
  double select_correct_rate() const { return rate(selected_true); }
  double full_collapse_rate() const { return rate(full_collapse); }
  double mean_width() const { return rate(width_sum); }
  double agreement_mean() const;

  // Monte Carlo standard error sqrt(q (1 - q) / reps) of a rate q.
  double standard_error(double q) const;

 private:
  double rate(std::size_t count) const {
    return reps == 0 ? 0.0 : static_cast<double>(count) / static_cast<double>(reps);
  }
};

struct CpStar {
  std::string selector;
  double value = 0.0;
};

struct CoverageReport {
  std::string experiment;  // "sweep", "drift" or "check_collapse"
  ExperimentConfig config;
  std::vector<CellResult> cells;
  std::vector<CpStar> cp_star;  // one entry per configured selector, config order
  nlohmann::json parameters = nlohmann::json::object();  // experiment-specific inputs
  nlohmann::json seeds = nlohmann::json::object();
  double wall_time = 0.0;
};

// Minimum cp over the cells of each selector, in config order.
std::vector<CpStar> compute_cp_star(const std::vector<CellResult>& cells,
                                    const std::vector<SelectorKind>& selectors);

// Seed of the fixed design for a given sample size and correlation.
std::uint64_t design_seed(std::uint64_t master_seed, std::size_t n, double rho);
std::shared_ptr<const DesignMatrix> design_for(const ExperimentConfig& config, std::size_t n);

// Outcome of one replication; exposed for tests and diagnostics.
struct RepOutcome {
  ModelId m_hat;
  McbBounds bounds;
  std::size_t agreement_hits = 0;
};

RepOutcome run_replication(const ExperimentConfig& config, const SelectionEngine& engine,
                           const ParamVector& theta, Stream rep_stream,
                           std::size_t bootstrap_workers = 1);

// reps replications of one cell; replication i uses cell_stream.derive(i).
CellResult run_cell(const ExperimentConfig& config, const SelectionEngine& engine,
                    const ParamVector& theta, Stream cell_stream, std::string theta_label,
                    std::size_t workers);

// Every (theta_last, selector) cell on the config's design; cp_star per selector.
CoverageReport run_sweep(const ExperimentConfig& config, std::size_t workers);

struct DriftPoint {
  std::size_t n = 0;
  double cp = 0.0;
  double se = 0.0;
};

// theta0 = make_theta(p, p_star, theta_last_values[0]); for each n the design
// is regenerated and theta^(n) = perturb_theta(theta0, coord, gamma, n).
// coord is 0-based. Cells are labelled "n=<n>".
CoverageReport run_drift(const ExperimentConfig& config, double gamma,
                         const std::vector<std::size_t>& n_list, std::size_t coord,
                         std::size_t workers);
std::vector<DriftPoint> drift_points(const CoverageReport& report, const SelectorKind& selector);

// Each step may rise by at most z combined standard errors.
bool non_increasing_within(const std::vector<double>& values, const std::vector<double>& se,
                           double z = 2.0);

struct CollapseEstimate {
  double select_correct_rate = 0.0;  // P(m_hat = m*)
  double collapse_rate = 0.0;        // P(lower = upper = m_hat = m*)
  double agreement_mean = 0.0;       // E[agreement_rate(draws, m_hat)]
};

CollapseEstimate collapse_estimate(const CellResult& cell);

// One cell for every (theta_last, selector, n) with n from n_list (config.n if empty).
CoverageReport run_collapse_check(const ExperimentConfig& config,
                                  const std::vector<std::size_t>& n_list, std::size_t workers);

// Fixes one response (replication 0 of the cell) and repeats the bootstrap
// `batches` times with independent streams; returns the agreement rates.
std::vector<double> agreement_batches(const ExperimentConfig& config, const ParamVector& theta,
                                      std::size_t batches, std::size_t workers);

double sample_variance(const std::vector<double>& values);

// Writes <dir>/<stem>.csv, <dir>/<stem>.json and <dir>/config.json.
void emit_report(const CoverageReport& report, const std::string& dir, const std::string& stem);
std::string report_csv(const CoverageReport& report);
nlohmann::json report_json(const CoverageReport& report);

}  // namespace mcb
