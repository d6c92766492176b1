#include "mcb/harness.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <map>
#include <sstream>
#include <variant>

#include "mcb/bootstrap.hpp"
#include "mcb/error.hpp"
#include "mcb/parallel.hpp"

namespace mcb {

namespace {

struct CellJob {
  const SelectionEngine* engine = nullptr;
  ParamVector theta;
  Stream stream{0};
  std::string label;
};

std::string real_label(double v) { return nlohmann::json(v).dump(); }

// Flattens every (cell, replication) pair into one parallel loop and folds
// the outcomes back in index order.
std::vector<CellResult> run_cells(const ExperimentConfig& config, const std::vector<CellJob>& jobs,
                                  std::size_t workers) {
  const std::size_t reps = config.reps;
  const std::size_t total = jobs.size() * reps;
  std::vector<RepOutcome> outcomes(total);
  const std::size_t inner = std::max<std::size_t>(1, workers / std::max<std::size_t>(1, total));

  parallel_for(total, workers, [&](std::size_t t) {
    const CellJob& job = jobs[t / reps];
    const std::size_t i = t % reps;
    try {
      outcomes[t] = run_replication(config, *job.engine, job.theta, job.stream.derive(i), inner);
    } catch (const std::exception& e) {
      throw Error("cell " + job.label + "/" + std::string(selector_name(job.engine->kind())) +
                  ", replication " + std::to_string(i + 1) + ": " + e.what());
    }
  });

  std::vector<CellResult> cells;
  cells.reserve(jobs.size());
  for (std::size_t c = 0; c < jobs.size(); ++c) {
    const CellJob& job = jobs[c];
    CellResult r;
    r.theta_label = job.label;
    r.selector = job.engine->kind();
    r.bootstrap = config.bootstrap_for(r.selector);
    r.n = job.engine->design().n();
    r.B = config.B;
    r.theta.assign(job.theta.theta.data(), job.theta.theta.data() + job.theta.theta.size());
    r.m_star = job.theta.support;
    r.reps = reps;
    for (std::size_t i = 0; i < reps; ++i) {
      const RepOutcome& o = outcomes[c * reps + i];
      const bool collapsed = o.bounds.width == 0 && o.bounds.lower == o.m_hat;
      r.covered += covers(o.bounds, r.m_star) ? 1 : 0;
      r.collapsed += collapsed ? 1 : 0;
      r.selected_true += o.m_hat == r.m_star ? 1 : 0;
      r.full_collapse += collapsed && o.m_hat == r.m_star ? 1 : 0;
      r.width_sum += o.bounds.width;
      r.agreement_hits += o.agreement_hits;
    }
    cells.push_back(std::move(r));
  }
  return cells;
}

struct Anchor {
  ModelId m_hat;
  ResampleCenter center;
};

Anchor anchor(const ExperimentConfig& config, const SelectionEngine& engine,
              const Eigen::VectorXd& y, const GramCache& gram, Stream select_stream) {
  const DesignMatrix& x = engine.design();
  const SelectedFit fit = select_and_fit(engine, y, gram, select_stream);
  const bool residual = config.bootstrap_for(engine.kind()) == BootstrapKind::Residual;
  return {fit.m_hat, residual ? fitted_center(x, y, fit.coeffs)
                              : modified_residual_center(x, y, fit.coeffs)};
}

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

double CellResult::agreement_mean() const {
  if (reps == 0 || B == 0) return 0.0;
  return static_cast<double>(agreement_hits) / (static_cast<double>(reps) * static_cast<double>(B));
}

double CellResult::standard_error(double q) const {
  if (reps == 0) return 0.0;
  return std::sqrt(q * (1.0 - q) / static_cast<double>(reps));
}

std::vector<CpStar> compute_cp_star(const std::vector<CellResult>& cells,
                                    const std::vector<SelectorKind>& selectors) {
  std::vector<CpStar> out;
  for (const auto& s : selectors) {
    CpStar entry{std::string(selector_name(s)), 1.0};
    bool any = false;
    for (const auto& c : cells) {
      if (c.selector == s) {
        entry.value = any ? std::min(entry.value, c.cp()) : c.cp();
        any = true;
      }
    }
    if (any) out.push_back(entry);
  }
  return out;
}

std::uint64_t design_seed(std::uint64_t master_seed, std::size_t n, double rho) {
  return Stream{master_seed}
      .derive(stream_tag::kDesign)
      .derive(n)
      .derive(std::bit_cast<std::uint64_t>(rho))
      .key();
}

std::shared_ptr<const DesignMatrix> design_for(const ExperimentConfig& config, std::size_t n) {
  return std::make_shared<const DesignMatrix>(
      make_design(n, config.p, config.rho, design_seed(config.master_seed, n, config.rho)));
}

RepOutcome run_replication(const ExperimentConfig& config, const SelectionEngine& engine,
                           const ParamVector& theta, Stream rep_stream,
                           std::size_t bootstrap_workers) {
  const DesignMatrix& x = engine.design();
  const Eigen::VectorXd y =
      gen_response(x, theta, config.sigma2, rep_stream.derive(stream_tag::kResponse));
  const GramCache gram = x.gram(y);
  Anchor a = anchor(config, engine, y, gram, rep_stream.derive(stream_tag::kSelect));
  RepOutcome out;
  out.m_hat = a.m_hat;
  const BootstrapDraws draws = bootstrap_around(
      engine, a.center, config.B, rep_stream.derive(stream_tag::kBootstrap), bootstrap_workers);
  out.bounds = solve_mcb(draws, config.alpha, x.p());
  if (out.bounds.r_hat < 1.0 - config.alpha - 1e-12) {
    throw ContractViolation("solve_mcb returned an infeasible pair");
  }
  for (ModelId m : draws.models) out.agreement_hits += m == out.m_hat ? 1 : 0;
  return out;
}

CellResult run_cell(const ExperimentConfig& config, const SelectionEngine& engine,
                    const ParamVector& theta, Stream cell_stream, std::string theta_label,
                    std::size_t workers) {
  std::vector<CellJob> jobs{{&engine, theta, cell_stream, std::move(theta_label)}};
  return run_cells(config, jobs, workers).front();
}

CoverageReport run_sweep(const ExperimentConfig& config, std::size_t workers) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const auto design = design_for(config, config.n);
  std::vector<std::unique_ptr<SelectionEngine>> engines;
  for (const auto& s : config.selectors) engines.push_back(std::make_unique<SelectionEngine>(design, s));

  std::vector<CellJob> jobs;
  const Stream sweep = Stream{config.master_seed}.derive(stream_tag::kSweep);
  for (std::size_t t = 0; t < config.theta_last_values.size(); ++t) {
    const double v = config.theta_last_values[t];
    const ParamVector theta = make_theta(config.p, config.p_star, v);
    // Selectors share the responses of a theta cell.
    for (const auto& e : engines) jobs.push_back({e.get(), theta, sweep.derive(t), real_label(v)});
  }

  CoverageReport report;
  report.experiment = "sweep";
  report.config = config;
  report.cells = run_cells(config, jobs, workers);
  report.cp_star = compute_cp_star(report.cells, config.selectors);
  report.seeds["master_seed"] = config.master_seed;
  report.seeds["design_seed"] = design->seed;
  report.wall_time = elapsed_seconds(start);
  return report;
}

CoverageReport run_drift(const ExperimentConfig& config, double gamma,
                         const std::vector<std::size_t>& n_list, std::size_t coord,
                         std::size_t workers) {
  config.validate();
  if (n_list.empty()) throw ConfigError("drift: n_list must be non-empty");
  for (std::size_t k = 1; k < n_list.size(); ++k) {
    if (n_list[k] <= n_list[k - 1]) throw ConfigError("drift: n_list must be increasing");
  }
  if (config.p_star < 1) throw ConfigError("drift: p_star must be at least 1");
  const auto start = std::chrono::steady_clock::now();
  const ParamVector theta0 = make_theta(config.p, config.p_star, config.theta_last_values.front());
  if (coord >= config.p || theta0.theta[static_cast<Eigen::Index>(coord)] != 0.0) {
    throw ConfigError("drift: coordinate " + std::to_string(coord + 1) +
                      " must be a zero coordinate of the base parameter");
  }

  std::vector<std::unique_ptr<SelectionEngine>> engines;
  std::vector<CellJob> jobs;
  CoverageReport report;
  report.experiment = "drift";
  report.seeds["master_seed"] = config.master_seed;
  const Stream drift = Stream{config.master_seed}.derive(stream_tag::kDrift);
  for (std::size_t n : n_list) {
    ExperimentConfig at_n = config;
    at_n.n = n;
    at_n.validate();
    const auto design = design_for(at_n, n);
    report.seeds["design_seed"]["n=" + std::to_string(n)] = design->seed;
    const ParamVector theta = perturb_theta(theta0, coord, gamma, n);
    for (const auto& s : config.selectors) {
      engines.push_back(std::make_unique<SelectionEngine>(design, s));
      jobs.push_back({engines.back().get(), theta, drift.derive(n), "n=" + std::to_string(n)});
    }
  }
  report.config = config;
  report.cells = run_cells(config, jobs, workers);
  report.cp_star = compute_cp_star(report.cells, config.selectors);
  report.parameters["gamma"] = gamma;
  report.parameters["coord"] = coord + 1;
  report.parameters["n_list"] = n_list;
  report.wall_time = elapsed_seconds(start);
  return report;
}

std::vector<DriftPoint> drift_points(const CoverageReport& report, const SelectorKind& selector) {
  std::vector<DriftPoint> out;
  for (const auto& c : report.cells) {
    if (c.selector == selector) out.push_back({c.n, c.cp(), c.standard_error(c.cp())});
  }
  return out;
}

bool non_increasing_within(const std::vector<double>& values, const std::vector<double>& se,
                           double z) {
  for (std::size_t k = 1; k < values.size(); ++k) {
    const double slack = z * std::sqrt(se[k - 1] * se[k - 1] + se[k] * se[k]);
    if (values[k] > values[k - 1] + slack) return false;
  }
  return true;
}

CollapseEstimate collapse_estimate(const CellResult& cell) {
  return {cell.select_correct_rate(), cell.full_collapse_rate(), cell.agreement_mean()};
}

CoverageReport run_collapse_check(const ExperimentConfig& config,
                                  const std::vector<std::size_t>& n_list, std::size_t workers) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  std::vector<std::size_t> ns = n_list.empty() ? std::vector<std::size_t>{config.n} : n_list;
  std::vector<std::unique_ptr<SelectionEngine>> engines;
  std::vector<CellJob> jobs;
  CoverageReport report;
  report.experiment = "check_collapse";
  report.seeds["master_seed"] = config.master_seed;
  const Stream root = Stream{config.master_seed}.derive(stream_tag::kCollapse);
  for (std::size_t n : ns) {
    ExperimentConfig at_n = config;
    at_n.n = n;
    at_n.validate();
    const auto design = design_for(at_n, n);
    report.seeds["design_seed"]["n=" + std::to_string(n)] = design->seed;
    std::vector<const SelectionEngine*> at_n_engines;
    for (const auto& s : config.selectors) {
      engines.push_back(std::make_unique<SelectionEngine>(design, s));
      at_n_engines.push_back(engines.back().get());
    }
    for (std::size_t t = 0; t < config.theta_last_values.size(); ++t) {
      const double v = config.theta_last_values[t];
      const ParamVector theta = make_theta(config.p, config.p_star, v);
      for (const SelectionEngine* e : at_n_engines) {
        jobs.push_back({e, theta, root.derive(t).derive(n), real_label(v)});
      }
    }
  }
  report.config = config;
  report.cells = run_cells(config, jobs, workers);
  report.cp_star = compute_cp_star(report.cells, config.selectors);
  report.parameters["n_list"] = ns;
  report.wall_time = elapsed_seconds(start);
  return report;
}

std::vector<double> agreement_batches(const ExperimentConfig& config, const ParamVector& theta,
                                      std::size_t batches, std::size_t workers) {
  config.validate();
  const auto design = design_for(config, config.n);
  const SelectionEngine engine(design, config.selectors.front());
  const Stream root = Stream{config.master_seed}.derive(stream_tag::kVariance);
  const Stream rep = root.derive(0);
  const Eigen::VectorXd y = gen_response(*design, theta, config.sigma2, rep.derive(stream_tag::kResponse));
  const GramCache gram = design->gram(y);
  const Anchor a = anchor(config, engine, y, gram, rep.derive(stream_tag::kSelect));
  std::vector<double> rates(batches);
  parallel_for(batches, workers, [&](std::size_t k) {
    const BootstrapDraws draws =
        bootstrap_around(engine, a.center, config.B, rep.derive(stream_tag::kBootstrap).derive(k));
    rates[k] = agreement_rate(draws, a.m_hat);
  });
  return rates;
}

double sample_variance(const std::vector<double>& values) {
  if (values.size() < 2) return 0.0;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(values.size() - 1);
}

}  // namespace mcb
