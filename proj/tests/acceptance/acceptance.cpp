// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails. Arguments restrict the run to the named
// criteria (e.g. `acceptance AC-4 AC-5`); MCB_WORKERS sets the thread count.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "mcb/harness.hpp"
#include "mcb/oracle.hpp"
#include "mcb/penalized.hpp"
#include "mcb/regress.hpp"

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::size_t workers() {
  if (const char* env = std::getenv("MCB_WORKERS")) return std::max(1, std::atoi(env));
  return std::max(1U, std::thread::hardware_concurrency());
}

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// n = 300, p = 15, p* = 6, sigma^2 = 1, rho = 0.5, alpha = 0.1, scaled profile.
mcb::ExperimentConfig base_config() {
  mcb::ExperimentConfig c;
  c.n = 300;
  c.p = 15;
  c.p_star = 6;
  c.sigma2 = 1.0;
  c.rho = 0.5;
  c.alpha = 0.1;
  c.theta_last_values = {0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 1.0, 2.0};
  c.master_seed = 20180701;
  c.apply(mcb::Profile::Scaled);
  return c;
}

double cp_star_of(const mcb::CoverageReport& r, const std::string& name) {
  for (const auto& s : r.cp_star) {
    if (s.selector == name) return s.value;
  }
  return std::nan("");
}

Outcome ac1() {
  auto c = base_config();
  c.selectors = {mcb::MinBic{}, mcb::ScadCv{}, mcb::MinAic{}, mcb::LassoCv{}};
  const auto r = mcb::run_sweep(c, workers());
  const double bic = cp_star_of(r, "min_bic");
  const double scad = cp_star_of(r, "scad_cv");
  const double aic = cp_star_of(r, "min_aic");
  const double lasso = cp_star_of(r, "lasso_cv");
  std::string detail = "CP* bic=" + fmt(bic) + " (<=0.65) scad=" + fmt(scad) + " (<=0.45) aic=" +
                       fmt(aic) + " (>=0.80) lasso=" + fmt(lasso) + " (>=0.80)";
  for (const auto& cell : r.cells) {
    detail += "\n      theta_last=" + cell.theta_label + " " + std::string(mcb::selector_name(cell.selector)) +
              " cp=" + fmt(cell.cp(), 2) + " width=" + fmt(cell.mean_width(), 2);
  }
  return {bic <= 0.65 && scad <= 0.45 && aic >= 0.80 && lasso >= 0.80, detail};
}

Outcome ac2() {
  auto c = base_config();
  c.theta_last_values = {1.0, 2.0};
  c.selectors = {mcb::MinBic{}};
  const auto r = mcb::run_collapse_check(c, {300}, workers());
  bool pass = true;
  std::string detail;
  for (const auto& cell : r.cells) {
    const auto e = mcb::collapse_estimate(cell);
    pass = pass && e.select_correct_rate >= 0.95 && e.collapse_rate >= 0.90 && e.agreement_mean >= 0.90;
    detail += "theta_last=" + cell.theta_label + ": select_correct=" + fmt(e.select_correct_rate, 2) +
              " (>=0.95) collapse=" + fmt(e.collapse_rate, 2) + " (>=0.90) agreement=" +
              fmt(e.agreement_mean, 3) + " (>=0.90); ";
  }
  return {pass, detail};
}

Outcome ac3() {
  auto c = base_config();
  c.theta_last_values = {0.0};
  c.selectors = {mcb::MinBic{}};
  c.reps = 100;
  c.B = 300;
  const auto r = mcb::run_drift(c, 2.0, {200, 800, 3200}, c.p_star - 1, workers());
  const auto pts = mcb::drift_points(r, mcb::MinBic{});
  std::vector<double> cp, se;
  std::string detail;
  for (const auto& pt : pts) {
    cp.push_back(pt.cp);
    se.push_back(pt.se);
    detail += "n=" + std::to_string(pt.n) + " cp=" + fmt(pt.cp, 2) + " (se " + fmt(pt.se, 3) + "); ";
  }
  const bool monotone = mcb::non_increasing_within(cp, se, 2.0);
  detail += monotone ? "non-increasing within 2 SE" : "rises beyond 2 SE";
  return {pts.size() == 3 && monotone && cp.back() <= 0.5, detail};
}

Outcome ac4() {
  const auto r = mcb::mcb_oracle_suite(4, 500);
  std::string detail = std::to_string(r.instances - r.failures) + "/" + std::to_string(r.instances) +
                       " instances consistent";
  for (const auto& m : r.messages) detail += "; " + m;
  return {r.passed() && r.instances == 500, detail};
}

Outcome ac5() {
  const auto r = mcb::best_subset_oracle_suite(5, 50);
  std::string detail = std::to_string(r.instances - r.failures) + "/" + std::to_string(r.instances) +
                       " instances bitwise equal (AIC and BIC)";
  for (const auto& m : r.messages) detail += "; " + m;
  return {r.passed() && r.instances == 50, detail};
}

double sgn(double z) { return z < 0.0 ? -1.0 : 1.0; }

Outcome ac6() {
  const Eigen::Index n = 256;
  const Eigen::Index p = 8;
  std::mt19937_64 rng(6);
  std::normal_distribution<double> z;
  double lasso_err = 0.0, scad_err = 0.0, ols_err = 0.0;
  for (int inst = 0; inst < 20; ++inst) {
    Eigen::MatrixXd a(n, p);
    for (auto& v : a.reshaped()) v = z(rng);
    const Eigen::MatrixXd x = (a.householderQr().householderQ() * Eigen::MatrixXd::Identity(n, p)) *
                              std::sqrt(static_cast<double>(n));
    Eigen::VectorXd beta(p);
    for (auto& b : beta) b = 3.0 * z(rng);
    Eigen::VectorXd y = x * beta;
    for (auto& v : y) v += 0.5 * z(rng);
    const Eigen::VectorXd u = x.transpose() * y / static_cast<double>(n);
    const double lambda = 0.25 + 0.5 * std::uniform_real_distribution<double>()(rng);
    const double sa = 3.7;
    const auto lasso = mcb::lasso_fit(x, y, lambda);
    const auto scad = mcb::scad_fit(x, y, lambda, sa);
    for (Eigen::Index j = 0; j < p; ++j) {
      const double az = std::abs(u[j]);
      const double soft = sgn(u[j]) * std::max(az - lambda, 0.0);
      double s = u[j];
      if (az <= 2.0 * lambda) {
        s = soft;
      } else if (az <= sa * lambda) {
        s = ((sa - 1.0) * u[j] - sgn(u[j]) * sa * lambda) / (sa - 2.0);
      }
      lasso_err = std::max(lasso_err, std::abs(lasso.coeffs[j] - soft));
      scad_err = std::max(scad_err, std::abs(scad.coeffs[j] - s));
    }
    const auto ols = mcb::fit_subset(mcb::build_gram(x, y), mcb::ModelId::full(static_cast<std::size_t>(p)));
    ols_err = std::max(ols_err, (mcb::lasso_fit(x, y, 0.0).coeffs - ols.coeffs).cwiseAbs().maxCoeff());
    ols_err = std::max(ols_err, (mcb::scad_fit(x, y, 0.0, sa).coeffs - ols.coeffs).cwiseAbs().maxCoeff());
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "max |error| lasso=%.2e scad=%.2e lambda0-vs-OLS=%.2e (tol 1e-6)",
                lasso_err, scad_err, ols_err);
  return {lasso_err <= 1e-6 && scad_err <= 1e-6 && ols_err <= 1e-6, buf};
}

Outcome ac7() {
  auto c = base_config();
  c.selectors = {mcb::MinBic{}};
  c.B = 250;
  const auto theta = mcb::make_theta(c.p, c.p_star, 0.3);
  const auto rates = mcb::agreement_batches(c, theta, 200, workers());
  const double var = mcb::sample_variance(rates);
  const double bound = 1.5 / (4.0 * 250.0);
  double mean = 0.0;
  for (double r : rates) mean += r / static_cast<double>(rates.size());
  char buf[160];
  std::snprintf(buf, sizeof buf, "variance=%.3e (<= %.1e) over %zu batches, mean agreement=%.3f",
                var, bound, rates.size(), mean);
  return {rates.size() == 200 && var <= bound, buf};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Drops the wall_time line; everything else must match byte for byte.
std::string strip_wall_time(const std::string& text) {
  std::istringstream in(text);
  std::string line, out;
  while (std::getline(in, line)) {
    if (line.find("\"wall_time\"") == std::string::npos) out += line + "\n";
  }
  return out;
}

Outcome ac8() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "mcb_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto c = base_config();
  c.theta_last_values = {0.1, 1.0};
  c.selectors = {mcb::MinBic{}, mcb::MinAic{}, mcb::LassoCv{10, 30, 1e-3}, mcb::ScadCv{10, 30, 1e-3, 3.7}};
  c.reps = 8;
  c.B = 40;
  std::ofstream(dir / "config.json") << mcb::to_json(c).dump(2);

  struct Run {
    std::string name;
    std::string args;
    std::string stem;
  };
  const std::string cfg = (dir / "config.json").string();
  const std::vector<Run> runs{
      {"sweep", "sweep --config " + cfg, "sweep"},
      {"drift", "drift --config " + cfg + " --gamma 2 --n-list 100,200 --coord 7", "drift"},
      {"check-collapse", "check-collapse --config " + cfg + " --n-list 150,300", "collapse"},
  };
  bool pass = true;
  std::string detail;
  for (const auto& run : runs) {
    std::string files[2][2];
    for (int k = 0; k < 2; ++k) {
      const std::string w = k == 0 ? "1" : "4";
      const fs::path out = dir / (run.name + "_w" + w);
      const std::string cmd = std::string(MCB_CLI_PATH) + " " + run.args + " --out " + out.string() +
                              " --workers " + w + " > /dev/null";
      if (std::system(cmd.c_str()) != 0) return {false, "command failed: " + cmd};
      files[k][0] = slurp(out / (run.stem + ".csv"));
      files[k][1] = strip_wall_time(slurp(out / (run.stem + ".json")));
    }
    const bool same = files[0][0] == files[1][0] && files[0][1] == files[1][1] && !files[0][0].empty();
    pass = pass && same;
    detail += run.name + (same ? " identical; " : " DIFFERS; ");
  }
  std::string o1, o2;
  for (int k = 0; k < 2; ++k) {
    const std::string w = k == 0 ? "1" : "4";
    const fs::path log = dir / ("oracle_w" + w + ".txt");
    const std::string cmd = std::string(MCB_CLI_PATH) + " oracle-test --seed 8 --instances 100 --workers " + w +
                            " > " + log.string();
    const int rc = std::system(cmd.c_str());
    (k == 0 ? o1 : o2) = std::to_string(rc) + slurp(log);
  }
  const bool oracle_same = o1 == o2;
  pass = pass && oracle_same;
  detail += oracle_same ? "oracle-test identical" : "oracle-test DIFFERS";
  fs::remove_all(dir);
  return {pass, detail};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"AC-1", ac1}, {"AC-2", ac2}, {"AC-3", ac3}, {"AC-4", ac4},
      {"AC-5", ac5}, {"AC-6", ac6}, {"AC-7", ac7}, {"AC-8", ac8},
  };
  std::set<std::string> only(argv + 1, argv + argc);
  std::printf("acceptance: %zu worker thread(s)\n", workers());
  std::fflush(stdout);
  int failures = 0;
  for (const auto& [id, fn] : criteria) {
    if (!only.empty() && !only.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %s [%.1fs] %s\n", o.pass ? "PASS" : "FAIL", id.c_str(), secs, o.detail.c_str());
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
