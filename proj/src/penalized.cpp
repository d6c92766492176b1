#include "mcb/penalized.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "mcb/error.hpp"
#include "mcb/kernels.hpp"

namespace mcb {

ModelId PenalizedFit::support() const {
  std::uint64_t mask = 0;
  for (Eigen::Index j = 0; j < coeffs.size(); ++j) {
    if (std::abs(coeffs[j]) > kSupportThreshold) mask |= std::uint64_t{1} << j;
  }
  return ModelId{mask};
}

QuadraticForm quadratic_form(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  const double n = static_cast<double>(x.rows());
  QuadraticForm f;
  f.g = (x.transpose() * x) / n;
  f.c = (x.transpose() * y) / n;
  return f;
}

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

double lasso_update(double u, double v, double lambda) { return soft_threshold(u, lambda) / v; }

double scad_update(double u, double v, double lambda, double a) {
  if (!(v * (a - 1.0) > 1.0)) {
    throw ContractViolation("scad_update: need v (a - 1) > 1 for a convex coordinate problem");
  }
  const double au = std::abs(u);
  const double s = u < 0.0 ? -1.0 : 1.0;
  if (au <= lambda) return 0.0;
  if (au <= lambda * (1.0 + v)) return s * (au - lambda) / v;
  if (au <= v * a * lambda) return s * (au * (a - 1.0) - a * lambda) / (v * (a - 1.0) - 1.0);
  return u / v;
}

namespace {

void check_scad_curvature(const double* diag, std::size_t count, std::size_t stride, double a) {
  for (std::size_t j = 0; j < count; ++j) {
    if (!(diag[j * stride] * (a - 1.0) > 1.0)) {
      throw ContractViolation("scad_update: need v (a - 1) > 1 for a convex coordinate problem");
    }
  }
}

[[noreturn]] void throw_nonconvergence(Penalty penalty, double lambda, std::size_t sweeps,
                                       double last_step) {
  std::ostringstream msg;
  msg << "coordinate descent did not converge: penalty="
      << (penalty == Penalty::Lasso ? "lasso" : "scad") << " lambda=" << lambda
      << " sweeps=" << sweeps << " last max step=" << last_step;
  throw ConvergenceError(msg.str());
}

}  // namespace

PenalizedFit coordinate_descent(const QuadraticForm& form, Penalty penalty, double lambda,
                                double a, const Eigen::VectorXd& warm,
                                const CdOptions& options) {
  if (!(lambda >= 0.0)) throw ContractViolation("coordinate_descent: lambda must be >= 0");
  const Eigen::Index p = form.c.size();
  if (p > static_cast<Eigen::Index>(kMaxRegressors)) {
    throw ContractViolation("coordinate_descent: too many coordinates");
  }
  if (form.g.rows() != p || form.g.cols() != p) {
    throw ContractViolation("coordinate_descent: G and c disagree in dimension");
  }
  const auto pu = static_cast<std::size_t>(p);
  if (penalty == Penalty::Scad) check_scad_curvature(form.g.data(), pu, pu + 1, a);

  PenalizedFit fit;
  fit.lambda = lambda;
  fit.coeffs = warm.size() == p ? warm : Eigen::VectorXd::Zero(p);
  kernels::CdProblem prob;
  prob.p = pu;
  prob.lanes = 1;
  prob.g = form.g.data();
  prob.c = form.c.data();
  prob.lambda = lambda;
  prob.a = a;
  prob.scad = penalty == Penalty::Scad;
  prob.tolerance = options.tolerance;
  prob.max_sweeps = options.max_sweeps;
  double last_step = 0.0;
  if (!kernels::active().cd_solve(prob, fit.coeffs.data(), &fit.iterations, &last_step)) {
    throw_nonconvergence(penalty, lambda, options.max_sweeps, last_step);
  }
  return fit;
}

PenalizedFit lasso_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda) {
  return coordinate_descent(quadratic_form(x, y), Penalty::Lasso, lambda, kDefaultScadA);
}

PenalizedFit scad_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda,
                      double a) {
  if (!(a > 2.0)) throw ContractViolation("scad_fit: a must exceed 2");
  return coordinate_descent(quadratic_form(x, y), Penalty::Scad, lambda, a);
}

double lambda_max(const QuadraticForm& form) { return form.c.lpNorm<Eigen::Infinity>(); }

std::vector<double> lambda_grid(double lmax, std::size_t size, double ratio) {
  if (size < 2) throw ContractViolation("lambda_grid: need at least two points");
  if (!(ratio > 0.0 && ratio < 1.0)) throw ContractViolation("lambda_grid: ratio must lie in (0,1)");
  std::vector<double> grid(size, 0.0);
  if (!(lmax > 0.0)) return grid;
  const double log_max = std::log(lmax);
  const double log_ratio = std::log(ratio);
  for (std::size_t k = 0; k < size; ++k) {
    grid[k] = std::exp(log_max + log_ratio * static_cast<double>(k) / static_cast<double>(size - 1));
  }
  grid.front() = lmax;
  grid.back() = lmax * ratio;
  return grid;
}

CvResult cv_tune(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const CvSpec& spec,
                 Stream stream, const Eigen::MatrixXd* xtx) {
  const auto n = static_cast<std::size_t>(x.rows());
  const Eigen::Index p = x.cols();
  if (spec.folds < 2 || spec.folds > n) {
    throw ContractViolation("cv_tune: folds must lie in 2..=n");
  }
  if (spec.penalty == Penalty::Scad && !(spec.a > 2.0)) {
    throw ContractViolation("cv_tune: SCAD a must exceed 2");
  }
  Eigen::MatrixXd xtx_local;
  if (xtx == nullptr) {
    xtx_local = x.transpose() * x;
    xtx = &xtx_local;
  }
  const Eigen::VectorXd xty = x.transpose() * y;
  const double nd = static_cast<double>(n);

  QuadraticForm full{*xtx / nd, xty / nd};
  CvResult out;
  out.grid = lambda_grid(lambda_max(full), spec.grid_size, spec.grid_ratio);
  out.cv_error.assign(out.grid.size(), 0.0);

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  auto rng = stream.engine();
  std::shuffle(perm.begin(), perm.end(), rng);

  // One lane per fold plus a final lane on the full data; all lanes follow
  // the same lambda path, so the full-data fit at every grid point is kept.
  const std::size_t folds = spec.folds;
  const std::size_t lanes = folds + 1;
  const auto pu = static_cast<std::size_t>(p);
  std::vector<double> g(pu * pu * lanes);
  std::vector<double> c(pu * lanes);
  std::vector<Eigen::MatrixXd> held_g(folds);
  std::vector<Eigen::VectorXd> held_c(folds);
  std::vector<double> held_yy(folds);
  auto store = [&](std::size_t lane, const Eigen::MatrixXd& gl, const Eigen::VectorXd& cl) {
    for (std::size_t j = 0; j < pu; ++j) {
      c[j * lanes + lane] = cl[static_cast<Eigen::Index>(j)];
      for (std::size_t i = 0; i < pu; ++i) {
        g[(j * pu + i) * lanes + lane] =
            gl(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
    }
  };
  for (std::size_t f = 0; f < folds; ++f) {
    const std::size_t begin = f * n / folds;
    const std::size_t end = (f + 1) * n / folds;
    const auto held = static_cast<Eigen::Index>(end - begin);
    Eigen::MatrixXd xf(held, p);
    Eigen::VectorXd yf(held);
    for (Eigen::Index r = 0; r < held; ++r) {
      const auto row = static_cast<Eigen::Index>(perm[begin + static_cast<std::size_t>(r)]);
      xf.row(r) = x.row(row);
      yf[r] = y[row];
    }
    held_g[f] = xf.transpose() * xf;
    held_c[f] = xf.transpose() * yf;
    held_yy[f] = yf.squaredNorm();
    const double nt = nd - static_cast<double>(held);
    store(f, (*xtx - held_g[f]) / nt, (xty - held_c[f]) / nt);
  }
  store(folds, full.g, full.c);
  if (spec.penalty == Penalty::Scad) {
    for (std::size_t lane = 0; lane < lanes; ++lane) {
      check_scad_curvature(g.data() + lane, pu, (pu + 1) * lanes, spec.a);
    }
  }

  kernels::CdProblem prob;
  prob.p = pu;
  prob.lanes = lanes;
  prob.g = g.data();
  prob.c = c.data();
  prob.a = spec.a;
  prob.scad = spec.penalty == Penalty::Scad;
  const CdOptions options;
  prob.tolerance = options.tolerance;
  prob.max_sweeps = options.max_sweeps;
  const kernels::KernelTable& kt = kernels::active();

  std::vector<double> b(pu * lanes, 0.0);
  std::vector<std::size_t> sweeps(lanes, 0);
  std::vector<double> last_step(lanes, 0.0);
  std::vector<Eigen::VectorXd> path(out.grid.size(), Eigen::VectorXd(p));
  std::vector<std::size_t> path_sweeps(out.grid.size(), 0);
  Eigen::VectorXd bf(p);
  double worst_lambda = 0.0;
  double worst_step = 0.0;
  for (std::size_t k = 0; k < out.grid.size(); ++k) {
    prob.lambda = out.grid[k];
    // A lane stuck in a flat stretch of the SCAD surface can exhaust the sweep
    // budget. Such a grid point is ruled out rather than aborting the tuning;
    // the iterate still serves as the warm start for the next point.
    if (!kt.cd_solve(prob, b.data(), sweeps.data(), last_step.data())) {
      ++out.unconverged;
      out.cv_error[k] = std::numeric_limits<double>::infinity();
      for (std::size_t l = 0; l < lanes; ++l) {
        if (sweeps[l] >= options.max_sweeps) {
          worst_lambda = prob.lambda;
          worst_step = last_step[l];
        }
      }
      continue;
    }
    for (std::size_t f = 0; f < folds; ++f) {
      for (std::size_t j = 0; j < pu; ++j) bf[static_cast<Eigen::Index>(j)] = b[j * lanes + f];
      out.cv_error[k] += held_yy[f] - 2.0 * bf.dot(held_c[f]) + bf.dot(held_g[f] * bf);
    }
    for (std::size_t j = 0; j < pu; ++j) path[k][static_cast<Eigen::Index>(j)] = b[j * lanes + folds];
    path_sweeps[k] = sweeps[folds];
  }
  for (double& e : out.cv_error) e /= nd;
  if (out.unconverged == out.grid.size()) {
    throw_nonconvergence(spec.penalty, worst_lambda, options.max_sweeps, worst_step);
  }

  std::size_t best = 0;
  for (std::size_t k = 1; k < out.cv_error.size(); ++k) {
    if (out.cv_error[k] < out.cv_error[best]) best = k;
  }
  out.index = best;
  out.lambda_star = out.grid[best];

  out.fit.coeffs = path[best];
  out.fit.lambda = out.lambda_star;
  out.fit.iterations = path_sweeps[best];
  return out;
}

}  // namespace mcb
