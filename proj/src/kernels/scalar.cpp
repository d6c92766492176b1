#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "mcb/kernels.hpp"

namespace mcb::kernels::scalar {

void subset_scan(const SubsetPlanView& plan, const double* xty, const double* yty,
                 double* best_rss, std::uint64_t* best_mask) {
  constexpr std::size_t W = kTile;
  // z[d][lane]: d-th entry of L^{-1} X'y along the current path.
  std::array<std::array<double, W>, 64> z{};
  std::array<std::array<double, W>, 65> rss{};

  for (std::size_t lane = 0; lane < W; ++lane) {
    rss[0][lane] = yty[lane];
    best_rss[lane] = yty[lane];
    best_mask[lane] = 0;
  }
  for (std::size_t k = 1; k <= plan.p; ++k) {
    for (std::size_t lane = 0; lane < W; ++lane) {
      best_rss[k * W + lane] = std::numeric_limits<double>::infinity();
      best_mask[k * W + lane] = ~std::uint64_t{0};
    }
  }

  for (std::size_t node = 0; node < plan.nodes; ++node) {
    const std::size_t k = plan.depth[node];
    const std::size_t j = plan.var[node];
    const double* row = plan.rows + plan.row_offset[node];
    const double inv_d = plan.inv_diag[node];
    const std::uint64_t mask = plan.mask[node];
    for (std::size_t lane = 0; lane < W; ++lane) {
      double acc = xty[j * W + lane];
      for (std::size_t i = 0; i + 1 < k; ++i) acc -= row[i] * z[i][lane];
      const double zk = acc * inv_d;
      z[k - 1][lane] = zk;
      const double r = rss[k - 1][lane] - zk * zk;
      rss[k][lane] = r;
      double& best = best_rss[k * W + lane];
      std::uint64_t& best_m = best_mask[k * W + lane];
      if (r < best || (r == best && mask < best_m)) {
        best = r;
        best_m = mask;
      }
    }
  }
}

std::size_t nested_count(const std::uint64_t* models, std::size_t count, std::uint64_t lower,
                         std::uint64_t upper) {
  std::size_t hits = 0;
  for (std::size_t b = 0; b < count; ++b) {
    const std::uint64_t d = models[b];
    hits += ((lower & ~d) | (d & ~upper)) == 0 ? 1 : 0;
  }
  return hits;
}

namespace {

double lasso_rule(double u, double v, double lambda) {
  double z = 0.0;
  if (u > lambda) {
    z = u - lambda;
  } else if (u < -lambda) {
    z = u + lambda;
  }
  return z / v;
}

double scad_rule(double u, double v, double lambda, double a) {
  const double au = std::abs(u);
  const double s = u < 0.0 ? -1.0 : 1.0;
  if (au <= lambda) return 0.0;
  if (au <= lambda * (1.0 + v)) return s * (au - lambda) / v;
  if (au <= v * a * lambda) return s * (au * (a - 1.0) - a * lambda) / (v * (a - 1.0) - 1.0);
  return u / v;
}

}  // namespace

bool cd_solve_lane(const CdProblem& prob, std::size_t lane, double* b, std::size_t* sweeps,
                   double* last_step) {
  const std::size_t p = prob.p;
  const std::size_t L = prob.lanes;
  const double* g = prob.g + lane;
  double* bl = b + lane;
  std::array<double, 64> grad;
  for (std::size_t j = 0; j < p; ++j) {
    double acc = prob.c[j * L + lane];
    for (std::size_t i = 0; i < p; ++i) acc -= g[(i * p + j) * L] * bl[i * L];
    grad[j] = acc;
  }

  double last = 0.0;
  for (std::size_t sweep = 1; sweep <= prob.max_sweeps; ++sweep) {
    double max_step = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      const double* col = g + j * p * L;
      const double v = col[j * L];
      const double bj = bl[j * L];
      const double u = grad[j] + v * bj;
      const double nb = prob.scad ? scad_rule(u, v, prob.lambda, prob.a)
                                  : lasso_rule(u, v, prob.lambda);
      const double step = nb - bj;
      if (step != 0.0) {
        bl[j * L] = nb;
        for (std::size_t i = 0; i < p; ++i) grad[i] -= step * col[i * L];
        max_step = std::max(max_step, std::abs(step));
      }
    }
    double norm = 0.0;
    for (std::size_t j = 0; j < p; ++j) norm = std::max(norm, std::abs(bl[j * L]));
    if (max_step < prob.tolerance * (1.0 + norm)) {
      sweeps[lane] = sweep;
      last_step[lane] = max_step;
      return true;
    }
    last = max_step;
  }
  sweeps[lane] = prob.max_sweeps;
  last_step[lane] = last;
  return false;
}

bool cd_solve(const CdProblem& prob, double* b, std::size_t* sweeps, double* last_step) {
  bool ok = true;
  for (std::size_t lane = 0; lane < prob.lanes; ++lane) {
    ok = cd_solve_lane(prob, lane, b, sweeps, last_step) && ok;
  }
  return ok;
}

}  // namespace mcb::kernels::scalar
