#include <arm_neon.h>

#include <array>
#include <limits>

#include "mcb/kernels.hpp"

namespace mcb::kernels::neon {

void subset_scan(const SubsetPlanView& plan, const double* xty, const double* yty,
                 double* best_rss, std::uint64_t* best_mask) {
  constexpr std::size_t W = kTile;
  constexpr std::size_t V = W / 2;
  std::array<std::array<float64x2_t, V>, 64> z;
  std::array<std::array<float64x2_t, V>, 65> rss;

  for (std::size_t v = 0; v < V; ++v) rss[0][v] = vld1q_f64(yty + 2 * v);
  for (std::size_t lane = 0; lane < W; ++lane) {
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
    const float64x2_t inv_d = vdupq_n_f64(plan.inv_diag[node]);
    const std::uint64_t mask = plan.mask[node];
    for (std::size_t v = 0; v < V; ++v) {
      float64x2_t acc = vld1q_f64(xty + j * W + 2 * v);
      for (std::size_t i = 0; i + 1 < k; ++i) {
        // Separate multiply and subtract: vmlsq would fuse on some cores.
        acc = vsubq_f64(acc, vmulq_f64(vdupq_n_f64(row[i]), z[i][v]));
      }
      const float64x2_t zk = vmulq_f64(acc, inv_d);
      z[k - 1][v] = zk;
      const float64x2_t r = vsubq_f64(rss[k - 1][v], vmulq_f64(zk, zk));
      rss[k][v] = r;
      double lanes[2];
      vst1q_f64(lanes, r);
      for (std::size_t h = 0; h < 2; ++h) {
        const std::size_t lane = 2 * v + h;
        double& best = best_rss[k * W + lane];
        std::uint64_t& best_m = best_mask[k * W + lane];
        if (lanes[h] < best || (lanes[h] == best && mask < best_m)) {
          best = lanes[h];
          best_m = mask;
        }
      }
    }
  }
}

std::size_t nested_count(const std::uint64_t* models, std::size_t count, std::uint64_t lower,
                         std::uint64_t upper) {
  return scalar::nested_count(models, count, lower, upper);
}

bool cd_solve(const CdProblem& prob, double* b, std::size_t* sweeps, double* last_step) {
  return scalar::cd_solve(prob, b, sweeps, last_step);
}

}  // namespace mcb::kernels::neon
