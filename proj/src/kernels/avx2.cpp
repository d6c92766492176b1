#include <immintrin.h>

#include <array>
#include <limits>

#include "mcb/kernels.hpp"

namespace mcb::kernels::avx2 {

namespace {

struct Pair {
  __m256d lo;
  __m256d hi;
};

}  // namespace

void subset_scan(const SubsetPlanView& plan, const double* xty, const double* yty,
                 double* best_rss, std::uint64_t* best_mask) {
  static_assert(kTile == 8, "AVX2 kernel processes two 4-lane halves");
  constexpr std::size_t W = kTile;
  alignas(32) std::array<Pair, 64> z;
  alignas(32) std::array<Pair, 65> rss;

  rss[0] = {_mm256_loadu_pd(yty), _mm256_loadu_pd(yty + 4)};
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
    const std::uint64_t mask = plan.mask[node];

    __m256d acc_lo = _mm256_loadu_pd(xty + j * W);
    __m256d acc_hi = _mm256_loadu_pd(xty + j * W + 4);
    for (std::size_t i = 0; i + 1 < k; ++i) {
      const __m256d l = _mm256_broadcast_sd(row + i);
      acc_lo = _mm256_sub_pd(acc_lo, _mm256_mul_pd(l, z[i].lo));
      acc_hi = _mm256_sub_pd(acc_hi, _mm256_mul_pd(l, z[i].hi));
    }
    const __m256d inv_d = _mm256_broadcast_sd(plan.inv_diag + node);
    const __m256d zk_lo = _mm256_mul_pd(acc_lo, inv_d);
    const __m256d zk_hi = _mm256_mul_pd(acc_hi, inv_d);
    z[k - 1] = {zk_lo, zk_hi};
    const __m256d r_lo = _mm256_sub_pd(rss[k - 1].lo, _mm256_mul_pd(zk_lo, zk_lo));
    const __m256d r_hi = _mm256_sub_pd(rss[k - 1].hi, _mm256_mul_pd(zk_hi, zk_hi));
    rss[k] = {r_lo, r_hi};

    double* best = best_rss + k * W;
    std::uint64_t* best_m = best_mask + k * W;
    const __m256d b_lo = _mm256_loadu_pd(best);
    const __m256d b_hi = _mm256_loadu_pd(best + 4);
    const __m256d lt_lo = _mm256_cmp_pd(r_lo, b_lo, _CMP_LT_OQ);
    const __m256d lt_hi = _mm256_cmp_pd(r_hi, b_hi, _CMP_LT_OQ);
    const __m256d eq_lo = _mm256_cmp_pd(r_lo, b_lo, _CMP_EQ_OQ);
    const __m256d eq_hi = _mm256_cmp_pd(r_hi, b_hi, _CMP_EQ_OQ);
    const int lt_bits = _mm256_movemask_pd(lt_lo) | (_mm256_movemask_pd(lt_hi) << 4);
    const int eq_bits = _mm256_movemask_pd(eq_lo) | (_mm256_movemask_pd(eq_hi) << 4);
    if (lt_bits != 0) {
      _mm256_storeu_pd(best, _mm256_blendv_pd(b_lo, r_lo, lt_lo));
      _mm256_storeu_pd(best + 4, _mm256_blendv_pd(b_hi, r_hi, lt_hi));
      const __m256d m = _mm256_castsi256_pd(_mm256_set1_epi64x(static_cast<long long>(mask)));
      const __m256d bm_lo = _mm256_loadu_pd(reinterpret_cast<const double*>(best_m));
      const __m256d bm_hi = _mm256_loadu_pd(reinterpret_cast<const double*>(best_m + 4));
      _mm256_storeu_pd(reinterpret_cast<double*>(best_m), _mm256_blendv_pd(bm_lo, m, lt_lo));
      _mm256_storeu_pd(reinterpret_cast<double*>(best_m + 4), _mm256_blendv_pd(bm_hi, m, lt_hi));
    }
    if (eq_bits != 0) {
      for (std::size_t lane = 0; lane < W; ++lane) {
        if (((eq_bits >> lane) & 1) && mask < best_m[lane]) best_m[lane] = mask;
      }
    }
  }
}

std::size_t nested_count(const std::uint64_t* models, std::size_t count, std::uint64_t lower,
                         std::uint64_t upper) {
  const __m256i lo = _mm256_set1_epi64x(static_cast<long long>(lower));
  const __m256i not_up = _mm256_set1_epi64x(static_cast<long long>(~upper));
  const __m256i zero = _mm256_setzero_si256();
  __m256i hits = _mm256_setzero_si256();
  std::size_t b = 0;
  for (; b + 4 <= count; b += 4) {
    const __m256i d = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(models + b));
    // (lower & ~d) | (d & ~upper)
    const __m256i viol = _mm256_or_si256(_mm256_andnot_si256(d, lo), _mm256_and_si256(d, not_up));
    // Equal-to-zero lanes are all ones, i.e. -1; subtracting counts them.
    hits = _mm256_sub_epi64(hits, _mm256_cmpeq_epi64(viol, zero));
  }
  alignas(32) std::array<std::uint64_t, 4> lanes;
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes.data()), hits);
  std::size_t total = static_cast<std::size_t>(lanes[0] + lanes[1] + lanes[2] + lanes[3]);
  total += scalar::nested_count(models + b, count - b, lower, upper);
  return total;
}

namespace {

__m256d vabs(__m256d x) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), x); }

__m256d lasso_rule(__m256d u, __m256d v, __m256d lambda) {
  const __m256d hi = _mm256_cmp_pd(u, lambda, _CMP_GT_OQ);
  const __m256d neg_lambda = _mm256_sub_pd(_mm256_setzero_pd(), lambda);
  const __m256d lo = _mm256_cmp_pd(u, neg_lambda, _CMP_LT_OQ);
  __m256d z = _mm256_setzero_pd();
  z = _mm256_blendv_pd(z, _mm256_add_pd(u, lambda), lo);
  z = _mm256_blendv_pd(z, _mm256_sub_pd(u, lambda), hi);
  return _mm256_div_pd(z, v);
}

__m256d scad_rule(__m256d u, __m256d v, __m256d lambda, __m256d a) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d au = vabs(u);
  const __m256d s = _mm256_blendv_pd(one, _mm256_set1_pd(-1.0),
                                     _mm256_cmp_pd(u, _mm256_setzero_pd(), _CMP_LT_OQ));
  const __m256d am1 = _mm256_sub_pd(a, one);
  const __m256d r2 = _mm256_div_pd(_mm256_mul_pd(s, _mm256_sub_pd(au, lambda)), v);
  const __m256d r3 =
      _mm256_div_pd(_mm256_mul_pd(s, _mm256_sub_pd(_mm256_mul_pd(au, am1), _mm256_mul_pd(a, lambda))),
                    _mm256_sub_pd(_mm256_mul_pd(v, am1), one));
  const __m256d r4 = _mm256_div_pd(u, v);
  const __m256d in1 = _mm256_cmp_pd(au, lambda, _CMP_LE_OQ);
  const __m256d in2 = _mm256_cmp_pd(au, _mm256_mul_pd(lambda, _mm256_add_pd(one, v)), _CMP_LE_OQ);
  const __m256d in3 = _mm256_cmp_pd(au, _mm256_mul_pd(_mm256_mul_pd(v, a), lambda), _CMP_LE_OQ);
  __m256d r = r4;
  r = _mm256_blendv_pd(r, r3, in3);
  r = _mm256_blendv_pd(r, r2, in2);
  r = _mm256_blendv_pd(r, _mm256_setzero_pd(), in1);
  return r;
}

void solve_group(const CdProblem& prob, std::size_t l0, double* b, std::size_t* sweeps,
                 double* last_step, bool& ok) {
  const std::size_t p = prob.p;
  const std::size_t L = prob.lanes;
  const double* g = prob.g + l0;
  double* bl = b + l0;
  __m256d grad[64];
  __m256d coef[64];
  for (std::size_t j = 0; j < p; ++j) coef[j] = _mm256_loadu_pd(bl + j * L);
  for (std::size_t j = 0; j < p; ++j) {
    __m256d acc = _mm256_loadu_pd(prob.c + j * L + l0);
    for (std::size_t i = 0; i < p; ++i) {
      acc = _mm256_sub_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(g + (i * p + j) * L), coef[i]));
    }
    grad[j] = acc;
  }

  const __m256d lambda = _mm256_set1_pd(prob.lambda);
  const __m256d a = _mm256_set1_pd(prob.a);
  const __m256d tol = _mm256_set1_pd(prob.tolerance);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d zero = _mm256_setzero_pd();
  __m256d active = _mm256_castsi256_pd(_mm256_set1_epi64x(-1));
  __m256d last = zero;
  alignas(32) std::array<double, 4> tmp;

  for (std::size_t sweep = 1; sweep <= prob.max_sweeps; ++sweep) {
    __m256d max_step = zero;
    for (std::size_t j = 0; j < p; ++j) {
      const double* col = g + j * p * L;
      const __m256d v = _mm256_loadu_pd(col + j * L);
      const __m256d bj = coef[j];
      const __m256d u = _mm256_add_pd(grad[j], _mm256_mul_pd(v, bj));
      const __m256d nb = prob.scad ? scad_rule(u, v, lambda, a) : lasso_rule(u, v, lambda);
      const __m256d step = _mm256_sub_pd(nb, bj);
      const __m256d changed = _mm256_and_pd(_mm256_cmp_pd(step, zero, _CMP_NEQ_UQ), active);
      if (_mm256_movemask_pd(changed) == 0) continue;
      coef[j] = _mm256_blendv_pd(bj, nb, changed);
      for (std::size_t i = 0; i < p; ++i) {
        const __m256d upd = _mm256_sub_pd(grad[i], _mm256_mul_pd(step, _mm256_loadu_pd(col + i * L)));
        grad[i] = _mm256_blendv_pd(grad[i], upd, changed);
      }
      max_step = _mm256_blendv_pd(max_step, _mm256_max_pd(vabs(step), max_step), changed);
    }
    __m256d norm = zero;
    for (std::size_t j = 0; j < p; ++j) norm = _mm256_max_pd(vabs(coef[j]), norm);
    const __m256d bound = _mm256_mul_pd(tol, _mm256_add_pd(one, norm));
    const __m256d done = _mm256_and_pd(_mm256_cmp_pd(max_step, bound, _CMP_LT_OQ), active);
    last = _mm256_blendv_pd(last, max_step, active);
    const int done_bits = _mm256_movemask_pd(done);
    if (done_bits != 0) {
      for (std::size_t h = 0; h < 4; ++h) {
        if ((done_bits >> h) & 1) sweeps[l0 + h] = sweep;
      }
      active = _mm256_andnot_pd(done, active);
    }
    if (_mm256_movemask_pd(active) == 0) break;
  }
  const int open_bits = _mm256_movemask_pd(active);
  for (std::size_t h = 0; h < 4; ++h) {
    if ((open_bits >> h) & 1) {
      sweeps[l0 + h] = prob.max_sweeps;
      ok = false;
    }
  }
  _mm256_store_pd(tmp.data(), last);
  for (std::size_t h = 0; h < 4; ++h) last_step[l0 + h] = tmp[h];
  for (std::size_t j = 0; j < p; ++j) _mm256_storeu_pd(bl + j * L, coef[j]);
}

}  // namespace

bool cd_solve(const CdProblem& prob, double* b, std::size_t* sweeps, double* last_step) {
  bool ok = true;
  std::size_t lane = 0;
  for (; lane + 4 <= prob.lanes; lane += 4) solve_group(prob, lane, b, sweeps, last_step, ok);
  for (; lane < prob.lanes; ++lane) {
    ok = scalar::cd_solve_lane(prob, lane, b, sweeps, last_step) && ok;
  }
  return ok;
}

}  // namespace mcb::kernels::avx2
