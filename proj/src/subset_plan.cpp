#include "mcb/subset_plan.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "mcb/error.hpp"

namespace mcb {

namespace {

constexpr double kPivotFloor = 1e-12;

// New factor row for appending variable j to `path`. prior_rows[i] is the
// factor row of path[i] (length i), prior_diag[i] its diagonal.
double append_row(const Eigen::MatrixXd& xtx, const std::size_t* path, std::size_t len,
                  std::size_t j, const double* const* prior_rows, const double* prior_diag,
                  double* out) {
  double ss = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    double acc = xtx(static_cast<Eigen::Index>(path[i]), static_cast<Eigen::Index>(j));
    const double* li = prior_rows[i];
    for (std::size_t t = 0; t < i; ++t) acc -= li[t] * out[t];
    out[i] = acc / prior_diag[i];
    ss += out[i] * out[i];
  }
  const double gjj = xtx(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j));
  const double d2 = gjj - ss;
  if (!(d2 > kPivotFloor * gjj)) {
    throw SingularSubmodel("sub-Gram becomes singular when adding variable " +
                           std::to_string(j + 1));
  }
  return std::sqrt(d2);
}

}  // namespace

SubsetPlan::SubsetPlan(const Eigen::MatrixXd& xtx) : p_(static_cast<std::size_t>(xtx.rows())) {
  if (p_ == 0 || p_ > kEnumerationLimit) {
    throw ContractViolation("exhaustive enumeration requires 1 <= p <= " +
                            std::to_string(kEnumerationLimit) + ", got p = " + std::to_string(p_));
  }
  xtx_ = xtx;
  materialized_ = p_ <= kMaterializeLimit;
  if (materialized_) build();
}

void SubsetPlan::build() {
  const std::size_t count = nodes();
  var_.reserve(count);
  depth_.reserve(count);
  mask_.reserve(count);
  inv_diag_.reserve(count);
  row_offset_.reserve(count);

  std::array<std::size_t, 64> path{};
  std::array<std::uint32_t, 64> path_node{};
  std::array<double, 64> diag{};
  std::array<const double*, 64> prior{};
  std::vector<double> scratch(p_);

  // Explicit DFS: path[0..len) is the current subset; next candidate is `next`.
  std::size_t len = 0;
  std::size_t next = 0;
  while (true) {
    if (next < p_) {
      const auto node = static_cast<std::uint32_t>(var_.size());
      for (std::size_t i = 0; i < len; ++i) prior[i] = rows_.data() + row_offset_[path_node[i]];
      const double d = append_row(xtx_, path.data(), len, next, prior.data(), diag.data(),
                                  scratch.data());
      row_offset_.push_back(static_cast<std::uint32_t>(rows_.size()));
      rows_.insert(rows_.end(), scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(len));
      var_.push_back(static_cast<std::uint8_t>(next));
      depth_.push_back(static_cast<std::uint8_t>(len + 1));
      std::uint64_t m = std::uint64_t{1} << next;
      if (len > 0) m |= mask_[path_node[len - 1]];
      mask_.push_back(m);
      inv_diag_.push_back(1.0 / d);
      diag[len] = d;
      path[len] = next;
      path_node[len] = node;
      ++len;
      ++next;
    } else {
      if (len == 0) break;
      --len;
      next = path[len] + 1;
    }
  }
}

kernels::SubsetPlanView SubsetPlan::view() const {
  kernels::SubsetPlanView v;
  v.p = p_;
  v.nodes = var_.size();
  v.var = var_.data();
  v.depth = depth_.data();
  v.mask = mask_.data();
  v.inv_diag = inv_diag_.data();
  v.row_offset = row_offset_.data();
  v.rows = rows_.data();
  return v;
}

void SubsetPlan::scan(const double* xty, const double* yty, double* best_rss,
                      std::uint64_t* best_mask) const {
  scan(xty, yty, best_rss, best_mask, kernels::active());
}

void SubsetPlan::scan(const double* xty, const double* yty, double* best_rss,
                      std::uint64_t* best_mask, const kernels::KernelTable& kernels) const {
  if (materialized_) {
    kernels.subset_scan(view(), xty, yty, best_rss, best_mask);
  } else {
    scan_streaming(xty, yty, best_rss, best_mask);
  }
}

// Same walk and arithmetic as the scalar kernel, with rows recomputed per node.
void SubsetPlan::scan_streaming(const double* xty, const double* yty, double* best_rss,
                                std::uint64_t* best_mask) const {
  constexpr std::size_t W = kernels::kTile;
  std::array<std::array<double, W>, 64> z{};
  std::array<std::array<double, W>, 65> rss{};
  std::vector<std::vector<double>> rows(p_, std::vector<double>(p_));
  std::array<const double*, 64> prior{};
  std::array<double, 64> diag{};
  std::array<std::size_t, 64> path{};
  std::array<std::uint64_t, 65> path_mask{};

  for (std::size_t lane = 0; lane < W; ++lane) {
    rss[0][lane] = yty[lane];
    best_rss[lane] = yty[lane];
    best_mask[lane] = 0;
  }
  for (std::size_t k = 1; k <= p_; ++k) {
    for (std::size_t lane = 0; lane < W; ++lane) {
      best_rss[k * W + lane] = std::numeric_limits<double>::infinity();
      best_mask[k * W + lane] = ~std::uint64_t{0};
    }
  }
  for (std::size_t i = 0; i < p_; ++i) prior[i] = rows[i].data();

  std::size_t len = 0;
  std::size_t next = 0;
  while (true) {
    if (next < p_) {
      double* row = rows[len].data();
      const double d = append_row(xtx_, path.data(), len, next, prior.data(), diag.data(), row);
      const double inv_d = 1.0 / d;
      diag[len] = d;
      path[len] = next;
      const std::uint64_t mask = path_mask[len] | (std::uint64_t{1} << next);
      path_mask[len + 1] = mask;
      const std::size_t k = len + 1;
      for (std::size_t lane = 0; lane < W; ++lane) {
        double acc = xty[next * W + lane];
        for (std::size_t i = 0; i < len; ++i) acc -= row[i] * z[i][lane];
        const double zk = acc * inv_d;
        z[len][lane] = zk;
        const double r = rss[len][lane] - zk * zk;
        rss[k][lane] = r;
        double& best = best_rss[k * W + lane];
        std::uint64_t& best_m = best_mask[k * W + lane];
        if (r < best || (r == best && mask < best_m)) {
          best = r;
          best_m = mask;
        }
      }
      ++len;
      ++next;
    } else {
      if (len == 0) break;
      --len;
      next = path[len] + 1;
    }
  }
}

}  // namespace mcb
