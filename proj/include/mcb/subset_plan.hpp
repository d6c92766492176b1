#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "mcb/kernels.hpp"

namespace mcb {

// Pre-order walk over all 2^p - 1 nonempty subsets in which each child appends
// one variable larger than every variable on its path. Along such a path the
// Cholesky factor of the sub-Gram grows by one row per step, so the residual
// sum of squares of a child costs one O(|m|) dot product on top of its parent's.
//
// The rows depend on X'X only; one plan serves every response on the design.
// Up to kMaterializeLimit variables the rows are stored and the scan runs in
// the SIMD kernels; beyond that they are recomputed on the fly (scalar).
class SubsetPlan {
 public:
  static constexpr std::size_t kMaterializeLimit = 18;
  static constexpr std::size_t kEnumerationLimit = 25;

  // Throws SingularSubmodel if any sub-Gram is numerically singular and
  // ContractViolation if p exceeds kEnumerationLimit.
  explicit SubsetPlan(const Eigen::MatrixXd& xtx);

  std::size_t p() const { return p_; }
  bool materialized() const { return materialized_; }
  std::size_t nodes() const { return (std::size_t{1} << p_) - 1; }

  // One tile of kernels::kTile responses; layouts as in kernels::SubsetScanFn.
  void scan(const double* xty, const double* yty, double* best_rss, std::uint64_t* best_mask,
            const kernels::KernelTable& kernels) const;
  void scan(const double* xty, const double* yty, double* best_rss,
            std::uint64_t* best_mask) const;

  kernels::SubsetPlanView view() const;

 private:
  void build();
  void scan_streaming(const double* xty, const double* yty, double* best_rss,
                      std::uint64_t* best_mask) const;

  std::size_t p_ = 0;
  bool materialized_ = false;
  Eigen::MatrixXd xtx_;
  std::vector<std::uint8_t> var_;
  std::vector<std::uint8_t> depth_;
  std::vector<std::uint64_t> mask_;
  std::vector<double> inv_diag_;
  std::vector<std::uint32_t> row_offset_;
  std::vector<double> rows_;
};

}  // namespace mcb
