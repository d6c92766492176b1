#pragma once

#include <cstddef>
#include <memory>

#include <Eigen/Dense>

#include "mcb/model_id.hpp"

namespace mcb {

// Sufficient statistics for every subset fit of one response on one design.
// xtx is shared between all responses drawn on the same design.
struct GramCache {
  std::shared_ptr<const Eigen::MatrixXd> xtx;
  Eigen::VectorXd xty;
  double yty = 0.0;
  std::size_t n = 0;

  std::size_t p() const { return static_cast<std::size_t>(xty.size()); }
};

struct FitResult {
  ModelId model;
  Eigen::VectorXd coeffs;  // length p, exactly zero off the model
  double rss = 0.0;
  std::size_t df = 0;      // n - |model|
};

struct Residuals {
  Eigen::VectorXd raw;
  Eigen::VectorXd centered;
};

// Throws SingularSubmodel if X'X is not positive definite.
GramCache build_gram(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

// Same as above but reuses an already-validated X'X.
GramCache build_gram(std::shared_ptr<const Eigen::MatrixXd> xtx, const Eigen::MatrixXd& x,
                     const Eigen::VectorXd& y);

// Least squares restricted to `model` via Cholesky on the sub-Gram.
// The empty model yields zero coefficients and rss = y'y.
FitResult fit_subset(const GramCache& gram, ModelId model);

Residuals residuals(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const FitResult& fit);

}  // namespace mcb
