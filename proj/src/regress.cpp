#include "mcb/regress.hpp"

#include <algorithm>
#include <string>

#include "mcb/error.hpp"

namespace mcb {

namespace {

// Relative pivot floor for declaring a sub-Gram numerically singular.
constexpr double kPivotFloor = 1e-12;

void check_positive_definite(const Eigen::MatrixXd& xtx) {
  Eigen::LLT<Eigen::MatrixXd> llt(xtx);
  if (llt.info() != Eigen::Success) {
    throw SingularSubmodel("X'X is not positive definite");
  }
  const double scale = xtx.diagonal().maxCoeff();
  const Eigen::VectorXd d = llt.matrixL().toDenseMatrix().diagonal();
  for (Eigen::Index j = 0; j < d.size(); ++j) {
    if (d[j] * d[j] <= kPivotFloor * scale) {
      throw SingularSubmodel("X'X is numerically singular at column " + std::to_string(j + 1));
    }
  }
}

}  // namespace

GramCache build_gram(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  auto xtx = std::make_shared<Eigen::MatrixXd>(x.transpose() * x);
  // Symmetrize exactly; the product is symmetric only up to rounding.
  *xtx = 0.5 * (*xtx + xtx->transpose());
  check_positive_definite(*xtx);
  return build_gram(std::move(xtx), x, y);
}

GramCache build_gram(std::shared_ptr<const Eigen::MatrixXd> xtx, const Eigen::MatrixXd& x,
                     const Eigen::VectorXd& y) {
  if (x.rows() != y.size()) throw ContractViolation("build_gram: X and y row counts differ");
  GramCache g;
  g.xtx = std::move(xtx);
  g.xty = x.transpose() * y;
  g.yty = y.squaredNorm();
  g.n = static_cast<std::size_t>(x.rows());
  return g;
}

FitResult fit_subset(const GramCache& gram, ModelId model) {
  const std::size_t p = gram.p();
  if (!model.fits(p)) throw ContractViolation("fit_subset: model " + model.to_string() +
                                              " references variables beyond p");
  FitResult out;
  out.model = model;
  out.coeffs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
  out.df = gram.n - model.size();
  if (model.is_empty()) {
    out.rss = gram.yty;
    return out;
  }
  const auto idx = model.indices();
  const auto k = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd sub(k, k);
  Eigen::VectorXd rhs(k);
  for (Eigen::Index a = 0; a < k; ++a) {
    rhs[a] = gram.xty[static_cast<Eigen::Index>(idx[a])];
    for (Eigen::Index b = 0; b < k; ++b) {
      sub(a, b) = (*gram.xtx)(static_cast<Eigen::Index>(idx[a]), static_cast<Eigen::Index>(idx[b]));
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(sub);
  if (llt.info() != Eigen::Success) {
    throw SingularSubmodel("sub-Gram of model " + model.to_string() + " is not positive definite");
  }
  const Eigen::MatrixXd l = llt.matrixL();
  const double scale = sub.diagonal().maxCoeff();
  for (Eigen::Index a = 0; a < k; ++a) {
    if (l(a, a) * l(a, a) <= kPivotFloor * scale) {
      throw SingularSubmodel("sub-Gram of model " + model.to_string() + " is numerically singular");
    }
  }
  const Eigen::VectorXd beta = llt.solve(rhs);
  for (Eigen::Index a = 0; a < k; ++a) out.coeffs[static_cast<Eigen::Index>(idx[a])] = beta[a];
  out.rss = std::max(0.0, gram.yty - rhs.dot(beta));
  return out;
}

Residuals residuals(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const FitResult& fit) {
  Residuals r;
  r.raw = y - x * fit.coeffs;
  r.centered = r.raw.array() - r.raw.mean();
  return r;
}

}  // namespace mcb
