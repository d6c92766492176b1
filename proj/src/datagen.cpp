#include "mcb/datagen.hpp"

#include <cmath>
#include <random>
#include <string>

#include "mcb/error.hpp"

namespace mcb {

namespace {

constexpr int kDesignRetries = 3;
constexpr double kRankTolerance = 1e-10;

bool full_column_rank(const Eigen::MatrixXd& xtx) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(xtx, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) return false;
  const auto& ev = eig.eigenvalues();
  const double largest = ev.maxCoeff();
  return largest > 0.0 && ev.minCoeff() > kRankTolerance * largest;
}

}  // namespace

GramCache DesignMatrix::gram(const Eigen::VectorXd& y) const {
  return build_gram(xtx, entries, y);
}

ParamVector make_param(Eigen::VectorXd theta) {
  ParamVector out;
  std::uint64_t mask = 0;
  for (Eigen::Index j = 0; j < theta.size(); ++j) {
    if (theta[j] != 0.0) mask |= std::uint64_t{1} << j;
  }
  out.theta = std::move(theta);
  out.support = ModelId{mask};
  return out;
}

DesignMatrix make_design(std::size_t n, std::size_t p, double rho, std::uint64_t seed) {
  if (p < 1 || p > kMaxRegressors) throw ConfigError("make_design: p must lie in 1..=63");
  if (n <= p) throw ConfigError("make_design: n must exceed p");
  if (!(rho >= 0.0 && rho < 1.0)) throw ConfigError("make_design: rho must lie in [0, 1)");

  const auto pp = static_cast<Eigen::Index>(p);
  const auto nn = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd sigma(pp, pp);
  for (Eigen::Index j = 0; j < pp; ++j) {
    for (Eigen::Index k = 0; k < pp; ++k) {
      sigma(j, k) = std::pow(rho, static_cast<double>(std::abs(j - k)));
    }
  }
  const Eigen::MatrixXd factor = Eigen::LLT<Eigen::MatrixXd>(sigma).matrixL();

  for (int attempt = 0; attempt <= kDesignRetries; ++attempt) {
    const std::uint64_t s = seed + static_cast<std::uint64_t>(attempt);
    auto rng = Stream{s}.derive(stream_tag::kDesign).engine();
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd z(nn, pp);
    for (Eigen::Index i = 0; i < nn; ++i) {
      for (Eigen::Index j = 0; j < pp; ++j) z(i, j) = normal(rng);
    }
    DesignMatrix d;
    d.entries = z * factor.transpose();
    Eigen::MatrixXd xtx = d.entries.transpose() * d.entries;
    xtx = 0.5 * (xtx + xtx.transpose());
    if (!full_column_rank(xtx)) continue;
    d.xtx = std::make_shared<const Eigen::MatrixXd>(std::move(xtx));
    d.seed = s;
    return d;
  }
  throw ConfigError("make_design: design is rank deficient after " +
                    std::to_string(kDesignRetries) + " retries");
}

ParamVector make_theta(std::size_t p, std::size_t p_star, double theta_last) {
  if (p_star < 1 || p_star > p) throw ContractViolation("make_theta: need 1 <= p_star <= p");
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
  for (std::size_t j = 0; j + 1 < p_star; ++j) theta[static_cast<Eigen::Index>(j)] = 1.0;
  theta[static_cast<Eigen::Index>(p_star - 1)] = theta_last;
  return make_param(std::move(theta));
}

ParamVector perturb_theta(const ParamVector& theta0, std::size_t coord, double gamma,
                          std::size_t n) {
  if (coord >= static_cast<std::size_t>(theta0.theta.size())) {
    throw ContractViolation("perturb_theta: coordinate out of range");
  }
  if (theta0.theta[static_cast<Eigen::Index>(coord)] != 0.0) {
    throw ContractViolation("perturb_theta: coordinate " + std::to_string(coord + 1) +
                            " is already in the support");
  }
  if (!(gamma > 0.0) || n == 0) {
    throw ContractViolation("perturb_theta: need gamma > 0 and n > 0");
  }
  Eigen::VectorXd theta = theta0.theta;
  theta[static_cast<Eigen::Index>(coord)] = gamma / std::sqrt(static_cast<double>(n));
  return make_param(std::move(theta));
}

Eigen::VectorXd gen_response(const DesignMatrix& x, const ParamVector& theta, double sigma2,
                             Stream stream) {
  if (static_cast<std::size_t>(theta.theta.size()) != x.p()) {
    throw ContractViolation("gen_response: theta length differs from design width");
  }
  auto rng = stream.engine();
  std::normal_distribution<double> normal(0.0, std::sqrt(sigma2));
  Eigen::VectorXd y = x.entries * theta.theta;
  for (Eigen::Index i = 0; i < y.size(); ++i) y[i] += normal(rng);
  return y;
}

}  // namespace mcb
