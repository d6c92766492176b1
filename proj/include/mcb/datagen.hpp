#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>

#include <Eigen/Dense>

#include "mcb/model_id.hpp"
#include "mcb/regress.hpp"
#include "mcb/rng.hpp"

namespace mcb {

// A fixed regressor matrix together with its validated Gram matrix.
struct DesignMatrix {
  Eigen::MatrixXd entries;                     // n x p
  std::shared_ptr<const Eigen::MatrixXd> xtx;  // X'X, positive definite
  std::uint64_t seed = 0;                      // seed actually used (after retries)

  std::size_t n() const { return static_cast<std::size_t>(entries.rows()); }
  std::size_t p() const { return static_cast<std::size_t>(entries.cols()); }

  GramCache gram(const Eigen::VectorXd& y) const;
};

struct ParamVector {
  Eigen::VectorXd theta;
  ModelId support;  // { j : theta_j != 0 }
};

// Wraps an explicit coefficient vector, computing the support exactly.
ParamVector make_param(Eigen::VectorXd theta);

// Rows i.i.d. N(0, Sigma) with Sigma_jk = rho^|j-k|. Retries with seed+1 up to
// three times if the draw is rank deficient, then throws ConfigError.
DesignMatrix make_design(std::size_t n, std::size_t p, double rho, std::uint64_t seed);

// theta_1..theta_{p*-1} = 1, theta_{p*} = theta_last, the rest 0.
ParamVector make_theta(std::size_t p, std::size_t p_star, double theta_last);

// theta0 + (gamma / sqrt(n)) e_coord for a 0-based coordinate that is zero in theta0.
ParamVector perturb_theta(const ParamVector& theta0, std::size_t coord, double gamma,
                          std::size_t n);

// y = X theta + eps, eps i.i.d. N(0, sigma2).
Eigen::VectorXd gen_response(const DesignMatrix& x, const ParamVector& theta, double sigma2,
                             Stream stream);

}  // namespace mcb
