#include <doctest.h>

#include <random>

#include "mcb/datagen.hpp"
#include "mcb/error.hpp"
#include "mcb/regress.hpp"

using mcb::ModelId;

namespace {

Eigen::MatrixXd random_matrix(Eigen::Index n, Eigen::Index p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  Eigen::MatrixXd x(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) x(i, j) = z(rng);
  }
  return x;
}

Eigen::VectorXd random_vector(Eigen::Index n, std::uint64_t seed) {
  return random_matrix(n, 1, seed).col(0);
}

// Dense Householder QR on the selected columns, independent of the Gram path.
double qr_rss(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, ModelId m) {
  if (m.is_empty()) return y.squaredNorm();
  Eigen::MatrixXd xs(x.rows(), static_cast<Eigen::Index>(m.size()));
  Eigen::Index c = 0;
  for (std::size_t j : m.indices()) xs.col(c++) = x.col(static_cast<Eigen::Index>(j));
  const Eigen::VectorXd beta = xs.householderQr().solve(y);
  return (y - xs * beta).squaredNorm();
}

}  // namespace

TEST_CASE("gram of the identity design") {
  const Eigen::MatrixXd x = Eigen::MatrixXd::Identity(2, 2);
  const Eigen::Vector2d y(1.0, 2.0);
  const auto g = mcb::build_gram(x, y);
  CHECK(*g.xtx == Eigen::MatrixXd::Identity(2, 2));
  CHECK(g.xty == y);
  CHECK(g.yty == 5.0);
  CHECK(g.n == 2);
}

TEST_CASE("duplicated columns are rejected") {
  Eigen::MatrixXd x = random_matrix(20, 3, 1);
  x.col(2) = x.col(0);
  CHECK_THROWS_AS(mcb::build_gram(x, random_vector(20, 2)), mcb::SingularSubmodel);
  CHECK_THROWS(mcb::make_design(20, 3, 0.999999999999, 1).p());
}

TEST_CASE("gram matches a direct product") {
  const Eigen::MatrixXd x = random_matrix(50, 4, 3);
  const Eigen::VectorXd y = random_vector(50, 4);
  const auto g = mcb::build_gram(x, y);
  Eigen::MatrixXd direct = Eigen::MatrixXd::Zero(4, 4);
  Eigen::VectorXd xty = Eigen::VectorXd::Zero(4);
  for (Eigen::Index i = 0; i < 50; ++i) {
    for (Eigen::Index a = 0; a < 4; ++a) {
      xty[a] += x(i, a) * y[i];
      for (Eigen::Index b = 0; b < 4; ++b) direct(a, b) += x(i, a) * x(i, b);
    }
  }
  CHECK((*g.xtx - direct).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((g.xty - xty).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(std::abs(g.yty - y.squaredNorm()) <= 1e-10);

  const Eigen::VectorXd y2 = random_vector(50, 5);
  const auto g2 = mcb::build_gram(g.xtx, x, y2);
  CHECK(g2.xtx == g.xtx);
}

TEST_CASE("empty model fit") {
  const Eigen::MatrixXd x = random_matrix(30, 3, 6);
  const Eigen::VectorXd y = random_vector(30, 7);
  const auto g = mcb::build_gram(x, y);
  const auto fit = mcb::fit_subset(g, ModelId::empty());
  CHECK(fit.coeffs == Eigen::VectorXd::Zero(3));
  CHECK(fit.rss == g.yty);
  CHECK(fit.df == 30);
  const auto r = mcb::residuals(x, y, fit);
  CHECK(r.raw == y);
}

TEST_CASE("orthonormal design gives coordinate-wise coefficients") {
  const Eigen::Index n = 64;
  const Eigen::MatrixXd q = random_matrix(n, 5, 8).householderQr().householderQ() *
                            Eigen::MatrixXd::Identity(n, 5);
  const Eigen::MatrixXd x = q * std::sqrt(static_cast<double>(n));
  const Eigen::VectorXd y = random_vector(n, 9);
  const auto g = mcb::build_gram(x, y);
  const ModelId m = ModelId::from_indices({0, 3, 4});
  const auto fit = mcb::fit_subset(g, m);
  for (Eigen::Index j = 0; j < 5; ++j) {
    const double expect = m.contains(static_cast<std::size_t>(j)) ? g.xty[j] / n : 0.0;
    CHECK(fit.coeffs[j] == doctest::Approx(expect).epsilon(1e-10));
  }
  CHECK(fit.coeffs[1] == 0.0);
  CHECK(fit.coeffs[2] == 0.0);
}

TEST_CASE("full fit matches a dense QR solve") {
  const Eigen::MatrixXd x = random_matrix(100, 8, 10);
  const Eigen::VectorXd y = x * Eigen::VectorXd::LinSpaced(8, -1.0, 1.0) + random_vector(100, 11);
  const auto g = mcb::build_gram(x, y);
  const auto fit = mcb::fit_subset(g, ModelId::full(8));
  const double oracle = qr_rss(x, y, ModelId::full(8));
  CHECK(std::abs(fit.rss - oracle) <= 1e-8 * oracle);
  const auto r = mcb::residuals(x, y, fit);
  CHECK(std::abs(r.raw.squaredNorm() - fit.rss) <= 1e-9 * fit.rss);
}

TEST_CASE("residuals of a perfect fit vanish and centering works") {
  const Eigen::MatrixXd x = random_matrix(40, 3, 12);
  const Eigen::VectorXd y = x * Eigen::Vector3d(1.0, -2.0, 0.5);
  const auto g = mcb::build_gram(x, y);
  const auto fit = mcb::fit_subset(g, ModelId::full(3));
  const auto r = mcb::residuals(x, y, fit);
  CHECK(r.raw.cwiseAbs().maxCoeff() <= 1e-9);

  const Eigen::VectorXd y2 = random_vector(40, 13).array() + 3.0;
  const auto g2 = mcb::build_gram(x, y2);
  const auto r2 = mcb::residuals(x, y2, mcb::fit_subset(g2, ModelId::from_indices({1})));
  CHECK(std::abs(r2.centered.sum()) <= 1e-10 * 40);
}

TEST_CASE("every subset agrees with QR and rss is monotone along inclusion") {
  std::mt19937_64 rng(99);
  for (int inst = 0; inst < 100; ++inst) {
    const auto p = static_cast<Eigen::Index>(2 + rng() % 9);
    const auto n = static_cast<Eigen::Index>(p + 5 + rng() % (96 - p));
    const Eigen::MatrixXd x = random_matrix(n, p, rng());
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    for (Eigen::Index j = 0; j < p; ++j) {
      if (rng() % 2) beta[j] = 1.0;
    }
    const Eigen::VectorXd y = x * beta + random_vector(n, rng());
    const auto g = mcb::build_gram(x, y);
    const std::uint64_t subsets = std::uint64_t{1} << p;
    std::vector<double> rss(subsets);
    bool matches = true;
    for (std::uint64_t mask = 0; mask < subsets; ++mask) {
      const ModelId m{mask};
      const auto fit = mcb::fit_subset(g, m);
      rss[mask] = fit.rss;
      const double oracle = qr_rss(x, y, m);
      if (std::abs(fit.rss - oracle) > 1e-8 * std::max(oracle, 1e-300)) matches = false;
      for (Eigen::Index j = 0; j < p; ++j) {
        if (!m.contains(static_cast<std::size_t>(j)) && fit.coeffs[j] != 0.0) matches = false;
      }
      if (fit.rss > g.yty * (1.0 + 1e-9)) matches = false;
    }
    CHECK(matches);
    bool monotone = true;
    for (std::uint64_t mask = 0; mask < subsets; ++mask) {
      for (Eigen::Index j = 0; j < p; ++j) {
        const std::uint64_t bigger = mask | (std::uint64_t{1} << j);
        if (rss[mask] < rss[bigger] - 1e-9 * g.yty) monotone = false;
      }
    }
    CHECK(monotone);
  }
}
