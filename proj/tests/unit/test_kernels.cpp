#include <doctest.h>

#include <cstring>
#include <random>
#include <vector>

#include "mcb/datagen.hpp"
#include "mcb/kernels.hpp"
#include "mcb/selectors.hpp"
#include "mcb/subset_plan.hpp"

namespace k = mcb::kernels;

namespace {

std::vector<k::Isa> simd_isas() {
  std::vector<k::Isa> out;
  for (k::Isa isa : {k::Isa::Avx2, k::Isa::Neon}) {
    if (k::available(isa)) out.push_back(isa);
  }
  return out;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("scalar kernels are always available") {
  CHECK(k::available(k::Isa::Scalar));
  CHECK(k::table(k::Isa::Scalar).isa == k::Isa::Scalar);
  CHECK(k::isa_name(k::active().isa).size() > 0);
}

TEST_CASE("SIMD subset scan is bitwise equal to scalar") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> z;
  for (std::size_t p : {1, 2, 5, 9, 12}) {
    const auto d = mcb::make_design(40 + 5 * p, p, 0.4, rng());
    const mcb::SubsetPlan plan(*d.xtx);
    std::vector<double> xty(p * k::kTile);
    std::vector<double> yty(k::kTile);
    for (std::size_t lane = 0; lane < k::kTile; ++lane) {
      Eigen::VectorXd y(static_cast<Eigen::Index>(d.n()));
      for (auto& v : y) v = z(rng);
      // A duplicated lane forces equal RSS values and exercises the tie path.
      if (lane == 5) y = y * 0.0;
      const Eigen::VectorXd c = d.entries.transpose() * y;
      for (std::size_t j = 0; j < p; ++j) xty[j * k::kTile + lane] = c[static_cast<Eigen::Index>(j)];
      yty[lane] = y.squaredNorm();
    }
    std::vector<double> ref_rss((p + 1) * k::kTile);
    std::vector<std::uint64_t> ref_mask((p + 1) * k::kTile);
    plan.scan(xty.data(), yty.data(), ref_rss.data(), ref_mask.data(), k::table(k::Isa::Scalar));
    for (k::Isa isa : simd_isas()) {
      std::vector<double> rss((p + 1) * k::kTile);
      std::vector<std::uint64_t> mask((p + 1) * k::kTile);
      plan.scan(xty.data(), yty.data(), rss.data(), mask.data(), k::table(isa));
      CHECK(same_bits(rss, ref_rss));
      CHECK(mask == ref_mask);
    }
  }
}

TEST_CASE("SIMD nested count equals scalar") {
  std::mt19937_64 rng(2);
  std::vector<std::uint64_t> models(1003);
  for (auto& m : models) m = rng() & rng() & 0x3ff;
  for (int t = 0; t < 200; ++t) {
    const std::uint64_t upper = rng() & 0x3ff;
    const std::uint64_t lower = upper & rng() & rng();
    const std::size_t count = rng() % models.size();
    const std::size_t ref = k::scalar::nested_count(models.data(), count, lower, upper);
    std::size_t naive = 0;
    for (std::size_t b = 0; b < count; ++b) {
      naive += ((lower & ~models[b]) == 0 && (models[b] & ~upper) == 0) ? 1 : 0;
    }
    CHECK(ref == naive);
    for (k::Isa isa : simd_isas()) CHECK(k::table(isa).nested_count(models.data(), count, lower, upper) == ref);
  }
}

TEST_CASE("SIMD coordinate descent is bitwise equal to scalar") {
  std::mt19937_64 rng(3);
  for (std::size_t lanes : {1, 3, 4, 8, 11}) {
    for (bool scad : {false, true}) {
      const std::size_t p = 3 + rng() % 12;
      std::vector<double> g(p * p * lanes);
      std::vector<double> c(p * lanes);
      for (std::size_t lane = 0; lane < lanes; ++lane) {
        const auto d = mcb::make_design(60, p, 0.5, rng());
        const Eigen::MatrixXd gl = *d.xtx / 60.0;
        std::normal_distribution<double> z;
        for (std::size_t j = 0; j < p; ++j) {
          c[j * lanes + lane] = (j < 3 ? 1.0 : 0.0) * gl(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) + 0.1 * z(rng);
          for (std::size_t i = 0; i < p; ++i) {
            g[(j * p + i) * lanes + lane] = gl(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
          }
        }
      }
      k::CdProblem prob;
      prob.p = p;
      prob.lanes = lanes;
      prob.g = g.data();
      prob.c = c.data();
      prob.a = 3.7;
      prob.scad = scad;
      prob.tolerance = 1e-7;
      prob.max_sweeps = 100000;
      std::vector<double> ref_b(p * lanes, 0.0);
      std::vector<std::size_t> ref_sweeps(lanes);
      std::vector<double> ref_last(lanes);
      std::vector<std::vector<double>> simd_b(simd_isas().size(), ref_b);
      for (double lambda : {0.5, 0.1, 0.02, 0.001, 0.0}) {
        prob.lambda = lambda;
        CHECK(k::scalar::cd_solve(prob, ref_b.data(), ref_sweeps.data(), ref_last.data()));
        const auto isas = simd_isas();
        for (std::size_t s = 0; s < isas.size(); ++s) {
          std::vector<std::size_t> sweeps(lanes);
          std::vector<double> last(lanes);
          CHECK(k::table(isas[s]).cd_solve(prob, simd_b[s].data(), sweeps.data(), last.data()));
          CHECK(same_bits(simd_b[s], ref_b));
          CHECK(sweeps == ref_sweeps);
          CHECK(same_bits(last, ref_last));
        }
      }
    }
  }
}

TEST_CASE("coordinate descent reports non-convergence") {
  const double g[4] = {1.0, 0.9, 0.9, 1.0};
  const double c[2] = {1.0, 1.0};
  k::CdProblem prob;
  prob.p = 2;
  prob.lanes = 1;
  prob.g = g;
  prob.c = c;
  prob.tolerance = 1e-12;
  prob.max_sweeps = 2;
  double b[2] = {0.0, 0.0};
  std::size_t sweeps = 0;
  double last = 0.0;
  CHECK_FALSE(k::scalar::cd_solve(prob, b, &sweeps, &last));
  CHECK(sweeps == 2);
  CHECK(last > 0.0);
}

TEST_CASE("streaming subset walk agrees with naive enumeration beyond the materialize limit") {
  const std::size_t p = mcb::SubsetPlan::kMaterializeLimit + 1;
  const auto d = mcb::make_design(120, p, 0.5, 17);
  const auto theta = mcb::make_theta(p, 6, 0.3);
  const Eigen::VectorXd y = mcb::gen_response(d, theta, 1.0, mcb::Stream(4));
  const auto gram = d.gram(y);
  const mcb::SubsetPlan plan(*d.xtx);
  CHECK_FALSE(plan.materialized());
  for (double pen : {mcb::aic_penalty(), mcb::bic_penalty(120)}) {
    CHECK(mcb::best_subset(plan, gram, pen) == mcb::best_subset_naive(gram, pen));
  }
}

TEST_CASE("forcing the scalar table changes the active kernels") {
  const k::Isa before = k::active().isa;
  k::force(k::Isa::Scalar);
  CHECK(k::active().isa == k::Isa::Scalar);
  k::force(before);
  CHECK(k::active().isa == before);
}
