#include "mcb/bootstrap.hpp"

#include <cmath>
#include <random>
#include <string>

#include "mcb/error.hpp"
#include "mcb/parallel.hpp"

namespace mcb {

namespace {

// Draws per parallel work item; a multiple of the subset-scan tile.
constexpr std::size_t kChunk = 8 * kernels::kTile;

Eigen::VectorXd resample(const ResampleCenter& center, std::mt19937_64& rng) {
  const Eigen::Index n = center.residuals.size();
  std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
  Eigen::VectorXd y = center.fitted;
  for (Eigen::Index i = 0; i < n; ++i) y[i] += center.residuals[pick(rng)];
  return y;
}

}  // namespace

BootstrapDraws make_draws(std::vector<ModelId> models, std::size_t p) {
  BootstrapDraws d;
  d.B = models.size();
  d.freq.assign(p, 0.0);
  std::vector<std::size_t> counts(p, 0);
  for (ModelId m : models) {
    if (!m.fits(p)) throw ContractViolation("make_draws: model " + m.to_string() + " exceeds p");
    for (std::size_t j : m.indices()) ++counts[j];
  }
  for (std::size_t j = 0; j < p; ++j) {
    d.freq[j] = d.B == 0 ? 0.0 : static_cast<double>(counts[j]) / static_cast<double>(d.B);
  }
  d.models = std::move(models);
  return d;
}

BootstrapDraws bootstrap_around(const SelectionEngine& engine, const ResampleCenter& center,
                                std::size_t B, Stream stream, std::size_t workers) {
  if (B < 1) throw ContractViolation("bootstrap: B must be positive");
  const DesignMatrix& x = engine.design();
  std::vector<ModelId> models(B);
  const std::size_t chunks = (B + kChunk - 1) / kChunk;

  parallel_for(chunks, workers, [&](std::size_t c) {
    const std::size_t begin = c * kChunk;
    const std::size_t end = std::min(B, begin + kChunk);
    if (engine.information_criterion()) {
      std::vector<Eigen::VectorXd> xty(end - begin);
      std::vector<double> yty(end - begin);
      for (std::size_t b = begin; b < end; ++b) {
        auto rng = stream.derive(b).engine();
        const Eigen::VectorXd y = resample(center, rng);
        xty[b - begin] = x.entries.transpose() * y;
        yty[b - begin] = y.squaredNorm();
      }
      std::vector<ModelId> picked;
      try {
        picked = engine.select_batch(xty, yty);
      } catch (const Error& e) {
        throw Error("bootstrap draws " + std::to_string(begin + 1) + ".." + std::to_string(end) +
                    ": " + e.what());
      }
      std::copy(picked.begin(), picked.end(), models.begin() + static_cast<std::ptrdiff_t>(begin));
    } else {
      for (std::size_t b = begin; b < end; ++b) {
        const Stream draw = stream.derive(b);
        auto rng = draw.engine();
        const Eigen::VectorXd y = resample(center, rng);
        try {
          models[b] = engine.select(y, x.gram(y), draw.derive(stream_tag::kSelect));
        } catch (const Error& e) {
          throw Error("bootstrap draw " + std::to_string(b + 1) + ": " + e.what());
        }
      }
    }
  });
  return make_draws(std::move(models), x.p());
}

SelectedFit select_and_fit(const SelectionEngine& engine, const Eigen::VectorXd& y,
                           const GramCache& gram, Stream stream) {
  SelectedFit out;
  if (engine.information_criterion()) {
    out.m_hat = engine.select(y, gram, stream);
    out.coeffs = fit_subset(gram, out.m_hat).coeffs;
  } else {
    const CvResult cv = engine.tune(y, stream);
    out.m_hat = cv.fit.support();
    out.coeffs = cv.fit.coeffs;
  }
  return out;
}

ResampleCenter fitted_center(const DesignMatrix& x, const Eigen::VectorXd& y,
                             const Eigen::VectorXd& coeffs) {
  ResampleCenter c;
  c.fitted = x.entries * coeffs;
  const Eigen::VectorXd raw = y - c.fitted;
  c.residuals = raw.array() - raw.mean();
  return c;
}

double modified_threshold(std::size_t n) {
  const double nd = static_cast<double>(n);
  return std::sqrt(std::log(nd) / nd);
}

ResampleCenter modified_residual_center(const DesignMatrix& x, const Eigen::VectorXd& y,
                                        const Eigen::VectorXd& pilot_coeffs) {
  const double tau = modified_threshold(x.n());
  Eigen::VectorXd thresholded = pilot_coeffs;
  for (Eigen::Index j = 0; j < thresholded.size(); ++j) {
    if (!(std::abs(thresholded[j]) > tau)) thresholded[j] = 0.0;
  }
  return fitted_center(x, y, thresholded);
}

BootstrapDraws residual_bootstrap(const SelectionEngine& engine, const Eigen::VectorXd& y,
                                  std::size_t B, Stream stream, std::size_t workers) {
  const DesignMatrix& x = engine.design();
  const SelectedFit fit = select_and_fit(engine, y, x.gram(y), stream.derive(stream_tag::kSelect));
  return bootstrap_around(engine, fitted_center(x, y, fit.coeffs), B, stream, workers);
}

BootstrapDraws modified_residual_bootstrap(const SelectionEngine& engine, const Eigen::VectorXd& y,
                                           const PenalizedFit& pilot, std::size_t B,
                                           Stream stream, std::size_t workers) {
  return bootstrap_around(engine, modified_residual_center(engine.design(), y, pilot.coeffs), B,
                          stream, workers);
}

BootstrapDraws modified_residual_bootstrap(const SelectionEngine& engine, const Eigen::VectorXd& y,
                                           std::size_t B, Stream stream, std::size_t workers) {
  const CvResult pilot = engine.tune(y, stream.derive(stream_tag::kSelect));
  return modified_residual_bootstrap(engine, y, pilot.fit, B, stream, workers);
}

double agreement_rate(const BootstrapDraws& draws, ModelId m_hat) {
  if (draws.models.empty()) return 0.0;
  std::size_t hits = 0;
  for (ModelId m : draws.models) hits += m == m_hat ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(draws.models.size());
}

}  // namespace mcb
