#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "mcb/model_id.hpp"
#include "mcb/penalized.hpp"
#include "mcb/rng.hpp"
#include "mcb/selectors.hpp"

namespace mcb {

struct BootstrapDraws {
  std::vector<ModelId> models;  // m^(1..B)
  std::vector<double> freq;     // per-variable inclusion frequency
  std::size_t B = 0;
};

// Wraps re-selected models and tallies inclusion frequencies over p variables.
BootstrapDraws make_draws(std::vector<ModelId> models, std::size_t p);

// y* = fitted + e*, with e* resampled uniformly with replacement from `residuals`.
struct ResampleCenter {
  Eigen::VectorXd fitted;
  Eigen::VectorXd residuals;  // mean-centered
};

// Draw b uses stream.derive(b): first n uniform indices from its engine, then
// any selector randomness from stream.derive(b).derive(stream_tag::kSelect).
// Draws are independent of `workers`.
BootstrapDraws bootstrap_around(const SelectionEngine& engine, const ResampleCenter& center,
                                std::size_t B, Stream stream, std::size_t workers = 1);

// The sample-selected model and the coefficient estimate behind it: the OLS
// refit on m_hat for the information criteria, the CV-tuned fit otherwise.
struct SelectedFit {
  ModelId m_hat;
  Eigen::VectorXd coeffs;
};

SelectedFit select_and_fit(const SelectionEngine& engine, const Eigen::VectorXd& y,
                           const GramCache& gram, Stream stream);

// Resample around X coeffs with the centered residuals y - X coeffs.
ResampleCenter fitted_center(const DesignMatrix& x, const Eigen::VectorXd& y,
                             const Eigen::VectorXd& coeffs);

double modified_threshold(std::size_t n);

// Hard-thresholds the pilot at sqrt(log n / n), then as fitted_center.
ResampleCenter modified_residual_center(const DesignMatrix& x, const Eigen::VectorXd& y,
                                        const Eigen::VectorXd& pilot_coeffs);

// Residual bootstrap around the selected model's fit; the selection itself
// uses stream.derive(stream_tag::kSelect).
BootstrapDraws residual_bootstrap(const SelectionEngine& engine, const Eigen::VectorXd& y,
                                  std::size_t B, Stream stream, std::size_t workers = 1);

// pilot is the CV-tuned lasso fit on y.
BootstrapDraws modified_residual_bootstrap(const SelectionEngine& engine, const Eigen::VectorXd& y,
                                           const PenalizedFit& pilot, std::size_t B,
                                           Stream stream, std::size_t workers = 1);

// Tunes the pilot from stream.derive(stream_tag::kSelect) and then resamples.
BootstrapDraws modified_residual_bootstrap(const SelectionEngine& engine, const Eigen::VectorXd& y,
                                           std::size_t B, Stream stream, std::size_t workers = 1);

// Fraction of draws equal to m_hat.
double agreement_rate(const BootstrapDraws& draws, ModelId m_hat);

}  // namespace mcb
