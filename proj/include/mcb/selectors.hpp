#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mcb/config.hpp"
#include "mcb/datagen.hpp"
#include "mcb/model_id.hpp"
#include "mcb/penalized.hpp"
#include "mcb/regress.hpp"
#include "mcb/rng.hpp"
#include "mcb/subset_plan.hpp"

namespace mcb {

inline double aic_penalty() { return 2.0; }
inline double bic_penalty(std::size_t n) { return std::log(static_cast<double>(n)); }

// n log(rss / n) + penalty_per_param * |m|. Throws DegenerateFit if rss <= 0.
double ic_score(double rss, std::size_t n, std::size_t model_size, double penalty_per_param);
double ic_score(const GramCache& gram, ModelId m, double penalty_per_param);

// Exhaustive minimum-criterion model: ties go to the smaller model, then to
// the smaller mask. Runs the incremental-Cholesky subset walk.
ModelId best_subset(const GramCache& gram, double penalty_per_param);
ModelId best_subset(const SubsetPlan& plan, const GramCache& gram, double penalty_per_param);

// Batch form: responses r share the design, given by (xty[r], yty[r]).
std::vector<ModelId> best_subset_batch(const SubsetPlan& plan, std::span<const Eigen::VectorXd> xty,
                                       std::span<const double> yty, std::size_t n,
                                       double penalty_per_param,
                                       const kernels::KernelTable& kernels = kernels::active());

// Reference path: an independent Cholesky refit for every one of the 2^p subsets.
ModelId best_subset_naive(const GramCache& gram, double penalty_per_param);

CvSpec cv_spec(const SelectorKind& kind);

// Binds a selector to one fixed design so per-design precomputation (the
// subset plan) is done once. Immutable after construction; thread-safe.
class SelectionEngine {
 public:
  SelectionEngine(std::shared_ptr<const DesignMatrix> design, SelectorKind kind);

  const DesignMatrix& design() const { return *design_; }
  const SelectorKind& kind() const { return kind_; }
  bool information_criterion() const { return plan_ != nullptr; }
  double penalty_per_param() const;

  ModelId select(const Eigen::VectorXd& y, const GramCache& gram, Stream stream) const;

  // Information-criterion selectors only.
  std::vector<ModelId> select_batch(std::span<const Eigen::VectorXd> xty,
                                    std::span<const double> yty) const;

  // Penalized selectors only: the CV-tuned fit behind select().
  CvResult tune(const Eigen::VectorXd& y, Stream stream) const;

 private:
  std::shared_ptr<const DesignMatrix> design_;
  SelectorKind kind_;
  std::shared_ptr<const SubsetPlan> plan_;
};

// One-shot convenience form; builds a SelectionEngine per call.
ModelId select(const DesignMatrix& x, const Eigen::VectorXd& y, const GramCache& gram,
               const SelectorKind& kind, Stream stream);

}  // namespace mcb
