#include "mcb/selectors.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <variant>

#include "mcb/error.hpp"

namespace mcb {

double ic_score(double rss, std::size_t n, std::size_t model_size, double penalty_per_param) {
  if (!(rss > 0.0)) throw DegenerateFit("information criterion evaluated at rss = 0");
  const double nd = static_cast<double>(n);
  return nd * std::log(rss / nd) + penalty_per_param * static_cast<double>(model_size);
}

double ic_score(const GramCache& gram, ModelId m, double penalty_per_param) {
  return ic_score(fit_subset(gram, m).rss, gram.n, m.size(), penalty_per_param);
}

std::vector<ModelId> best_subset_batch(const SubsetPlan& plan, std::span<const Eigen::VectorXd> xty,
                                       std::span<const double> yty, std::size_t n,
                                       double penalty_per_param,
                                       const kernels::KernelTable& kernels) {
  constexpr std::size_t W = kernels::kTile;
  const std::size_t p = plan.p();
  if (xty.size() != yty.size()) throw ContractViolation("best_subset_batch: size mismatch");
  std::vector<ModelId> out(xty.size());
  std::vector<double> tile_xty(p * W);
  std::vector<double> tile_yty(W);
  std::vector<double> best_rss((p + 1) * W);
  std::vector<std::uint64_t> best_mask((p + 1) * W);

  for (std::size_t start = 0; start < xty.size(); start += W) {
    const std::size_t used = std::min(W, xty.size() - start);
    for (std::size_t lane = 0; lane < W; ++lane) {
      // Pad a partial tile by repeating its first response.
      const std::size_t r = start + (lane < used ? lane : 0);
      if (static_cast<std::size_t>(xty[r].size()) != p) {
        throw ContractViolation("best_subset_batch: X'y length differs from plan width");
      }
      for (std::size_t j = 0; j < p; ++j) tile_xty[j * W + lane] = xty[r][static_cast<Eigen::Index>(j)];
      tile_yty[lane] = yty[r];
    }
    plan.scan(tile_xty.data(), tile_yty.data(), best_rss.data(), best_mask.data(), kernels);
    for (std::size_t lane = 0; lane < used; ++lane) {
      double best_score = std::numeric_limits<double>::infinity();
      std::uint64_t best = 0;
      for (std::size_t k = 0; k <= p; ++k) {
        const double score = ic_score(best_rss[k * W + lane], n, k, penalty_per_param);
        if (score < best_score) {
          best_score = score;
          best = best_mask[k * W + lane];
        }
      }
      out[start + lane] = ModelId{best};
    }
  }
  return out;
}

ModelId best_subset(const SubsetPlan& plan, const GramCache& gram, double penalty_per_param) {
  const Eigen::VectorXd* xty = &gram.xty;
  return best_subset_batch(plan, std::span<const Eigen::VectorXd>(xty, 1),
                           std::span<const double>(&gram.yty, 1), gram.n, penalty_per_param)
      .front();
}

ModelId best_subset(const GramCache& gram, double penalty_per_param) {
  const SubsetPlan plan(*gram.xtx);
  return best_subset(plan, gram, penalty_per_param);
}

ModelId best_subset_naive(const GramCache& gram, double penalty_per_param) {
  const std::size_t p = gram.p();
  if (p == 0 || p > SubsetPlan::kEnumerationLimit) {
    throw ContractViolation("best_subset_naive: p out of enumeration range");
  }
  double best_score = std::numeric_limits<double>::infinity();
  ModelId best;
  const std::uint64_t count = std::uint64_t{1} << p;
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    const ModelId m{mask};
    const double score = ic_score(gram, m, penalty_per_param);
    const bool better = score < best_score ||
                        (score == best_score &&
                         (m.size() < best.size() || (m.size() == best.size() && m < best)));
    if (better) {
      best_score = score;
      best = m;
    }
  }
  return best;
}

CvSpec cv_spec(const SelectorKind& kind) {
  CvSpec spec;
  if (const auto* k = std::get_if<LassoCv>(&kind)) {
    spec.penalty = Penalty::Lasso;
    spec.folds = k->folds;
    spec.grid_size = k->grid_size;
    spec.grid_ratio = k->grid_ratio;
  } else if (const auto* k = std::get_if<ScadCv>(&kind)) {
    spec.penalty = Penalty::Scad;
    spec.folds = k->folds;
    spec.grid_size = k->grid_size;
    spec.grid_ratio = k->grid_ratio;
    spec.a = k->a;
  } else {
    throw ContractViolation("cv_spec: selector '" + std::string(selector_name(kind)) +
                            "' is not a penalized selector");
  }
  return spec;
}

SelectionEngine::SelectionEngine(std::shared_ptr<const DesignMatrix> design, SelectorKind kind)
    : design_(std::move(design)), kind_(kind) {
  validate(kind_);
  if (is_information_criterion(kind_)) {
    plan_ = std::make_shared<const SubsetPlan>(*design_->xtx);
  }
}

double SelectionEngine::penalty_per_param() const {
  if (std::holds_alternative<MinBic>(kind_)) return bic_penalty(design_->n());
  if (std::holds_alternative<MinAic>(kind_)) return aic_penalty();
  throw ContractViolation("penalty_per_param: not an information-criterion selector");
}

ModelId SelectionEngine::select(const Eigen::VectorXd& y, const GramCache& gram,
                                Stream stream) const {
  if (plan_) return best_subset(*plan_, gram, penalty_per_param());
  return tune(y, stream).fit.support();
}

std::vector<ModelId> SelectionEngine::select_batch(std::span<const Eigen::VectorXd> xty,
                                                   std::span<const double> yty) const {
  if (!plan_) throw ContractViolation("select_batch: only for information-criterion selectors");
  return best_subset_batch(*plan_, xty, yty, design_->n(), penalty_per_param());
}

CvResult SelectionEngine::tune(const Eigen::VectorXd& y, Stream stream) const {
  return cv_tune(design_->entries, y, cv_spec(kind_), stream, design_->xtx.get());
}

ModelId select(const DesignMatrix& x, const Eigen::VectorXd& y, const GramCache& gram,
               const SelectorKind& kind, Stream stream) {
  const SelectionEngine engine(std::make_shared<const DesignMatrix>(x), kind);
  return engine.select(y, gram, stream);
}

}  // namespace mcb
