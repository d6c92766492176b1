#include "mcb/oracle.hpp"

#include <map>
#include <random>
#include <sstream>

#include "mcb/datagen.hpp"
#include "mcb/mcb.hpp"
#include "mcb/selectors.hpp"

namespace mcb {

namespace {

constexpr std::size_t kMaxMessages = 10;

void record(SuiteResult& r, const std::string& what) {
  ++r.failures;
  if (r.messages.size() < kMaxMessages) r.messages.push_back(what);
}

}  // namespace

McbInstance random_mcb_instance(std::uint64_t seed) {
  auto rng = Stream{seed}.engine();
  std::uniform_int_distribution<std::size_t> pick_p(1, 8);
  std::uniform_int_distribution<std::size_t> pick_b(1, 200);
  std::uniform_int_distribution<std::size_t> pick_k(1, 4);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  McbInstance inst;
  inst.p = pick_p(rng);
  const std::size_t B = pick_b(rng);
  inst.alpha = 0.01 + 0.48 * unit(rng);

  const std::size_t k = pick_k(rng);
  const std::uint64_t full = ModelId::full(inst.p).mask();
  std::vector<std::uint64_t> centers(k);
  std::vector<double> weights(k);
  for (std::size_t c = 0; c < k; ++c) {
    centers[c] = rng() & full;
    weights[c] = unit(rng) + 0.05;
  }
  const double flip = 0.2 * unit(rng) * unit(rng);
  std::discrete_distribution<std::size_t> component(weights.begin(), weights.end());

  std::vector<ModelId> models;
  models.reserve(B);
  for (std::size_t b = 0; b < B; ++b) {
    std::uint64_t m = centers[component(rng)];
    for (std::size_t j = 0; j < inst.p; ++j) {
      if (unit(rng) < flip) m ^= std::uint64_t{1} << j;
    }
    models.push_back(ModelId{m});
  }
  inst.draws = make_draws(std::move(models), inst.p);
  return inst;
}

SuiteResult mcb_oracle_suite(std::uint64_t seed, std::size_t instances) {
  SuiteResult r;
  r.name = "mcb heuristic vs exhaustive";
  r.instances = instances;
  const Stream root{seed};
  for (std::size_t i = 0; i < instances; ++i) {
    const McbInstance inst = random_mcb_instance(root.derive(i).key());
    const auto& d = inst.draws;
    std::ostringstream tag;
    tag << "instance " << i << " (p=" << inst.p << ", B=" << d.B << ", alpha=" << inst.alpha << "): ";
    const McbBounds h = solve_mcb(d, inst.alpha, inst.p);
    const McbBounds e = solve_mcb_exhaustive(d, inst.alpha, inst.p);
    const std::size_t need = required_hits(d.B, inst.alpha);

    if (e.width > h.width) record(r, tag.str() + "exhaustive width exceeds heuristic width");
    for (const McbBounds* b : {&h, &e}) {
      const char* who = b == &h ? "heuristic" : "exhaustive";
      if (!b->lower.subset_of(b->upper)) record(r, tag.str() + who + " bounds not nested");
      if (b->width != b->upper.size() - b->lower.size()) record(r, tag.str() + who + " width mismatch");
      const double achieved = r_hat(d, b->lower, b->upper);
      if (achieved != b->r_hat) record(r, tag.str() + who + " stored r_hat differs from recomputation");
      if (achieved * static_cast<double>(d.B) + 0.5 < static_cast<double>(need)) {
        record(r, tag.str() + who + " bounds infeasible");
      }
    }
    if (r_hat(d, ModelId::empty(), ModelId::full(inst.p)) != 1.0) {
      record(r, tag.str() + "r_hat(empty, full) != 1");
    }
    std::map<std::uint64_t, std::size_t> hist;
    for (ModelId m : d.models) ++hist[m.mask()];
    bool concentrated = false;
    for (const auto& [mask, count] : hist) concentrated |= count >= need;
    if (concentrated && (h.width != 0 || e.width != 0)) {
      record(r, tag.str() + "collapse consistency violated");
    }
  }
  return r;
}

SuiteResult best_subset_oracle_suite(std::uint64_t seed, std::size_t instances) {
  SuiteResult r;
  r.name = "best subset incremental vs naive";
  r.instances = instances;
  constexpr std::size_t n = 80;
  constexpr std::size_t p = 10;
  const Stream root{seed};
  for (std::size_t i = 0; i < instances; ++i) {
    const Stream s = root.derive(i);
    auto rng = s.engine();
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double rho = 0.8 * unit(rng);
    const DesignMatrix x = make_design(n, p, rho, s.derive(1).key());
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(p);
    for (std::size_t j = 0; j < p; ++j) {
      if (unit(rng) < 0.4) theta[static_cast<Eigen::Index>(j)] = 2.0 * unit(rng) - 1.0;
    }
    const Eigen::VectorXd y = gen_response(x, make_param(theta), 1.0, s.derive(2));
    const GramCache gram = x.gram(y);
    const SubsetPlan plan(*x.xtx);
    for (double pen : {aic_penalty(), bic_penalty(n)}) {
      const ModelId fast = best_subset(plan, gram, pen);
      const ModelId slow = best_subset_naive(gram, pen);
      if (fast != slow) {
        std::ostringstream msg;
        msg << "instance " << i << " penalty " << pen << ": incremental " << fast.to_string()
            << " vs naive " << slow.to_string();
        record(r, msg.str());
      }
    }
  }
  return r;
}

}  // namespace mcb
