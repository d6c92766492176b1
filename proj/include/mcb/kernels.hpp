#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

// Hot inner loops with one scalar reference implementation and SIMD variants.
// Every variant must return results bitwise identical to the scalar kernel:
// multiplications and subtractions are issued in the same order and no fused
// multiply-add is used.
namespace mcb::kernels {

// Number of responses processed together by the subset scan. Kernels never
// see a partial tile; callers pad.
inline constexpr std::size_t kTile = 8;

// Flattened pre-order enumeration of all nonempty subsets of {0..p-1}; node i
// appends variable var[i] to the path held at depths 1..depth[i]-1. Its new row
// of the Cholesky factor is rows[row_offset[i] .. row_offset[i]+depth[i]-1)
// and 1/diagonal is inv_diag[i].
struct SubsetPlanView {
  std::size_t p = 0;
  std::size_t nodes = 0;
  const std::uint8_t* var = nullptr;
  const std::uint8_t* depth = nullptr;
  const std::uint64_t* mask = nullptr;
  const double* inv_diag = nullptr;
  const std::uint32_t* row_offset = nullptr;
  const double* rows = nullptr;
};

// xty:  p x kTile, lane-minor (xty[j * kTile + lane]).
// yty:  kTile.
// best_rss / best_mask: (p + 1) x kTile, lane-minor. On return entry [k][lane]
// holds the minimal RSS among models of size k for that lane (ties to the
// smaller mask) and the mask attaining it. Size 0 is the empty model.
using SubsetScanFn = void (*)(const SubsetPlanView& plan, const double* xty, const double* yty,
                              double* best_rss, std::uint64_t* best_mask);

// Number of entries d in models[0..count) with lower ⊆ d ⊆ upper.
using NestedCountFn = std::size_t (*)(const std::uint64_t* models, std::size_t count,
                                      std::uint64_t lower, std::uint64_t upper);

// Independent coordinate-descent problems that share lambda, stored lane-minor:
// g[(j * p + i) * lanes + l] is entry (i, j) of lane l's symmetric curvature
// matrix and c[j * lanes + l] its linear term. Each lane minimizes
// (1/2) b'G b - c'b + penalty(b) by cyclic sweeps and stops at its own
// convergence: max |step| < tolerance * (1 + max |b|).
struct CdProblem {
  std::size_t p = 0;
  std::size_t lanes = 0;
  const double* g = nullptr;
  const double* c = nullptr;
  double lambda = 0.0;
  double a = 0.0;     // SCAD shape; unused for the lasso
  bool scad = false;
  double tolerance = 0.0;
  std::size_t max_sweeps = 0;
};

// b (p x lanes, lane-minor) holds the warm start on entry and the solution on
// return. sweeps[l] and last_step[l] receive the sweep count and the final max
// step. Returns false if some lane did not converge within max_sweeps. Callers
// check the SCAD convexity condition beforehand.
using CdSolveFn = bool (*)(const CdProblem& prob, double* b, std::size_t* sweeps,
                           double* last_step);

enum class Isa { Scalar, Avx2, Neon };

struct KernelTable {
  Isa isa;
  SubsetScanFn subset_scan;
  NestedCountFn nested_count;
  CdSolveFn cd_solve;
};

std::string_view isa_name(Isa isa);

// Compiled in and supported by the running CPU.
bool available(Isa isa);

// Table for a specific ISA; throws if unavailable.
const KernelTable& table(Isa isa);

// The best available table, unless overridden by MCB_KERNEL=scalar|avx2|neon
// in the environment or by force().
const KernelTable& active();
void force(Isa isa);

namespace scalar {
void subset_scan(const SubsetPlanView& plan, const double* xty, const double* yty,
                 double* best_rss, std::uint64_t* best_mask);
std::size_t nested_count(const std::uint64_t* models, std::size_t count, std::uint64_t lower,
                         std::uint64_t upper);
bool cd_solve(const CdProblem& prob, double* b, std::size_t* sweeps, double* last_step);
// One lane of cd_solve; SIMD variants use it for leftover lanes.
bool cd_solve_lane(const CdProblem& prob, std::size_t lane, double* b, std::size_t* sweeps,
                   double* last_step);
}  // namespace scalar

}  // namespace mcb::kernels
