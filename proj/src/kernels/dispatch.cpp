#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "mcb/kernels.hpp"

namespace mcb::kernels {

#if defined(MCB_HAVE_AVX2_KERNELS)
namespace avx2 {
void subset_scan(const SubsetPlanView&, const double*, const double*, double*, std::uint64_t*);
std::size_t nested_count(const std::uint64_t*, std::size_t, std::uint64_t, std::uint64_t);
bool cd_solve(const CdProblem&, double*, std::size_t*, double*);
}  // namespace avx2
#endif
#if defined(MCB_HAVE_NEON_KERNELS)
namespace neon {
void subset_scan(const SubsetPlanView&, const double*, const double*, double*, std::uint64_t*);
std::size_t nested_count(const std::uint64_t*, std::size_t, std::uint64_t, std::uint64_t);
bool cd_solve(const CdProblem&, double*, std::size_t*, double*);
}  // namespace neon
#endif

namespace {

constexpr KernelTable kScalar{Isa::Scalar, &scalar::subset_scan, &scalar::nested_count,
                             &scalar::cd_solve};
#if defined(MCB_HAVE_AVX2_KERNELS)
constexpr KernelTable kAvx2{Isa::Avx2, &avx2::subset_scan, &avx2::nested_count, &avx2::cd_solve};
#endif
#if defined(MCB_HAVE_NEON_KERNELS)
constexpr KernelTable kNeon{Isa::Neon, &neon::subset_scan, &neon::nested_count, &neon::cd_solve};
#endif

const KernelTable* best_available() {
  if (const char* env = std::getenv("MCB_KERNEL")) {
    const std::string name(env);
    if (name == "scalar") return &kScalar;
    if (name == "avx2" && available(Isa::Avx2)) return &table(Isa::Avx2);
    if (name == "neon" && available(Isa::Neon)) return &table(Isa::Neon);
  }
  if (available(Isa::Avx2)) return &table(Isa::Avx2);
  if (available(Isa::Neon)) return &table(Isa::Neon);
  return &kScalar;
}

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{best_available()};
  return slot;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "unknown";
}

bool available(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2:
#if defined(MCB_HAVE_AVX2_KERNELS)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::Neon:
#if defined(MCB_HAVE_NEON_KERNELS)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table(Isa isa) {
  if (!available(isa)) {
    throw std::runtime_error("kernel ISA '" + std::string(isa_name(isa)) + "' is not available");
  }
  switch (isa) {
#if defined(MCB_HAVE_AVX2_KERNELS)
    case Isa::Avx2: return kAvx2;
#endif
#if defined(MCB_HAVE_NEON_KERNELS)
    case Isa::Neon: return kNeon;
#endif
    default: return kScalar;
  }
}

const KernelTable& active() { return *active_slot().load(std::memory_order_acquire); }

void force(Isa isa) { active_slot().store(&table(isa), std::memory_order_release); }

}  // namespace mcb::kernels
