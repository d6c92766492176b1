#pragma once

#include <cstdint>
#include <random>

namespace mcb {

std::uint64_t splitmix64(std::uint64_t x);

// A named position in a tree of random streams. Children are derived by
// hashing, so a stream's key depends only on the path from the master seed
// and never on the order in which siblings are consumed.
class Stream {
 public:
  constexpr explicit Stream(std::uint64_t key) : key_(key) {}

  Stream derive(std::uint64_t child) const;
  constexpr std::uint64_t key() const { return key_; }

  // A fresh engine positioned at the start of this stream.
  std::mt19937_64 engine() const;

 private:
  std::uint64_t key_;
};

// Fixed child tags used across modules.
namespace stream_tag {
inline constexpr std::uint64_t kDesign = 0x64657369676eULL;
inline constexpr std::uint64_t kSweep = 0x7377656570ULL;
inline constexpr std::uint64_t kDrift = 0x6472696674ULL;
inline constexpr std::uint64_t kCollapse = 0x636f6c6cULL;
inline constexpr std::uint64_t kVariance = 0x766172ULL;
inline constexpr std::uint64_t kResponse = 0x72657370ULL;
inline constexpr std::uint64_t kSelect = 0x73656cULL;
inline constexpr std::uint64_t kBootstrap = 0x626f6f74ULL;
}  // namespace stream_tag

}  // namespace mcb
