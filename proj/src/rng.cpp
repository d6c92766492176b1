#include "mcb/rng.hpp"

namespace mcb {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Stream Stream::derive(std::uint64_t child) const {
  return Stream{splitmix64(key_ ^ splitmix64(child + 0x632be59bd9b4e019ULL))};
}

std::mt19937_64 Stream::engine() const {
  std::seed_seq seq{static_cast<std::uint32_t>(key_),
                    static_cast<std::uint32_t>(key_ >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace mcb
