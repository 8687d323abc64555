#include "lsssc/rng.hpp"

namespace lsssc {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Engine make_stream(std::uint64_t seed, Stream purpose, std::uint64_t index) {
  const std::uint64_t a = splitmix64(seed);
  const std::uint64_t b = splitmix64(a ^ static_cast<std::uint64_t>(purpose));
  const std::uint64_t c = splitmix64(b ^ splitmix64(index));
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                    static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32)};
  return Engine(seq);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t cell, std::uint64_t trial) noexcept {
  return splitmix64(splitmix64(seed ^ 0x5eedULL) + splitmix64(cell * 0x100000001b3ULL) +
                    splitmix64(trial + 0x7f4a7c15ULL));
}

}  // namespace lsssc
