#pragma once

#include <cstdint>
#include <random>

namespace lsssc {

using Engine = std::mt19937_64;

/// Purposes that get their own random stream. Streams are keyed only on
/// (seed, purpose, index) so draws never depend on data values.
enum class Stream : std::uint64_t {
  Subspace = 1,
  Point = 2,
  Noise = 3,
  Mask = 4,
  SolverInit = 5,
  KMeans = 6,
  Trial = 7,
  Inradius = 8,
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Independent engine for (seed, purpose, index).
Engine make_stream(std::uint64_t seed, Stream purpose, std::uint64_t index);

/// Seed of trial `trial` in cell `cell` for a sweep with master seed `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t cell, std::uint64_t trial) noexcept;

}  // namespace lsssc
