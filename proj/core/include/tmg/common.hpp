// SPDX-License-Identifier: Apache-2.0

#ifndef TMG_COMMON_HPP
#define TMG_COMMON_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace tmg {

/// Global index type for unknowns, rows and columns.
using idx_t = std::int64_t;

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A user-facing configuration problem (bad option value, invalid layout
/// request, ...). The CLI maps this to exit code 1.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// Thrown inside a rank context when some other rank of the world failed.
/// Rank bodies should let this propagate; spawn_world reports the original
/// failure.
class WorldAborted : public Error {
public:
  using Error::Error;
};

namespace detail {

/// SplitMix64 step; used to derive reproducible per-index pseudo-random
/// values that do not depend on how data is partitioned across ranks.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

} // namespace detail

/// Deterministic value in [0,1) keyed by (seed, global index).
inline double hashed_uniform(std::uint64_t seed, std::uint64_t index) {
  const std::uint64_t h = detail::splitmix64(seed ^ detail::splitmix64(index));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

} // namespace tmg

#endif
