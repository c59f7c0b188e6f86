#pragma once

#include <cstdint>
#include <random>

#include "clusterkriging/dataset.hpp"

namespace ck {

/// Mixes a base seed with a stream id. Used to give every cluster, fold and
/// restart its own reproducible random stream independent of scheduling.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept;

/// Seeded generator with platform-independent derived draws (the standard
/// distributions are implementation-defined, these are not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }
  /// Uniform on [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer on [0, n).
  Index below(Index n);

 private:
  std::mt19937_64 engine_;
};

/// k distinct indices from [0, n), in draw order.
IndexSet sample_without_replacement(Index n, Index k, Rng& rng);

/// A uniformly random permutation of [0, n).
IndexSet permutation(Index n, Rng& rng);

}  // namespace ck
