#include "clusterkriging/random.hpp"

#include <numeric>
#include <utility>

#include "clusterkriging/error.hpp"

namespace ck {

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept {
  // splitmix64 finalizer over the combined words
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

Index Rng::below(Index n) {
  if (n <= 0) throw ParameterError("Rng::below requires a positive bound");
  const auto bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t r = engine_();
  while (r >= limit) r = engine_();
  return static_cast<Index>(r % bound);
}

IndexSet sample_without_replacement(Index n, Index k, Rng& rng) {
  if (k < 0 || k > n) throw ParameterError("cannot sample " + std::to_string(k) + " of " + std::to_string(n));
  IndexSet pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), Index{0});
  for (Index i = 0; i < k; ++i) {
    const Index j = i + rng.below(n - i);
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
  }
  pool.resize(static_cast<std::size_t>(k));
  return pool;
}

IndexSet permutation(Index n, Rng& rng) { return sample_without_replacement(n, n, rng); }

}  // namespace ck
