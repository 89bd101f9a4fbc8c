// Copyright 2026 The splitgauntlet Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SPLITGAUNTLET_RANDOM_HPP
#define SPLITGAUNTLET_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace splitgauntlet {

// Seeded sampling helpers built directly on std::mt19937_64. The standard
// <random> distributions leave their algorithms implementation-defined, so
// split manifests produced with them would not be reproducible across
// standard libraries. Everything here is pinned to one algorithm.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Unbiased integer in [0, bound) via rejection sampling. bound must be > 0.
  std::uint64_t next_below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("Rng::next_below: bound must be positive");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

  std::size_t next_index(std::size_t n) { return static_cast<std::size_t>(next_below(n)); }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_real() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool next_bernoulli(double p) { return next_real() < p; }

  /// Geometric draw (number of failures before first success), by inversion.
  std::uint64_t next_geometric(double p) {
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("Rng::next_geometric: p must be in (0, 1]");
    if (p == 1.0) return 0;
    const double u = next_real();
    return static_cast<std::uint64_t>(std::floor(std::log1p(-u) / std::log1p(-p)));
  }

  /// Fisher-Yates shuffle, high index downward.
  template <typename T>
  void shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::swap(values[i - 1], values[next_index(i)]);
    }
  }

  /// k distinct values from {0, ..., n-1}, in draw order.
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k) {
    if (k > n) throw std::invalid_argument("Rng::sample_without_replacement: k > n");
    std::vector<std::size_t> pool(n);
    for (std::size_t i = 0; i < n; ++i) pool[i] = i;
    std::vector<std::size_t> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = i + next_index(n - i);
      std::swap(pool[i], pool[j]);
      out.push_back(pool[i]);
    }
    return out;
  }

 private:
  std::mt19937_64 engine_;
};

/// Stateless mix of a base seed and a stream index (splitmix64 finalizer),
/// used to give repeated runs independent, reproducible substreams.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace splitgauntlet

#endif  // SPLITGAUNTLET_RANDOM_HPP
