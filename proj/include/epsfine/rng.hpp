/*
 * Copyright 2026 The epsfine authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <set>
#include <stdexcept>
#include <vector>

namespace epsfine {

// Seeded generator with portable derived draws. std::mt19937_64 output is
// pinned by the standard; the bounded draw below uses rejection sampling
// instead of std::uniform_int_distribution, whose mapping is
// implementation-defined. Same seed, same draws, on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }

  /// Uniform value in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::below: empty range");
    constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t rem = (kMax % n + 1) % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t v = gen_();
      if (rem == 0 || v < kMax - rem + 1) return v % n;
    }
  }

  /// Uniform value in [lo, hi], inclusive.
  std::uint64_t range(std::uint64_t lo, std::uint64_t hi) {
    if (lo > hi) throw std::invalid_argument("Rng::range: lo > hi");
    return lo + below(hi - lo + 1);
  }

  /// Uniform random m-subset of {1,...,ground}, sorted. Floyd's algorithm.
  std::vector<std::uint64_t> subset(std::uint64_t ground, std::uint64_t m) {
    if (m > ground) throw std::invalid_argument("Rng::subset: m > ground");
    std::set<std::uint64_t> chosen;
    for (std::uint64_t j = ground - m + 1; j <= ground; ++j) {
      const std::uint64_t t = 1 + below(j);
      if (!chosen.insert(t).second) chosen.insert(j);
    }
    return {chosen.begin(), chosen.end()};
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace epsfine
