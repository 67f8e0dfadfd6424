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
#include <catch2/catch_amalgamated.hpp>

#include "epsfine/rng.hpp"
#include "epsfine/sparse_vec.hpp"

using namespace epsfine;

namespace {

SparseVec random_vec(Rng& rng, std::uint64_t max_index = 30, std::uint64_t max_den = 12) {
  std::vector<SparseVec::Entry> entries;
  const auto count = rng.below(9);
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::int64_t num =
        static_cast<std::int64_t>(rng.below(21)) - 10;  // [-10, 10], zeros dropped
    const std::uint64_t den = rng.range(1, max_den);
    entries.emplace_back(rng.range(1, max_index), Rational(num, den));
  }
  return SparseVec::from_entries(std::move(entries));
}

}  // namespace

TEST_CASE("norms of hand-built vectors") {
  const auto v = SparseVec::from_entries({{1, Rational(1, 2)}, {3, Rational(-1, 4)}});
  CHECK(norm1(v) == Rational(3, 4));

  const auto w = SparseVec::from_entries({{1, Rational(1, 2)}, {3, Rational(-3, 4)}});
  CHECK(norm_inf(w) == Rational(3, 4));

  CHECK(norm1(SparseVec()) == 0);
  CHECK(norm_inf(SparseVec()) == 0);
}

TEST_CASE("canonical storage") {
  // duplicate coordinates are summed, zeros vanish
  const auto v = SparseVec::from_entries({{2, Rational(1, 2)}, {2, Rational(-1, 2)}});
  CHECK(v.is_zero());
  CHECK(v == SparseVec());

  const auto w = add(SparseVec::from_entries({{1, Rational(1, 2)}}),
                     SparseVec::from_entries({{1, Rational(-1, 2)}}));
  CHECK(w.is_zero());
  CHECK(w.entries().empty());

  CHECK_THROWS_AS(SparseVec::from_entries({{0, Rational(1)}}), std::invalid_argument);
}

TEST_CASE("projection onto subsets") {
  // x = (1/4) 1_{[1..4]}
  const auto x = SparseVec::from_entries(
      {{1, Rational(1, 4)}, {2, Rational(1, 4)}, {3, Rational(1, 4)}, {4, Rational(1, 4)}});

  CHECK(project(SubsetSpec::full_set(), x) == x);
  CHECK(project(SubsetSpec::finite({9, 17}), x).is_zero());

  const auto onto_evens = project(SubsetSpec::evens(), x);
  CHECK(onto_evens ==
        SparseVec::from_entries({{2, Rational(1, 4)}, {4, Rational(1, 4)}}));
  CHECK(norm1(onto_evens) == Rational(1, 2));
  CHECK(x.norm1_on(SubsetSpec::evens()) == Rational(1, 2));
}

TEST_CASE("algebra basics") {
  const auto x = SparseVec::from_entries({{1, Rational(1, 2)}, {5, Rational(2)}});
  CHECK(add(x, SparseVec()) == x);
  CHECK(modulus(scale(Rational(-1), x)) == modulus(x));
  CHECK(scale(Rational(0), x).is_zero());
  CHECK(x.at(5) == Rational(2));
  CHECK(x.at(2) == 0);
  CHECK(x.max_index() == 5);
}

TEST_CASE("randomized norm and projection invariants") {
  Rng rng(7);
  for (int iter = 0; iter < 400; ++iter) {
    const auto x = random_vec(rng);
    const auto y = random_vec(rng);
    CAPTURE(iter);

    // triangle inequality, exactly
    REQUIRE(norm1(add(x, y)) <= norm1(x) + norm1(y));
    REQUIRE(norm_inf(x) <= norm1(x));

    // complement splits the norm exactly
    const auto a = SubsetSpec::periodic(rng.range(1, 6), {0});
    REQUIRE(x.norm1_on(a) + x.norm1_on(set_complement(a)) == norm1(x));

    // composed projections equal projection onto the meet
    const auto b = SubsetSpec::evens();
    REQUIRE(project(a, project(b, x)) == project(set_meet(a, b), x));

    // scaling is exactly homogeneous
    const Rational c(3, 7);
    REQUIRE(norm1(scale(c, x)) == rat_abs(c) * norm1(x));
  }
}

TEST_CASE("prefix helpers") {
  const auto x = SparseVec::from_entries(
      {{2, Rational(1, 3)}, {5, Rational(-1, 2)}, {9, Rational(4)}});
  CHECK(x.norm1_prefix(5) == Rational(5, 6));
  CHECK(x.norm1_prefix(1) == 0);
  CHECK(x.max_abs_prefix(5) == Rational(1, 2));
  CHECK(x.max_abs_prefix(100) == Rational(4));
}
