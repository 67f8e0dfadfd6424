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
#include "epsfine/subset.hpp"

using namespace epsfine;

namespace {

// Independent membership for randomized cross-checks.
SubsetSpec random_spec(Rng& rng) {
  if (rng.below(2) == 0) {
    std::vector<std::uint64_t> elems;
    const auto count = rng.below(8);
    for (std::uint64_t i = 0; i < count; ++i) elems.push_back(rng.range(1, 40));
    return SubsetSpec::finite(std::move(elems));
  }
  const std::uint64_t period = rng.range(1, 9);
  std::vector<std::uint64_t> residues;
  for (std::uint64_t r = 0; r < period; ++r)
    if (rng.below(2) == 0) residues.push_back(r);
  const std::uint64_t threshold = rng.range(1, 12);
  std::vector<std::uint64_t> exceptions;
  for (std::uint64_t e = 1; e < threshold; ++e)
    if (rng.below(3) == 0) exceptions.push_back(e);
  return SubsetSpec::eventually_periodic(period, std::move(residues), threshold,
                                         std::move(exceptions));
}

}  // namespace

TEST_CASE("explicit finite membership and counting") {
  const auto s = SubsetSpec::finite({5, 1, 3, 3});
  CHECK(s.contains(1));
  CHECK(s.contains(3));
  CHECK_FALSE(s.contains(2));
  CHECK(s.count_leq(4) == 2);
  CHECK(s.count_leq(5) == 3);
  CHECK(s.elements() == std::vector<std::uint64_t>{1, 3, 5});
  CHECK_THROWS_AS(SubsetSpec::finite({0, 2}), std::invalid_argument);
}

TEST_CASE("periodic membership and counting") {
  const auto evens = SubsetSpec::evens();
  CHECK(evens.contains(2));
  CHECK_FALSE(evens.contains(7));
  CHECK(evens.count_leq(10) == 5);
  CHECK(evens.count_leq(11) == 5);
  CHECK(evens.count_range(4, 9) == 3);

  const auto mod3 = SubsetSpec::periodic(3, {0});
  CHECK(mod3.count_leq(9) == 3);
  CHECK(mod3.count_leq(8) == 2);
}

TEST_CASE("eventually periodic: exceptions below the threshold") {
  // odd numbers, except 1 and 3 are removed and 2 is added
  const auto s = SubsetSpec::eventually_periodic(2, {1}, 5, {2});
  CHECK(s.contains(2));
  CHECK_FALSE(s.contains(1));
  CHECK_FALSE(s.contains(3));
  CHECK(s.contains(5));
  CHECK(s.contains(7));
  CHECK(s.count_leq(7) == 3);  // {2, 5, 7}
}

TEST_CASE("normalization produces canonical forms") {
  // exceptions that merely restate the residue rule collapse
  const auto s = SubsetSpec::eventually_periodic(2, {0}, 5, {2, 4});
  CHECK(s == SubsetSpec::evens());
  // a redundant large period collapses to the true one
  const auto t = SubsetSpec::periodic(6, {0, 2, 4});
  CHECK(t == SubsetSpec::evens());
  // no residues at all is just the finite exception list
  const auto u = SubsetSpec::eventually_periodic(3, {}, 4, {1, 2});
  CHECK(u.is_finite());
  CHECK(u == SubsetSpec::finite({1, 2}));
}

TEST_CASE("set algebra on residue classes") {
  const auto evens = SubsetSpec::evens();
  const auto odds = SubsetSpec::odds();

  CHECK(set_meet(evens, SubsetSpec::full_set()) == evens);
  CHECK(set_meet(evens, odds).is_empty());

  // residues {0} mod 2 with {0} mod 3 intersect in {0} mod 6
  const auto six = set_meet(evens, SubsetSpec::periodic(3, {0}));
  REQUIRE(six.kind() == SubsetSpec::Kind::EventuallyPeriodic);
  CHECK(six.period() == 6);
  CHECK(six.residues() == std::vector<std::uint64_t>{0});
  for (std::uint64_t n = 1; n <= 36; ++n)
    CHECK(six.contains(n) == (n % 6 == 0));

  CHECK(set_union(evens, odds) == SubsetSpec::full_set());
  CHECK(set_complement(SubsetSpec::full_set()).is_empty());
}

TEST_CASE("complement of a finite set is eventually periodic") {
  const auto s = SubsetSpec::finite({2, 4});
  const auto c = set_complement(s);
  CHECK(c.contains(1));
  CHECK_FALSE(c.contains(2));
  CHECK(c.contains(3));
  CHECK(c.contains(5));
  CHECK(c.contains(1000));
  CHECK(set_complement(c) == s);
}

TEST_CASE("subset and disjointness queries are exact") {
  const auto evens = SubsetSpec::evens();
  const auto mod4 = SubsetSpec::periodic(4, {0});
  CHECK(set_subset_of(mod4, evens));
  CHECK_FALSE(set_subset_of(evens, mod4));
  CHECK(set_disjoint(SubsetSpec::periodic(4, {1}), SubsetSpec::periodic(4, {2})));
  CHECK_FALSE(set_disjoint(SubsetSpec::periodic(4, {1}), SubsetSpec::odds()));
}

TEST_CASE("randomized set algebra agrees with pointwise membership") {
  Rng rng(20260810);
  for (int iter = 0; iter < 300; ++iter) {
    const auto a = random_spec(rng);
    const auto b = random_spec(rng);
    const auto meet_ab = set_meet(a, b);
    const auto union_ab = set_union(a, b);
    const auto comp_a = set_complement(a);
    std::uint64_t count = 0;
    for (std::uint64_t n = 1; n <= 120; ++n) {
      CAPTURE(iter, n);
      REQUIRE(meet_ab.contains(n) == (a.contains(n) && b.contains(n)));
      REQUIRE(union_ab.contains(n) == (a.contains(n) || b.contains(n)));
      REQUIRE(comp_a.contains(n) != a.contains(n));
      count += a.contains(n) ? 1 : 0;
      REQUIRE(a.count_leq(n) == count);
    }
    REQUIRE(set_complement(comp_a) == a);
  }
}

TEST_CASE("elements_up_to materializes prefixes") {
  CHECK(SubsetSpec::evens().elements_up_to(7) == std::vector<std::uint64_t>{2, 4, 6});
  CHECK(SubsetSpec::initial_segment(3).elements_up_to(10) ==
        std::vector<std::uint64_t>{1, 2, 3});
  CHECK(SubsetSpec::empty_set().elements_up_to(5).empty());
}
