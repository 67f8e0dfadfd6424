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
#include "epsfine/submeasure.hpp"

using namespace epsfine;

namespace {

SeqFamily random_indicator_family(Rng& rng, std::size_t length, std::uint64_t ground) {
  std::vector<std::vector<std::uint64_t>> sets;
  for (std::size_t n = 0; n < length; ++n)
    sets.push_back(rng.subset(ground, rng.range(1, 6)));
  return family_from_sets(sets, "random");
}

}  // namespace

TEST_CASE("windowed evaluation on the upper density family") {
  const auto fam = upper_density_family(100);

  const auto on_evens = eval_windowed(fam, SubsetSpec::evens(), 1, 100);
  CHECK(on_evens.value == Rational(1, 2));
  CHECK(on_evens.attained_at == 2);

  CHECK(eval_windowed(fam, SubsetSpec::empty_set(), 1, 100).value == 0);
  CHECK(eval_windowed(fam, SubsetSpec::full_set(), 1, 100).value == 1);

  CHECK_THROWS_AS(eval_windowed(fam, SubsetSpec::evens(), 0, 10), std::invalid_argument);
  CHECK_THROWS_AS(eval_windowed(fam, SubsetSpec::evens(), 50, 10), std::invalid_argument);
  CHECK_THROWS_AS(eval_windowed(fam, SubsetSpec::evens(), 1, 101), std::invalid_argument);
}

TEST_CASE("windowed evaluation matches brute-force enumeration") {
  // independent oracle: |A ∩ [1..n]| / n by direct loop
  const auto fam = upper_density_family(60);
  const auto a = SubsetSpec::periodic(3, {1, 2});
  Rational best = 0;
  std::size_t arg = 7;
  for (std::size_t n = 7; n <= 60; ++n) {
    std::uint64_t hits = 0;
    for (std::uint64_t j = 1; j <= n; ++j)
      if (j % 3 == 1 || j % 3 == 2) ++hits;
    Rational v(hits, n);
    if (v > best) {
      best = v;
      arg = n;
    }
  }
  const auto est = eval_windowed(fam, a, 7, 60);
  CHECK(est.value == best);
  CHECK(est.attained_at == arg);
}

TEST_CASE("exact density of periodic sets and windowed convergence") {
  CHECK(exact_periodic_upper_density(SubsetSpec::periodic(3, {0})) == Rational(1, 3));
  CHECK(exact_periodic_upper_density(SubsetSpec::full_set()) == 1);
  CHECK(exact_periodic_upper_density(SubsetSpec::periodic(4, {0, 1})) == Rational(1, 2));
  CHECK_THROWS_AS(exact_periodic_upper_density(SubsetSpec::finite({1, 2})),
                  std::invalid_argument);

  // the windowed estimate tracks the exact value within period / tail-start
  const auto fam = upper_density_family(2000);
  for (const auto& a : {SubsetSpec::periodic(3, {0}), SubsetSpec::periodic(4, {0, 1}),
                        SubsetSpec::evens()}) {
    const Rational exact = exact_periodic_upper_density(a);
    const Rational windowed = eval_windowed(fam, a, 200, 2000).value;
    const Rational gap = rat_abs(windowed - exact);
    CAPTURE(a.describe());
    CHECK(gap <= Rational(a.period(), 200));
  }
}

TEST_CASE("tail refinement never increases the windowed value") {
  const auto fam = upper_density_family(300);
  const auto a = SubsetSpec::periodic(5, {0, 3});
  Rational prev = eval_windowed(fam, a, 1, 300).value;
  for (std::size_t n0 : {5, 20, 80, 200}) {
    const Rational v = eval_windowed(fam, a, n0, 300).value;
    CHECK(v <= prev);
    prev = v;
  }
}

TEST_CASE("windowed subadditivity and monotonicity over random data") {
  Rng rng(101);
  for (int iter = 0; iter < 60; ++iter) {
    const auto fam = random_indicator_family(rng, 12, 24);
    const auto a = SubsetSpec::periodic(rng.range(2, 7), {0, 1});
    const auto b = SubsetSpec::finite(rng.subset(24, 5));
    const Rational va = eval_windowed(fam, a, 2, 12).value;
    const Rational vb = eval_windowed(fam, b, 2, 12).value;
    const Rational vunion = eval_windowed(fam, set_union(a, b), 2, 12).value;
    CAPTURE(iter);
    REQUIRE(vunion <= va + vb);
    const auto sub = set_meet(a, b);
    REQUIRE(eval_windowed(fam, sub, 2, 12).value <= va);
  }
}

TEST_CASE("family subadditivity, solidness and scaling are exact") {
  Rng rng(202);
  for (int iter = 0; iter < 40; ++iter) {
    const auto x = random_indicator_family(rng, 10, 20);
    const auto y = random_indicator_family(rng, 10, 20);
    const auto sum = add_families(x, y);
    const auto a = SubsetSpec::periodic(rng.range(2, 6), {1});
    CAPTURE(iter);

    // d(x+y) <= d(x) + d(y) on a common window
    REQUIRE(eval_windowed(sum, a, 1, 10).value <=
            eval_windowed(x, a, 1, 10).value + eval_windowed(y, a, 1, 10).value);

    // |y_n| <= |x_n| pointwise forces d(y) <= d(x): shrink x by halving
    const auto shrunk = scale_family(Rational(1, 2), x);
    REQUIRE(eval_windowed(shrunk, a, 1, 10).value <= eval_windowed(x, a, 1, 10).value);

    // exact homogeneity
    const Rational c(-3, 2);
    REQUIRE(eval_windowed(scale_family(c, x), a, 1, 10).value ==
            rat_abs(c) * eval_windowed(x, a, 1, 10).value);
  }
}

TEST_CASE("domination grids") {
  const auto x = upper_density_family(50);
  const std::vector<SubsetSpec> battery{SubsetSpec::evens(), SubsetSpec::periodic(3, {0}),
                                        SubsetSpec::finite({1, 2, 3}),
                                        SubsetSpec::periodic(5, {0, 1, 2})};

  // reflexive: y = x dominates at delta = eps
  const auto self = check_domination(
      x, x, battery, {{Rational(1, 4), Rational(1, 4)}, {Rational(1, 2), Rational(1, 2)}}, 5,
      50);
  CHECK(self.all_hold);

  // y = 2x needs delta = eps/2
  const auto doubled = scale_family(Rational(2), x);
  const auto scaled = check_domination(x, doubled, battery,
                                       {{Rational(1, 2), Rational(1, 4)}}, 5, 50);
  CHECK(scaled.all_hold);
  const auto too_loose = check_domination(x, doubled, battery,
                                          {{Rational(1, 2), Rational(1, 2)}}, 5, 50);
  CHECK_FALSE(too_loose.all_hold);
  REQUIRE(too_loose.cells.size() == 1);
  CHECK(too_loose.cells[0].counterexample.has_value());
}

TEST_CASE("zero-level domination flags") {
  const auto x = upper_density_family(30);
  const std::vector<SubsetSpec> battery{SubsetSpec::evens(), SubsetSpec::finite({2, 4})};

  CHECK(check_domination_zero(x, x, battery, 1, 30, Rational(0)).ok);

  // shrinking coordinatewise cannot create new positive sets
  const auto shrunk = scale_family(Rational(1, 3), x);
  CHECK(check_domination_zero(x, shrunk, battery, 1, 30, Rational(0)).ok);

  // a zero x with a nonzero y flags every set y charges
  const auto zero = scale_family(Rational(0), x);
  const auto report = check_domination_zero(zero, x, battery, 1, 30, Rational(0));
  CHECK_FALSE(report.ok);
  CHECK(report.flags.size() == battery.size());
}

TEST_CASE("chain classifier separates the witness families") {
  const std::size_t len = 200;

  // moving basis vectors: pointwise-to-zero but not uniform
  std::vector<std::vector<std::uint64_t>> singletons;
  for (std::uint64_t n = 1; n <= len; ++n) singletons.push_back({n});
  const auto basis = family_from_sets(singletons, "basis");
  const auto basis_label = classify_chain(basis, len / 2, len, Rational(1, 100));
  CHECK(basis_label.label == ChainClass::PointwiseToZero);
  CHECK_FALSE(basis_label.uniform_level.holds);

  // spreading indicators: uniform-to-zero but norms stay 1
  const auto spread = upper_density_family(len);
  const auto spread_label = classify_chain(spread, len / 2, len, Rational(1, 100));
  CHECK(spread_label.label == ChainClass::UniformToZero);
  CHECK_FALSE(spread_label.norm_level.holds);
  CHECK(spread_label.norm_level.witness_value == 1);

  // constant family: not even pointwise
  std::vector<std::vector<std::uint64_t>> constant(len, {1});
  const auto stuck = family_from_sets(constant, "constant");
  CHECK(classify_chain(stuck, len / 2, len, Rational(1, 100)).label ==
        ChainClass::BoundedOnly);

  // decaying norms land in the strongest class
  std::vector<Rational> decay;
  for (std::uint64_t n = 1; n <= len; ++n) decay.emplace_back(1, n * n);
  const auto vanishing = modulate(decay, spread);
  CHECK(classify_chain(vanishing, len / 2, len, Rational(1, 100)).label ==
        ChainClass::NormToZero);
}
