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

#include "epsfine/family.hpp"

using namespace epsfine;

TEST_CASE("normalized indicator vectors") {
  const auto v = normalized_indicator({2, 5, 7});
  CHECK(v == SparseVec::from_entries(
                 {{2, Rational(1, 3)}, {5, Rational(1, 3)}, {7, Rational(1, 3)}}));
  CHECK(norm1(v) == 1);
  CHECK(norm_inf(v) == Rational(1, 3));

  CHECK(normalized_indicator({9}) == SparseVec::basis(9));

  const auto quarter = normalized_indicator({1, 2, 3, 4});
  CHECK(norm_inf(quarter) == Rational(1, 4));
  CHECK(quarter.norm1_on(SubsetSpec::evens()) == Rational(1, 2));

  CHECK_THROWS_AS(normalized_indicator({}), std::invalid_argument);
}

TEST_CASE("upper density family") {
  const auto fam = upper_density_family(3);
  CHECK(fam.size() == 3);
  CHECK(fam.vec(1) == SparseVec::basis(1));
  CHECK(fam.vec(2) ==
        SparseVec::from_entries({{1, Rational(1, 2)}, {2, Rational(1, 2)}}));
  CHECK(fam.vec(3) == SparseVec::from_entries({{1, Rational(1, 3)},
                                               {2, Rational(1, 3)},
                                               {3, Rational(1, 3)}}));
  CHECK(fam.sup_norm_bound() == 1);
  CHECK(fam.ground_bound() == 3);

  const auto big = upper_density_family(100);
  for (std::size_t n = 1; n <= 100; ++n) CHECK(big.norm1(n) == 1);
  CHECK(big.norm_inf(100) == Rational(1, 100));
}

TEST_CASE("families from explicit sets") {
  const auto fam = family_from_sets({{1}, {1, 2}, {1, 2, 3}});
  const auto density = upper_density_family(3);
  for (std::size_t n = 1; n <= 3; ++n) CHECK(fam.vec(n) == density.vec(n));

  const auto sized = family_from_sets({{4}, {4, 9}, {1, 5, 6}});
  for (std::size_t n = 1; n <= 3; ++n) {
    CHECK(sized.norm1(n) == 1);
    CHECK(sized.norm_inf(n) == Rational(1, static_cast<std::uint64_t>(n)));
  }

  CHECK_THROWS_AS(family_from_sets({{1}, {}}), std::invalid_argument);
}

TEST_CASE("family windowed accessors agree with materialized vectors") {
  const auto fam = family_from_sets({{2, 4, 6}, {1, 3}, {5}});
  const auto evens = SubsetSpec::evens();
  for (std::size_t n = 1; n <= 3; ++n) {
    const auto v = fam.vec(n);
    CHECK(fam.norm1(n) == norm1(v));
    CHECK(fam.norm_inf(n) == norm_inf(v));
    CHECK(fam.norm1_on(n, evens) == v.norm1_on(evens));
    CHECK(fam.norm_inf_on(n, evens) == v.norm_inf_on(evens));
    CHECK(fam.norm1_prefix(n, 4) == v.norm1_prefix(4));
    CHECK(fam.max_abs_prefix(n, 4) == v.max_abs_prefix(4));
    for (std::uint64_t j = 1; j <= 7; ++j)
      CHECK(fam.abs_value_at(n, j) == rat_abs(v.at(j)));
  }
  CHECK(fam.support_union(1, 3) == std::vector<std::uint64_t>{1, 2, 3, 4, 5, 6});
}

TEST_CASE("declared bound must dominate attained norms") {
  std::vector<SparseVec> vecs{SparseVec::basis(1), scale(Rational(3), SparseVec::basis(2))};
  CHECK_THROWS_AS(SeqFamily::from_vectors(vecs, "too-small", Rational(2)),
                  std::invalid_argument);
  const auto ok = SeqFamily::from_vectors(vecs, "roomy", Rational(5));
  CHECK(ok.sup_norm_bound() == 5);
}

TEST_CASE("modulation scales elements pointwise") {
  const auto fam = upper_density_family(2);

  const auto same = modulate({Rational(1), Rational(1)}, fam);
  for (std::size_t n = 1; n <= 2; ++n) CHECK(same.vec(n) == fam.vec(n));

  const auto zero = modulate({Rational(0), Rational(0)}, fam);
  for (std::size_t n = 1; n <= 2; ++n) CHECK(zero.vec(n).is_zero());

  const auto doubled = modulate({Rational(1), Rational(2)}, fam);
  CHECK(doubled.norm1(1) == 1);
  CHECK(doubled.norm1(2) == 2);
  CHECK(doubled.sup_norm_bound() == 2);

  CHECK_THROWS_AS(modulate({Rational(1)}, fam), std::invalid_argument);

  // composition law: a then b equals the pointwise product
  const std::vector<Rational> a{Rational(2), Rational(-1, 3)};
  const std::vector<Rational> b{Rational(1, 2), Rational(6)};
  std::vector<Rational> ab{Rational(1), Rational(-2)};
  const auto left = modulate(a, modulate(b, fam));
  const auto right = modulate(ab, fam);
  for (std::size_t n = 1; n <= 2; ++n) CHECK(left.vec(n) == right.vec(n));
}

TEST_CASE("sup-embedding families") {
  const auto fam = embed_linf({Rational(1), Rational(-2), Rational(3)},
                              {{4, 5}, {1, 9, 11}, {2}});
  Rational sup = 0;
  for (std::size_t n = 1; n <= 3; ++n) sup = rat_max(sup, fam.norm1(n));
  CHECK(sup == 3);

  const auto zero = embed_linf({Rational(0), Rational(0)}, {{1}, {2, 3}});
  CHECK(zero.norm1(1) == 0);
  CHECK(zero.norm1(2) == 0);

  // constant ones over initial segments reproduce the upper density family
  std::vector<Rational> ones(4, Rational(1));
  std::vector<std::vector<std::uint64_t>> segments;
  for (std::uint64_t n = 1; n <= 4; ++n) {
    std::vector<std::uint64_t> seg(n);
    std::iota(seg.begin(), seg.end(), std::uint64_t{1});
    segments.push_back(std::move(seg));
  }
  const auto embedded = embed_linf(ones, segments);
  const auto density = upper_density_family(4);
  for (std::size_t n = 1; n <= 4; ++n) CHECK(embedded.vec(n) == density.vec(n));
}

TEST_CASE("family sums and scalar scaling") {
  const auto x = family_from_sets({{1, 2}, {3}});
  const auto y = family_from_sets({{2}, {3, 4}});
  const auto sum = add_families(x, y);
  CHECK(sum.vec(1) ==
        SparseVec::from_entries({{1, Rational(1, 2)}, {2, Rational(3, 2)}}));
  CHECK(sum.sup_norm_bound() == 2);

  const auto scaled = scale_family(Rational(-1, 2), x);
  CHECK(scaled.norm1(1) == Rational(1, 2));
  CHECK(scaled.vec(2) == SparseVec::from_entries({{3, Rational(-1, 2)}}));

  CHECK_THROWS_AS(add_families(x, upper_density_family(3)), std::invalid_argument);
}

TEST_CASE("size budget checks count exactly") {
  TLambdaSpec spec;
  spec.lambda = Rational(1);
  spec.sets = {{1}, {2}, {1, 2}, {2, 3}, {3, 4}, {1, 2, 3}};  // sizes 1,1,2,2,2,3
  const auto report = check_t_lambda(spec);
  CHECK(report.ok);
  REQUIRE(report.rows.size() == 3);
  CHECK(report.rows[0].cardinality == 1);
  CHECK(report.rows[0].count == 2);
  CHECK(report.rows[1].count == 3);
  CHECK(report.rows[2].count == 1);

  TLambdaSpec bad;
  bad.lambda = Rational(1);
  bad.sets = {{1}, {2}, {3}};  // q_1 = 3 > 2
  const auto bad_report = check_t_lambda(bad);
  CHECK_FALSE(bad_report.ok);
  CHECK_FALSE(bad_report.rows[0].within_budget);

  TLambdaSpec empty;
  empty.lambda = Rational(1, 2);
  CHECK(check_t_lambda(empty).ok);
}

TEST_CASE("fractional budget rates compare without rounding") {
  // rate 1/2: allowed count for size m is 2^(m/2); for m = 3 that is
  // 2.82..., so 2 passes and 3 fails — the integer comparison must not round.
  CHECK(t_lambda_budget_holds(Rational(1, 2), 3, 2));
  CHECK_FALSE(t_lambda_budget_holds(Rational(1, 2), 3, 3));
  CHECK(t_lambda_budget_holds(Rational(1, 2), 4, 4));
  CHECK_FALSE(t_lambda_budget_holds(Rational(1, 2), 4, 5));
  // budget is monotone in the rate
  CHECK(t_lambda_budget_holds(Rational(2), 3, 3));
}

TEST_CASE("budgeted set generation is reproducible and valid") {
  const auto spec = generate_t_lambda(Rational(1), 4, 12, 1, 64, 20260810);
  CHECK(spec.sets.size() == 9);
  for (std::size_t i = 0; i < spec.sets.size(); ++i) {
    CHECK(spec.sets[i].size() == 4 + i);
    for (auto j : spec.sets[i]) {
      CHECK(j >= 1);
      CHECK(j <= 64);
    }
  }
  CHECK(check_t_lambda(spec).ok);

  const auto again = generate_t_lambda(Rational(1), 4, 12, 1, 64, 20260810);
  CHECK(again.sets == spec.sets);
  const auto other = generate_t_lambda(Rational(1), 4, 12, 1, 64, 99);
  CHECK(other.sets != spec.sets);

  // infeasible: 3 sets of size 1 would exceed 2^1
  CHECK_THROWS_AS(generate_t_lambda(Rational(1), 1, 4, 3, 64, 1), std::invalid_argument);
  CHECK_THROWS_AS(generate_t_lambda(Rational(1), 5, 4, 1, 64, 1), std::invalid_argument);
  CHECK_THROWS_AS(generate_t_lambda(Rational(1), 4, 12, 1, 10, 1), std::invalid_argument);
}
