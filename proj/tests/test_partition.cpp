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

#include "epsfine/partition.hpp"

using namespace epsfine;

TEST_CASE("partition validation") {
  // overlap
  CHECK_THROWS_AS(Partition(10, {SubsetSpec::evens(), SubsetSpec::periodic(4, {0})}),
                  std::invalid_argument);
  // gap at 7
  CHECK_THROWS_AS(Partition(10, {SubsetSpec::evens(), SubsetSpec::finite({1, 3, 5, 9})}),
                  std::invalid_argument);
  // empty block
  CHECK_THROWS_AS(Partition(10, {SubsetSpec::full_set(), SubsetSpec::empty_set()}),
                  std::invalid_argument);

  const auto p = Partition(10, {SubsetSpec::evens(), SubsetSpec::odds()});
  CHECK(p.block_count() == 2);
  CHECK(p.residual().is_empty());

  // explicit blocks leave the tail beyond the ground as residual
  const auto q = Partition(4, {SubsetSpec::finite({1, 2}), SubsetSpec::finite({3, 4})});
  CHECK_FALSE(q.residual().is_empty());
  CHECK(q.residual().contains(5));
  CHECK_FALSE(q.residual().contains(4));
}

TEST_CASE("residue partitions and meets") {
  const auto mod2 = Partition::residues(12, 2);
  const auto mod3 = Partition::residues(12, 3);
  const auto both = meet(mod2, mod3);
  CHECK(both.block_count() == 6);
  for (const auto& block : both.blocks()) {
    REQUIRE(block.kind() == SubsetSpec::Kind::EventuallyPeriodic);
    CHECK(block.period() == 6);
    CHECK(block.residues().size() == 1);
  }
  CHECK(both.refines(mod2));
  CHECK(both.refines(mod3));
  CHECK_FALSE(mod2.refines(both));

  // meet with the trivial partition changes nothing
  const auto trivial = Partition::single(12);
  const auto same = meet(mod2, trivial);
  CHECK(same.blocks() == mod2.blocks());

  CHECK_THROWS_AS(meet(mod2, Partition::residues(13, 2)), std::invalid_argument);
}

TEST_CASE("meet of split partitions lists row-major intersections") {
  const auto p = Partition(10, {SubsetSpec::evens(), SubsetSpec::odds()});
  const auto head = SubsetSpec::initial_segment(5);
  const auto q = Partition(10, {head, set_complement(head)});
  const auto m = meet(p, q);
  REQUIRE(m.block_count() == 4);
  CHECK(m.blocks()[0] == SubsetSpec::finite({2, 4}));
  CHECK(m.blocks()[1].contains(6));
  CHECK(m.blocks()[1].contains(8));
  CHECK_FALSE(m.blocks()[1].contains(4));
  CHECK(m.blocks()[2] == SubsetSpec::finite({1, 3, 5}));
  CHECK(m.blocks()[3].contains(7));
  CHECK(m.blocks()[3].contains(9));
}

TEST_CASE("fineness of residue partitions on the upper density family") {
  const auto fam = upper_density_family(600);
  const auto mod4 = Partition::residues(600, 4);

  // every residue class stays within 1/4 + 1/50 from tail 50 onward
  const auto res = is_fine(mod4, fam, Rational(3, 10), 50, 600);
  REQUIRE(res.fine());
  const auto& cert = *res.certificate;
  REQUIRE(cert.values.size() == 5);  // 4 blocks + residual
  for (const auto& bv : cert.values) {
    if (bv.is_residual)
      CHECK(bv.estimate.value == 0);
    else
      CHECK(bv.estimate.value <= Rational(1, 4) + Rational(1, 50));
  }

  // at 1/4 some class must stick out (the class of 1 exceeds 1/4 at odd n)
  const auto fail = is_fine(mod4, fam, Rational(1, 4), 50, 600);
  REQUIRE_FALSE(fail.fine());
  CHECK(fail.failure->estimate.value > Rational(1, 4));
  CHECK_FALSE(fail.failure->is_residual);
}

TEST_CASE("single block partitions certify bounded families at their bound") {
  const auto fam = family_from_sets({{1, 2}, {5}, {2, 9}});
  const auto res = is_fine(Partition::single(9), fam, Rational(1), 1, 3);
  REQUIRE(res.fine());
  CHECK(res.certificate->values.front().estimate.value == 1);
}

TEST_CASE("certificates revalidate bit-for-bit") {
  const auto fam = upper_density_family(200);
  const auto mod3 = Partition::residues(200, 3);
  auto res = is_fine(mod3, fam, Rational(2, 5), 20, 200);
  REQUIRE(res.fine());
  CHECK(revalidate(*res.certificate, fam).ok);

  // tampering with a stored value must be caught
  auto tampered = *res.certificate;
  tampered.values[1].estimate.value += Rational(1, 1000000);
  CHECK_FALSE(revalidate(tampered, fam).ok);

  // the wrong family must be caught
  const auto other = upper_density_family(200, "other-label");
  auto relabeled = *res.certificate;
  CHECK(revalidate(relabeled, other).ok);  // same data, label is not part of the values
}

TEST_CASE("sum certification at the combined tolerance") {
  const auto x = upper_density_family(400);

  // x + x from two certificates at 3/10 gives 2x at 3/5
  const auto mod4 = Partition::residues(400, 4);
  auto cx = is_fine(mod4, x, Rational(3, 10), 50, 400);
  REQUIRE(cx.fine());
  const auto combined = certify_sum(x, *cx.certificate, x, *cx.certificate);
  CHECK(combined.certificate.epsilon == Rational(3, 5));
  CHECK(revalidate(combined.certificate, combined.sum).ok);
  for (std::size_t n = 1; n <= 400; ++n)
    CHECK(combined.sum.norm1(n) == 2);

  // mismatched windows are rejected
  auto cy = is_fine(mod4, x, Rational(3, 10), 60, 400);
  REQUIRE(cy.fine());
  CHECK_THROWS_AS(certify_sum(x, *cx.certificate, x, *cy.certificate),
                  std::invalid_argument);

  // a certificate for a different family is rejected
  const auto y = family_from_sets(std::vector<std::vector<std::uint64_t>>(400, {1}), "atoms");
  CHECK_THROWS_AS(certify_sum(x, *cx.certificate, y, *cx.certificate),
                  std::invalid_argument);
}

TEST_CASE("sum certification with a zero side keeps the base values") {
  const auto x = family_from_sets({{1, 2, 3, 4}, {2, 3}, {1, 4}});
  const auto zero = scale_family(Rational(0), x, "zero");
  const auto p = Partition(4, {SubsetSpec::finite({1, 2}), SubsetSpec::finite({3, 4})});

  auto cx = is_fine(p, x, Rational(3, 4), 1, 3);
  REQUIRE(cx.fine());
  auto cz = is_fine(Partition::single(4), zero, Rational(0), 1, 3);
  REQUIRE(cz.fine());

  const auto combined = certify_sum(x, *cx.certificate, zero, *cz.certificate);
  CHECK(combined.certificate.epsilon == Rational(3, 4));
  REQUIRE(combined.certificate.values.size() == cx.certificate->values.size());
  for (std::size_t i = 0; i < combined.certificate.values.size(); ++i)
    CHECK(combined.certificate.values[i].estimate.value ==
          cx.certificate->values[i].estimate.value);
}

TEST_CASE("meet certificates never exceed the sum of the parents") {
  const auto x = upper_density_family(120);
  const auto y = family_from_sets(
      [] {
        std::vector<std::vector<std::uint64_t>> sets;
        for (std::uint64_t n = 1; n <= 120; ++n) sets.push_back({n, n + 1, n + 2});
        return sets;
      }(),
      "sliding");
  const auto px = Partition::residues(130, 4);
  const auto py = Partition::residues(130, 3);
  auto cx = is_fine(px, x, Rational(3, 10), 30, 120);
  auto cy = is_fine(py, y, Rational(2, 5), 30, 120);
  REQUIRE(cx.fine());
  REQUIRE(cy.fine());
  const auto combined = certify_sum(x, *cx.certificate, y, *cy.certificate);
  CHECK(combined.certificate.epsilon == Rational(3, 10) + Rational(2, 5));
  CHECK(combined.certificate.partition.refines(px));
  CHECK(combined.certificate.partition.refines(py));
  CHECK(revalidate(combined.certificate, combined.sum).ok);
}

TEST_CASE("sup-norm bound reports") {
  const auto fam = upper_density_family(300);
  const auto mod4 = Partition::residues(300, 4);
  auto res = is_fine(mod4, fam, Rational(3, 10), 50, 300);
  REQUIRE(res.fine());

  const auto report = verify_supnorm_bound(fam, *res.certificate);
  CHECK(report.ok);
  CHECK(report.rows.size() == 251);
  for (const auto& row : report.rows) {
    CHECK(row.norm_inf <= row.max_block_norm1);
    CHECK(row.max_block_norm1 <= Rational(3, 10));
  }

  // single-block certificate at the family bound holds trivially
  auto whole = is_fine(Partition::single(300), fam, Rational(1), 10, 300);
  REQUIRE(whole.fine());
  CHECK(verify_supnorm_bound(fam, *whole.certificate).ok);
}
