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
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "epsfine/rational.hpp"
#include "epsfine/submeasure.hpp"
#include "epsfine/subset.hpp"

namespace epsfine {

/**
 * A finite partition with ground window [1, J]: the listed blocks are
 * pairwise disjoint subsets of {1,2,...} whose union covers [1, J]. The part
 * of the complement outside the listed blocks (empty when the blocks cover
 * all of the naturals, the tail beyond J otherwise) is tracked as the
 * residual block, so that certificates account for every natural number.
 *
 * Validation is exact: pairwise disjointness is decided by set algebra, the
 * cover by a scan of [1, J].
 */
class Partition {
 public:
  Partition(std::uint64_t ground, std::vector<SubsetSpec> blocks)
      : ground_(ground), blocks_(std::move(blocks)) {
    if (ground_ == 0) throw std::invalid_argument("Partition: ground window must be >= 1");
    if (blocks_.empty()) throw std::invalid_argument("Partition: no blocks");
    for (const auto& b : blocks_)
      if (b.is_empty()) throw std::invalid_argument("Partition: empty block");
    for (std::size_t i = 0; i < blocks_.size(); ++i)
      for (std::size_t j = i + 1; j < blocks_.size(); ++j)
        if (!set_disjoint(blocks_[i], blocks_[j]))
          throw std::invalid_argument("Partition: blocks " + std::to_string(i) + " and " +
                                      std::to_string(j) + " overlap");
    for (std::uint64_t n = 1; n <= ground_; ++n) {
      bool covered = false;
      for (const auto& b : blocks_)
        if (b.contains(n)) {
          covered = true;
          break;
        }
      if (!covered)
        throw std::invalid_argument("Partition: ground element " + std::to_string(n) +
                                    " not covered");
    }
    SubsetSpec covered = blocks_.front();
    for (std::size_t i = 1; i < blocks_.size(); ++i) covered = set_union(covered, blocks_[i]);
    residual_ = set_complement(covered);
  }

  /// The one-block partition {N}.
  static Partition single(std::uint64_t ground) {
    return Partition(ground, {SubsetSpec::full_set()});
  }

  /// The k residue classes mod k.
  static Partition residues(std::uint64_t ground, std::uint64_t k) {
    if (k == 0) throw std::invalid_argument("Partition::residues: k >= 1 required");
    std::vector<SubsetSpec> blocks;
    blocks.reserve(k);
    for (std::uint64_t r = 0; r < k; ++r) blocks.push_back(SubsetSpec::periodic(k, {r}));
    return Partition(ground, std::move(blocks));
  }

  /**
   * Partition induced by a block assignment of selected ground elements.
   * color[i] in [0, k) places elems[i]; ground elements outside `elems`
   * carry no mass in the intended family and are attached to the first
   * nonempty block so the cover invariant holds.
   */
  static Partition from_coloring(std::uint64_t ground, const std::vector<std::uint64_t>& elems,
                                 const std::vector<std::size_t>& color, std::size_t k) {
    if (elems.size() != color.size())
      throw std::invalid_argument("Partition::from_coloring: size mismatch");
    std::vector<std::vector<std::uint64_t>> groups(k);
    for (std::size_t i = 0; i < elems.size(); ++i) {
      if (color[i] >= k) throw std::invalid_argument("Partition::from_coloring: color out of range");
      groups[color[i]].push_back(elems[i]);
    }
    std::vector<std::uint64_t> leftover;
    {
      std::vector<bool> used(ground + 1, false);
      for (auto e : elems) {
        if (e == 0 || e > ground)
          throw std::invalid_argument("Partition::from_coloring: element outside ground");
        used[e] = true;
      }
      for (std::uint64_t n = 1; n <= ground; ++n)
        if (!used[n]) leftover.push_back(n);
    }
    std::vector<SubsetSpec> blocks;
    bool leftover_placed = leftover.empty();
    for (auto& g : groups) {
      if (g.empty()) continue;
      if (!leftover_placed) {
        g.insert(g.end(), leftover.begin(), leftover.end());
        leftover_placed = true;
      }
      blocks.push_back(SubsetSpec::finite(std::move(g)));
    }
    if (blocks.empty()) {
      if (leftover.empty()) throw std::invalid_argument("Partition::from_coloring: nothing to place");
      blocks.push_back(SubsetSpec::finite(std::move(leftover)));
    }
    return Partition(ground, std::move(blocks));
  }

  std::uint64_t ground() const { return ground_; }
  const std::vector<SubsetSpec>& blocks() const { return blocks_; }
  std::size_t block_count() const { return blocks_.size(); }
  const SubsetSpec& residual() const { return residual_; }

  /// Every block of *this lies inside a single block of `coarser`.
  bool refines(const Partition& coarser) const {
    for (const auto& fine_block : blocks_) {
      bool placed = false;
      for (const auto& big : coarser.blocks_)
        if (set_subset_of(fine_block, big)) {
          placed = true;
          break;
        }
      if (!placed && !set_subset_of(fine_block, coarser.residual_)) return false;
    }
    return true;
  }

  bool operator==(const Partition&) const = default;

 private:
  std::uint64_t ground_;
  std::vector<SubsetSpec> blocks_;
  SubsetSpec residual_;
};

/// Common refinement: the nonempty pairwise intersections, row-major in the
/// operand block order.
inline Partition meet(const Partition& p, const Partition& q) {
  if (p.ground() != q.ground())
    throw std::invalid_argument("meet: ground windows differ");
  std::vector<SubsetSpec> blocks;
  for (const auto& a : p.blocks())
    for (const auto& b : q.blocks()) {
      SubsetSpec c = set_meet(a, b);
      if (!c.is_empty()) blocks.push_back(std::move(c));
    }
  return Partition(p.ground(), std::move(blocks));
}

// ---------------------------------------------------------------------------
// Fineness certificates: exact per-block windowed values, recomputable
// bit-for-bit from the family. The residual block is recorded alongside the
// listed blocks.
// ---------------------------------------------------------------------------

struct BlockValue {
  SubsetSpec block;
  SubmeasureEstimate estimate;
  bool is_residual = false;

  bool operator==(const BlockValue&) const = default;
};

struct FineCertificate {
  Partition partition;
  Rational epsilon;
  std::size_t tail_start = 0;
  std::size_t horizon = 0;
  std::string family_label;
  std::vector<BlockValue> values;  // listed blocks in order, then residual

  /// Largest per-block value (the certificate's tightest achievable epsilon).
  const Rational& max_value() const {
    const Rational* best = &values.front().estimate.value;
    for (const auto& bv : values)
      if (bv.estimate.value > *best) best = &bv.estimate.value;
    return *best;
  }
};

struct FineFailure {
  std::size_t block_index = 0;  // index into the evaluated list (residual last)
  bool is_residual = false;
  SubmeasureEstimate estimate;  // the maximal violating block
  Rational epsilon;
};

struct FineResult {
  std::optional<FineCertificate> certificate;
  std::optional<FineFailure> failure;

  bool fine() const { return certificate.has_value(); }
};

/// Evaluates every block (and the residual) of P on the window and compares
/// against epsilon. Returns a certificate, or the maximal violating block.
inline FineResult is_fine(const Partition& p, const SeqFamily& x, const Rational& epsilon,
                          std::size_t n0, std::size_t horizon) {
  x.check_window(n0, horizon);
  std::vector<BlockValue> values;
  values.reserve(p.block_count() + 1);
  for (const auto& b : p.blocks())
    values.push_back({b, eval_windowed(x, b, n0, horizon), false});
  if (!p.residual().is_empty())
    values.push_back({p.residual(), eval_windowed(x, p.residual(), n0, horizon), true});
  else
    values.push_back({p.residual(),
                      {Rational(0), n0, horizon, EstimateMode::Windowed, x.label(), "{}", n0},
                      true});

  std::size_t worst = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i].estimate.value > values[worst].estimate.value) worst = i;

  FineResult result;
  if (values[worst].estimate.value <= epsilon) {
    result.certificate = FineCertificate{p, epsilon, n0, horizon, x.label(), std::move(values)};
  } else {
    result.failure = FineFailure{worst, values[worst].is_residual, values[worst].estimate, epsilon};
  }
  return result;
}

struct RevalidationResult {
  bool ok = false;
  std::string detail;
};

/// Recomputes the certificate from scratch; per-block estimates must
/// reproduce bit-for-bit.
inline RevalidationResult revalidate(const FineCertificate& cert, const SeqFamily& x) {
  FineResult fresh = is_fine(cert.partition, x, cert.epsilon, cert.tail_start, cert.horizon);
  if (!fresh.fine()) {
    return {false, "block " + std::to_string(fresh.failure->block_index) + " now exceeds epsilon (" +
                       format_rational(fresh.failure->estimate.value) + " > " +
                       format_rational(cert.epsilon) + ")"};
  }
  if (fresh.certificate->values.size() != cert.values.size())
    return {false, "block count changed"};
  for (std::size_t i = 0; i < cert.values.size(); ++i) {
    const auto& a = cert.values[i];
    const auto& b = fresh.certificate->values[i];
    if (!(a.block == b.block) || a.estimate.value != b.estimate.value ||
        a.estimate.attained_at != b.estimate.attained_at || a.is_residual != b.is_residual)
      return {false, "block " + std::to_string(i) + " does not reproduce"};
  }
  return {true, ""};
}

struct SumCertification {
  SeqFamily sum;
  FineCertificate certificate;
};

/**
 * Combines certificates for x and y into one for x + y on the common
 * refinement, at the summed tolerance: each meet block A∩B obeys
 * value_{x+y}(A∩B) <= value_x(A) + value_y(B). The returned certificate is
 * revalidated exactly before being handed out.
 */
inline SumCertification certify_sum(const SeqFamily& x, const FineCertificate& cert_x,
                                    const SeqFamily& y, const FineCertificate& cert_y) {
  if (auto r = revalidate(cert_x, x); !r.ok)
    throw std::invalid_argument("certify_sum: first certificate invalid: " + r.detail);
  if (auto r = revalidate(cert_y, y); !r.ok)
    throw std::invalid_argument("certify_sum: second certificate invalid: " + r.detail);
  if (cert_x.tail_start != cert_y.tail_start || cert_x.horizon != cert_y.horizon)
    throw std::invalid_argument("certify_sum: certificate windows differ");
  const Rational epsilon = cert_x.epsilon + cert_y.epsilon;
  SeqFamily sum = add_families(x, y);
  Partition refined = meet(cert_x.partition, cert_y.partition);
  FineResult res = is_fine(refined, sum, epsilon, cert_x.tail_start, cert_x.horizon);
  if (!res.fine())
    throw std::logic_error("certify_sum: combined certificate failed validation at block " +
                           std::to_string(res.failure->block_index));
  return SumCertification{std::move(sum), std::move(*res.certificate)};
}

// ---------------------------------------------------------------------------
// Sup-norm bound check: on the certificate's window,
//   ‖x_n‖∞ <= max over blocks of ‖1_{A_i} x_n‖₁ <= epsilon,
// exactly, for every n. A violation falsifies the certificate.
// ---------------------------------------------------------------------------

struct SupnormBoundRow {
  std::size_t n = 0;
  Rational norm_inf;
  Rational max_block_norm1;
  bool ok = false;
};

struct SupnormBoundReport {
  bool ok = false;
  Rational epsilon;
  std::size_t tail_start = 0;
  std::size_t horizon = 0;
  std::string family_label;
  std::vector<SupnormBoundRow> rows;
};

inline SupnormBoundReport verify_supnorm_bound(const SeqFamily& x, const FineCertificate& cert) {
  x.check_window(cert.tail_start, cert.horizon);
  SupnormBoundReport report;
  report.epsilon = cert.epsilon;
  report.tail_start = cert.tail_start;
  report.horizon = cert.horizon;
  report.family_label = x.label();
  report.ok = true;
  for (std::size_t n = cert.tail_start; n <= cert.horizon; ++n) {
    SupnormBoundRow row;
    row.n = n;
    row.norm_inf = x.norm_inf(n);
    row.max_block_norm1 = 0;
    for (const auto& bv : cert.values)
      row.max_block_norm1 = rat_max(row.max_block_norm1, x.norm1_on(n, bv.block));
    row.ok = row.norm_inf <= row.max_block_norm1 && row.max_block_norm1 <= cert.epsilon;
    report.ok = report.ok && row.ok;
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace epsfine
