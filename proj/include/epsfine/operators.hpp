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
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "epsfine/partition.hpp"
#include "epsfine/submeasure.hpp"

namespace epsfine {

/**
 * An operator on finite-support vectors given by its columns z_j (the images
 * of the basis vectors): T x = Σ_j x(j) z_j. Columns beyond the stored count
 * are zero. The operator norm on the 1-norm is exactly the largest column
 * norm, recorded as norm_bound().
 *
 * Columns are held as a SeqFamily, so structured columns (normalized
 * indicators, initial segments) keep their compact form and per-block column
 * norms stay counting queries.
 */
class ColumnOperator {
 public:
  static ColumnOperator from_columns(std::vector<SparseVec> columns, std::string label) {
    return ColumnOperator(SeqFamily::from_vectors(std::move(columns), label + " columns"),
                          std::move(label));
  }

  /// z_j = e_j for j = 1..count.
  static ColumnOperator identity(std::size_t count) {
    std::vector<std::vector<std::uint64_t>> sets;
    sets.reserve(count);
    for (std::uint64_t j = 1; j <= count; ++j) sets.push_back({j});
    return ColumnOperator(family_from_sets(sets, "identity columns"), "identity");
  }

  /// z_j = e_target for j = 1..count.
  static ColumnOperator rank_one(std::uint64_t target, std::size_t count) {
    const std::string label = "rank_one(" + std::to_string(target) + ")";
    std::vector<std::vector<std::uint64_t>> sets(count, {target});
    return ColumnOperator(family_from_sets(sets, label + " columns"), label);
  }

  /// Columns taken from a family: z_j = z.vec(j).
  static ColumnOperator from_family(const SeqFamily& z) {
    return ColumnOperator(z, "columns(" + z.label() + ")");
  }

  std::size_t column_count() const { return columns_.size(); }
  const std::string& label() const { return label_; }

  /// Exact max of the column norms (not merely the family's declared bound).
  const Rational& norm_bound() const { return norm_; }

  SparseVec column(std::uint64_t j) const {
    if (j == 0) throw std::invalid_argument("ColumnOperator: columns start at 1");
    return j <= columns_.size() ? columns_.vec(j) : SparseVec();
  }

  /// ‖1_A z_j‖₁ without materializing the column.
  Rational column_norm1_on(std::uint64_t j, const SubsetSpec& a) const {
    return j >= 1 && j <= columns_.size() ? columns_.norm1_on(j, a) : Rational(0);
  }

  Rational column_norm_inf_on(std::uint64_t j, const SubsetSpec& a) const {
    return j >= 1 && j <= columns_.size() ? columns_.norm_inf_on(j, a) : Rational(0);
  }

  /// The columns viewed as a sequence family (for fineness certificates on
  /// the columns themselves).
  const SeqFamily& columns_family() const { return columns_; }

 private:
  ColumnOperator(SeqFamily columns, std::string label)
      : columns_(std::move(columns)), label_(std::move(label)) {
    norm_ = 0;
    for (std::size_t j = 1; j <= columns_.size(); ++j)
      norm_ = rat_max(norm_, columns_.norm1(j));
  }

  SeqFamily columns_;
  Rational norm_;
  std::string label_;
};

/// T x = Σ_j x(j) z_j, exact. ‖Tx‖₁ <= norm_bound · ‖x‖₁.
inline SparseVec apply(const ColumnOperator& t, const SparseVec& x) {
  std::vector<SparseVec::Entry> acc;
  for (const auto& [j, xv] : x.entries()) {
    const SparseVec z = t.column(j);
    for (const auto& [k, zv] : z.entries()) acc.emplace_back(k, Rational(xv * zv));
  }
  return SparseVec::from_entries(std::move(acc));
}

/// Coordinatewise lift: (x_n) -> (T x_n), with recorded bound t·r.
inline SeqFamily apply_elementwise(const ColumnOperator& t, const SeqFamily& x) {
  std::vector<SparseVec> vecs;
  vecs.reserve(x.size());
  for (std::size_t n = 1; n <= x.size(); ++n) vecs.push_back(apply(t, x.vec(n)));
  return SeqFamily::from_vectors(std::move(vecs), t.label() + "(" + x.label() + ")",
                                 Rational(t.norm_bound() * x.sup_norm_bound()));
}

/// y_n = |H_n|⁻¹ Σ_{j in H_n} x_j. Every H_n must be a nonempty subset of
/// [1, length(x)].
inline SeqFamily cesaro_average(const SeqFamily& x,
                                const std::vector<std::vector<std::uint64_t>>& windows,
                                std::string label = "") {
  std::vector<SparseVec> vecs;
  vecs.reserve(windows.size());
  for (const auto& h : windows) {
    if (h.empty()) throw std::invalid_argument("cesaro_average: empty index set");
    SparseVec sum;
    for (auto j : h) {
      if (j == 0 || j > x.size())
        throw std::invalid_argument("cesaro_average: index " + std::to_string(j) +
                                    " outside the family");
      sum = add(sum, x.vec(j));
    }
    vecs.push_back(scale(Rational(1, static_cast<std::uint64_t>(h.size())), sum));
  }
  if (label.empty()) label = "cesaro(" + x.label() + ")";
  return SeqFamily::from_vectors(std::move(vecs), std::move(label), x.sup_norm_bound());
}

// ---------------------------------------------------------------------------
// Exact per-n inequality chains for images y_n = T x_n under a projection,
// in both norms:
//   ‖1_A y_n‖₁ <= Σ_j |x_n(j)| ‖1_A z_j‖₁ <= ‖x_n‖₁ · max_j ‖1_A z_j‖₁
//   ‖1_A y_n‖∞ <= Σ_j |x_n(j)| ‖1_A z_j‖∞
// and the split form, for a cut m between "head" and "tail" columns:
//   ‖1_A y_n‖₁ <= ‖x_n‖₁ · max_{j>m} ‖1_A z_j‖₁ + t · ‖1_{[1..m]} x_n‖₁
// ---------------------------------------------------------------------------

struct TriangleChainRow {
  std::size_t n = 0;
  Rational lhs_norm1;       // ‖1_A y_n‖₁
  Rational mid_norm1;       // Σ_j |x_n(j)| ‖1_A z_j‖₁
  Rational rhs_norm1;       // ‖x_n‖₁ · max_j ‖1_A z_j‖₁ (max over supp x_n)
  Rational lhs_norm_inf;    // ‖1_A y_n‖∞
  Rational mid_norm_inf;    // Σ_j |x_n(j)| ‖1_A z_j‖∞
  bool ok = false;
};

struct TriangleChainReport {
  bool ok = false;
  std::string operator_label;
  std::string family_label;
  std::string set_label;
  std::size_t tail_start = 0;
  std::size_t horizon = 0;
  std::vector<TriangleChainRow> rows;
};

inline TriangleChainReport verify_column_triangle(const ColumnOperator& t, const SeqFamily& x,
                                                  const SubsetSpec& a, std::size_t n0,
                                                  std::size_t horizon) {
  x.check_window(n0, horizon);
  TriangleChainReport report;
  report.operator_label = t.label();
  report.family_label = x.label();
  report.set_label = a.describe();
  report.tail_start = n0;
  report.horizon = horizon;
  report.ok = true;

  std::vector<Rational> col1(t.column_count() + 1, Rational(0));
  std::vector<Rational> colinf(t.column_count() + 1, Rational(0));
  for (std::uint64_t j = 1; j <= t.column_count(); ++j) {
    col1[j] = t.column_norm1_on(j, a);
    colinf[j] = t.column_norm_inf_on(j, a);
  }

  for (std::size_t n = n0; n <= horizon; ++n) {
    const SparseVec xn = x.vec(n);
    const SparseVec yn = apply(t, xn);
    TriangleChainRow row;
    row.n = n;
    row.lhs_norm1 = yn.norm1_on(a);
    row.lhs_norm_inf = yn.norm_inf_on(a);
    row.mid_norm1 = 0;
    row.mid_norm_inf = 0;
    Rational col_max = 0;
    for (const auto& [j, xv] : xn.entries()) {
      const Rational axv = rat_abs(xv);
      if (j <= t.column_count()) {
        row.mid_norm1 += axv * col1[j];
        row.mid_norm_inf += axv * colinf[j];
        col_max = rat_max(col_max, col1[j]);
      }
    }
    row.rhs_norm1 = xn.norm1() * col_max;
    row.ok = row.lhs_norm1 <= row.mid_norm1 && row.mid_norm1 <= row.rhs_norm1 &&
             row.lhs_norm_inf <= row.mid_norm_inf;
    report.ok = report.ok && row.ok;
    report.rows.push_back(std::move(row));
  }
  return report;
}

struct SplitChainRow {
  std::size_t n = 0;
  Rational lhs;        // ‖1_A y_n‖₁
  Rational tail_term;  // ‖x_n‖₁ · max_{j>m} ‖1_A z_j‖₁
  Rational head_term;  // t · ‖1_{[1..m]} x_n‖₁
  bool ok = false;
};

struct SplitChainReport {
  bool ok = false;
  std::uint64_t split = 0;  // m
  std::string operator_label;
  std::string family_label;
  std::string set_label;
  std::size_t tail_start = 0;
  std::size_t horizon = 0;
  Rational tail_column_max;  // max_{j>m} ‖1_A z_j‖₁
  std::vector<SplitChainRow> rows;
};

inline SplitChainReport verify_column_split(const ColumnOperator& t, const SeqFamily& x,
                                            const SubsetSpec& a, std::uint64_t split,
                                            std::size_t n0, std::size_t horizon) {
  x.check_window(n0, horizon);
  if (split == 0) throw std::invalid_argument("verify_column_split: split index m >= 1");
  SplitChainReport report;
  report.split = split;
  report.operator_label = t.label();
  report.family_label = x.label();
  report.set_label = a.describe();
  report.tail_start = n0;
  report.horizon = horizon;
  report.ok = true;

  Rational tail_max = 0;
  for (std::uint64_t j = split + 1; j <= t.column_count(); ++j)
    tail_max = rat_max(tail_max, t.column_norm1_on(j, a));
  report.tail_column_max = tail_max;

  for (std::size_t n = n0; n <= horizon; ++n) {
    const SparseVec xn = x.vec(n);
    const SparseVec yn = apply(t, xn);
    SplitChainRow row;
    row.n = n;
    row.lhs = yn.norm1_on(a);
    row.tail_term = xn.norm1() * tail_max;
    row.head_term = t.norm_bound() * xn.norm1_prefix(split);
    row.ok = row.lhs <= row.tail_term + row.head_term;
    report.ok = report.ok && row.ok;
    report.rows.push_back(std::move(row));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Fineness transfer: a partition certified delta-fine for the columns of T
// is certified (r·delta + slack)-fine for the image family T x, where the
// slack t · max_{n>=p} ‖1_{[1..m]} x_n‖₁ is computed from the data. The
// output certificate is revalidated exactly before being returned.
// ---------------------------------------------------------------------------

struct TransferResult {
  FineCertificate certificate;  // for the image family on [tail_start, len(x)]
  SeqFamily image;
  Rational slack;
  Rational column_tail_max;  // max over blocks of max_{j>m} ‖1_A z_j‖₁
  std::uint64_t split = 0;
  Rational input_epsilon;   // the columns certificate's epsilon (delta)
};

inline TransferResult transfer_fineness(const ColumnOperator& t,
                                        const FineCertificate& columns_cert, const SeqFamily& x,
                                        std::uint64_t split, std::size_t tail_start) {
  const SeqFamily& columns = t.columns_family();
  if (auto r = revalidate(columns_cert, columns); !r.ok)
    throw std::invalid_argument("transfer_fineness: columns certificate invalid: " + r.detail);
  if (split + 1 < columns_cert.tail_start)
    throw std::invalid_argument(
        "transfer_fineness: split must not expose columns before the certificate window");
  if (t.column_count() > columns_cert.horizon)
    throw std::invalid_argument(
        "transfer_fineness: certificate window must reach the last stored column");
  x.check_window(tail_start, x.size());

  const SeqFamily image = apply_elementwise(t, x);
  const Rational r = x.sup_norm_bound();

  // Slack: the head columns [1..m] contribute at most t · ‖1_{[1..m]} x_n‖₁.
  Rational head_mass = 0;
  for (std::size_t n = tail_start; n <= x.size(); ++n)
    head_mass = rat_max(head_mass, x.norm1_prefix(n, split));
  const Rational slack = t.norm_bound() * head_mass;

  // Tail columns beyond m are inside the certificate window, so their
  // per-block projections are bounded by the certified block values.
  Rational tail_max = 0;
  for (const auto& bv : columns_cert.values) {
    Rational block_tail = 0;
    for (std::uint64_t j = split + 1; j <= t.column_count(); ++j)
      block_tail = rat_max(block_tail, t.column_norm1_on(j, bv.block));
    tail_max = rat_max(tail_max, block_tail);
  }

  const Rational epsilon = r * tail_max + slack;
  FineResult res = is_fine(columns_cert.partition, image, epsilon, tail_start, image.size());
  if (!res.fine())
    throw std::logic_error("transfer_fineness: transferred certificate failed revalidation");

  TransferResult out{std::move(*res.certificate), std::move(image), slack, tail_max, split,
                     columns_cert.epsilon};
  return out;
}

// ---------------------------------------------------------------------------
// Finite-support truncation: keep the largest-magnitude coordinates of each
// element until the dropped mass falls below the per-element budget. Windowed
// values of the truncated family differ from the original by at most the
// largest budget on the window, for every set.
// ---------------------------------------------------------------------------

struct TruncationRow {
  std::size_t n = 0;
  std::size_t kept = 0;
  Rational dropped_mass;
  Rational budget;
};

struct TruncationResult {
  SeqFamily truncated;
  std::vector<TruncationRow> rows;
};

inline TruncationResult finite_support_approx(const SeqFamily& x,
                                              const std::vector<Rational>& budgets) {
  if (budgets.size() < x.size())
    throw std::invalid_argument("finite_support_approx: budget list shorter than family");
  std::vector<SparseVec> vecs;
  std::vector<TruncationRow> rows;
  vecs.reserve(x.size());
  for (std::size_t n = 1; n <= x.size(); ++n) {
    const Rational& budget = budgets[n - 1];
    if (budget <= 0) throw std::invalid_argument("finite_support_approx: budgets must be positive");
    std::vector<SparseVec::Entry> entries = x.vec(n).entries();
    // Largest magnitude first; ties by coordinate for determinism.
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
      const Rational ma = rat_abs(a.second);
      const Rational mb = rat_abs(b.second);
      if (ma != mb) return ma > mb;
      return a.first < b.first;
    });
    std::vector<Rational> suffix(entries.size() + 1, Rational(0));
    for (std::size_t i = entries.size(); i-- > 0;)
      suffix[i] = suffix[i + 1] + rat_abs(entries[i].second);
    std::size_t keep = 0;
    while (keep < entries.size() && suffix[keep] >= budget) ++keep;
    TruncationRow row;
    row.n = n;
    row.kept = keep;
    row.dropped_mass = suffix[keep];
    row.budget = budget;
    rows.push_back(std::move(row));
    entries.resize(keep);
    vecs.push_back(SparseVec::from_entries(std::move(entries)));
  }
  SeqFamily truncated =
      SeqFamily::from_vectors(std::move(vecs), x.label() + "|fin", x.sup_norm_bound());
  return TruncationResult{std::move(truncated), std::move(rows)};
}

}  // namespace epsfine
