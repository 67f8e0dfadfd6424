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
#include <variant>
#include <vector>

#include "epsfine/rational.hpp"
#include "epsfine/rng.hpp"
#include "epsfine/sparse_vec.hpp"
#include "epsfine/subset.hpp"

namespace epsfine {

/// The norm-one vector carrying 1/|F| on each coordinate of a finite
/// nonempty set F.
inline SparseVec normalized_indicator(const std::vector<std::uint64_t>& f) {
  if (f.empty()) throw std::invalid_argument("normalized_indicator: empty set");
  const Rational coeff(1, static_cast<std::uint64_t>(f.size()));
  std::vector<SparseVec::Entry> entries;
  entries.reserve(f.size());
  for (auto j : f) entries.emplace_back(j, coeff);
  SparseVec v = SparseVec::from_entries(std::move(entries));
  if (v.support_size() != f.size())
    throw std::invalid_argument("normalized_indicator: duplicate indices");
  return v;
}

/**
 * A finite sequence (x_1, ..., x_N) of finite-support vectors, with a
 * recorded sup-norm bound r >= ‖x_n‖₁ (verified against every element) and
 * the computed ground bound J (all supports lie in [1, J]).
 *
 * Elements are stored either as general sparse vectors or, for the common
 * normalized-indicator constructions, as coeff · 1_S with S an index list or
 * an initial segment [1..hi]. The compact form is what makes windowed norms
 * over long families (upper-density evaluation at N = 10^4) a counting
 * problem instead of a 10^8-entry materialization; `vec(n)` expands any
 * element on demand. Families are immutable and safe to share.
 */
class SeqFamily {
 public:
  static SeqFamily from_vectors(std::vector<SparseVec> vecs, std::string label,
                                std::optional<Rational> declared_bound = std::nullopt) {
    SeqFamily fam(std::move(label));
    fam.elems_.reserve(vecs.size());
    for (auto& v : vecs) fam.push_vector(std::move(v));
    fam.finish_bound(std::move(declared_bound));
    return fam;
  }

  static SeqFamily from_sets(const std::vector<std::vector<std::uint64_t>>& sets,
                             std::string label = "from_sets") {
    SeqFamily fam(std::move(label));
    fam.elems_.reserve(sets.size());
    for (const auto& f : sets) {
      if (f.empty()) throw std::invalid_argument("from_sets: empty member set");
      std::vector<std::uint64_t> sorted = f;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw std::invalid_argument("from_sets: duplicate indices in member set");
      if (sorted.front() == 0) throw std::invalid_argument("from_sets: indices start at 1");
      Uniform u;
      u.coeff = Rational(1, static_cast<std::uint64_t>(sorted.size()));
      u.list = std::move(sorted);
      fam.push_uniform(std::move(u));
    }
    fam.finish_bound(std::nullopt);
    return fam;
  }

  /// x_n = (1/n) · 1_{[1..n]} for n = 1..N.
  static SeqFamily upper_density(std::size_t n_count, std::string label = "upper_density") {
    if (n_count == 0) throw std::invalid_argument("upper_density: need N >= 1");
    SeqFamily fam(std::move(label));
    fam.elems_.reserve(n_count);
    for (std::size_t n = 1; n <= n_count; ++n) {
      Uniform u;
      u.coeff = Rational(1, static_cast<std::uint64_t>(n));
      u.range_hi = n;
      fam.push_uniform(std::move(u));
    }
    fam.finish_bound(std::nullopt);
    return fam;
  }

  /// Scaled indicators a_n · (1/|S_n|) · 1_{S_n}; used by modulate/embed.
  static SeqFamily scaled_indicators(std::vector<Rational> coeffs,
                                     const std::vector<std::vector<std::uint64_t>>& sets,
                                     std::string label) {
    if (coeffs.size() != sets.size())
      throw std::invalid_argument("scaled_indicators: length mismatch");
    SeqFamily fam(std::move(label));
    fam.elems_.reserve(sets.size());
    for (std::size_t i = 0; i < sets.size(); ++i) {
      if (sets[i].empty()) throw std::invalid_argument("scaled_indicators: empty member set");
      std::vector<std::uint64_t> sorted = sets[i];
      std::sort(sorted.begin(), sorted.end());
      sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
      if (sorted.front() == 0) throw std::invalid_argument("scaled_indicators: indices start at 1");
      Uniform u;
      u.coeff = Rational(coeffs[i] / static_cast<std::uint64_t>(sorted.size()));
      u.list = std::move(sorted);
      fam.push_uniform(std::move(u));
    }
    fam.finish_bound(std::nullopt);
    return fam;
  }

  std::size_t size() const { return elems_.size(); }
  const std::string& label() const { return label_; }
  const Rational& sup_norm_bound() const { return bound_; }
  std::uint64_t ground_bound() const { return ground_; }

  /// Materializes element n (1-based).
  SparseVec vec(std::size_t n) const {
    const Elem& e = element(n);
    if (const auto* u = std::get_if<Uniform>(&e)) {
      std::vector<SparseVec::Entry> entries;
      if (u->is_range()) {
        entries.reserve(u->range_hi);
        for (std::uint64_t j = 1; j <= u->range_hi; ++j) entries.emplace_back(j, u->coeff);
      } else {
        entries.reserve(u->list.size());
        for (auto j : u->list) entries.emplace_back(j, u->coeff);
      }
      return SparseVec::from_entries(std::move(entries));
    }
    return std::get<SparseVec>(e);
  }

  Rational norm1(std::size_t n) const {
    const Elem& e = element(n);
    if (const auto* u = std::get_if<Uniform>(&e))
      return Rational(rat_abs(u->coeff) * u->cardinality());
    return std::get<SparseVec>(e).norm1();
  }

  Rational norm_inf(std::size_t n) const {
    const Elem& e = element(n);
    if (const auto* u = std::get_if<Uniform>(&e)) return rat_abs(u->coeff);
    return std::get<SparseVec>(e).norm_inf();
  }

  /// ‖1_A · x_n‖₁ — the windowed-submeasure workhorse.
  Rational norm1_on(std::size_t n, const SubsetSpec& a) const {
    const Elem& e = element(n);
    if (const auto* u = std::get_if<Uniform>(&e))
      return Rational(rat_abs(u->coeff) * u->count_in(a));
    return std::get<SparseVec>(e).norm1_on(a);
  }

  Rational norm_inf_on(std::size_t n, const SubsetSpec& a) const {
    const Elem& e = element(n);
    if (const auto* u = std::get_if<Uniform>(&e))
      return u->count_in(a) > 0 ? rat_abs(u->coeff) : Rational(0);
    return std::get<SparseVec>(e).norm_inf_on(a);
  }

  /// max_{j <= cap} |x_n(j)|.
  Rational max_abs_prefix(std::size_t n, std::uint64_t cap) const {
    const Elem& e = element(n);
    if (const auto* u = std::get_if<Uniform>(&e))
      return u->min_index() <= cap ? rat_abs(u->coeff) : Rational(0);
    return std::get<SparseVec>(e).max_abs_prefix(cap);
  }

  /// Σ_{j <= cap} |x_n(j)|.
  Rational norm1_prefix(std::size_t n, std::uint64_t cap) const {
    const Elem& e = element(n);
    if (const auto* u = std::get_if<Uniform>(&e)) {
      if (u->is_range())
        return Rational(rat_abs(u->coeff) * std::min<std::uint64_t>(cap, u->range_hi));
      std::uint64_t count = 0;
      for (auto j : u->list) {
        if (j > cap) break;
        ++count;
      }
      return Rational(rat_abs(u->coeff) * count);
    }
    return std::get<SparseVec>(e).norm1_prefix(cap);
  }

  Rational abs_value_at(std::size_t n, std::uint64_t j) const {
    const Elem& e = element(n);
    if (const auto* u = std::get_if<Uniform>(&e))
      return u->member(j) ? rat_abs(u->coeff) : Rational(0);
    return rat_abs(std::get<SparseVec>(e).at(j));
  }

  /// Dispatches on element n's storage: on_range(hi, coeff) for an initial
  /// segment, on_list(indices, coeff) for an explicit indicator support,
  /// on_vec(v) for a general vector. Lets callers aggregate per-coordinate
  /// weights without materializing long elements.
  template <class RangeFn, class ListFn, class VecFn>
  void visit_element(std::size_t n, RangeFn on_range, ListFn on_list, VecFn on_vec) const {
    const Elem& e = element(n);
    if (const auto* u = std::get_if<Uniform>(&e)) {
      if (u->is_range())
        on_range(u->range_hi, u->coeff);
      else
        on_list(u->list, u->coeff);
    } else {
      on_vec(std::get<SparseVec>(e));
    }
  }

  /// Sorted union of supports over the window [n0, N].
  std::vector<std::uint64_t> support_union(std::size_t n0, std::size_t horizon) const {
    check_window(n0, horizon);
    std::uint64_t range_hi = 0;
    std::vector<std::uint64_t> out;
    for (std::size_t n = n0; n <= horizon; ++n) {
      const Elem& e = element(n);
      if (const auto* u = std::get_if<Uniform>(&e)) {
        if (u->is_range())
          range_hi = std::max(range_hi, u->range_hi);
        else
          out.insert(out.end(), u->list.begin(), u->list.end());
      } else {
        for (const auto& [idx, val] : std::get<SparseVec>(e).entries()) out.push_back(idx);
      }
    }
    for (std::uint64_t j = 1; j <= range_hi; ++j) out.push_back(j);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  void check_window(std::size_t n0, std::size_t horizon) const {
    if (n0 < 1 || n0 > horizon || horizon > elems_.size())
      throw std::invalid_argument("window [" + std::to_string(n0) + ", " +
                                  std::to_string(horizon) + "] invalid for family of length " +
                                  std::to_string(elems_.size()));
  }

  friend SeqFamily modulate(const std::vector<Rational>& coeffs, const SeqFamily& x);
  friend SeqFamily add_families(const SeqFamily& x, const SeqFamily& y, std::string label);
  friend SeqFamily scale_family(const Rational& c, const SeqFamily& x, std::string label);

 private:
  // coeff · 1_S; S is [1..range_hi] when range_hi > 0, else the sorted list.
  struct Uniform {
    Rational coeff;
    std::uint64_t range_hi = 0;
    std::vector<std::uint64_t> list;

    bool is_range() const { return range_hi > 0; }
    std::uint64_t cardinality() const {
      return is_range() ? range_hi : static_cast<std::uint64_t>(list.size());
    }
    std::uint64_t max_index() const { return is_range() ? range_hi : list.back(); }
    std::uint64_t min_index() const { return is_range() ? 1 : list.front(); }
    bool member(std::uint64_t j) const {
      if (is_range()) return j >= 1 && j <= range_hi;
      return std::binary_search(list.begin(), list.end(), j);
    }
    std::uint64_t count_in(const SubsetSpec& a) const {
      if (is_range()) return a.count_leq(range_hi);
      std::uint64_t count = 0;
      for (auto j : list) count += a.contains(j) ? 1 : 0;
      return count;
    }
  };
  using Elem = std::variant<Uniform, SparseVec>;

  explicit SeqFamily(std::string label) : label_(std::move(label)) {}

  const Elem& element(std::size_t n) const {
    if (n < 1 || n > elems_.size())
      throw std::out_of_range("SeqFamily: element index out of range");
    return elems_[n - 1];
  }

  void push_uniform(Uniform u) {
    ground_ = std::max(ground_, u.max_index());
    max_norm_ = rat_max(max_norm_, Rational(rat_abs(u.coeff) * u.cardinality()));
    elems_.emplace_back(std::move(u));
  }

  void push_vector(SparseVec v) {
    ground_ = std::max(ground_, v.max_index());
    max_norm_ = rat_max(max_norm_, v.norm1());
    elems_.emplace_back(std::move(v));
  }

  void finish_bound(std::optional<Rational> declared) {
    if (declared) {
      if (*declared < max_norm_)
        throw std::invalid_argument("SeqFamily: declared sup-norm bound " +
                                    format_rational(*declared) + " below attained norm " +
                                    format_rational(max_norm_));
      bound_ = std::move(*declared);
    } else {
      bound_ = max_norm_;
    }
  }

  std::vector<Elem> elems_;
  std::string label_;
  Rational bound_;    // r: verified upper bound on ‖x_n‖₁
  Rational max_norm_; // largest attained ‖x_n‖₁
  std::uint64_t ground_ = 0;
};

inline SeqFamily upper_density_family(std::size_t n_count,
                                      std::string label = "upper_density") {
  return SeqFamily::upper_density(n_count, std::move(label));
}

inline SeqFamily family_from_sets(const std::vector<std::vector<std::uint64_t>>& sets,
                                  std::string label = "from_sets") {
  return SeqFamily::from_sets(sets, std::move(label));
}

/// Pointwise scalar modulation (a_n x_n). Needs |a| >= length of x.
inline SeqFamily modulate(const std::vector<Rational>& coeffs, const SeqFamily& x) {
  if (coeffs.size() < x.size())
    throw std::invalid_argument("modulate: coefficient list shorter than family");
  SeqFamily fam("modulate(" + x.label() + ")");
  fam.elems_.reserve(x.size());
  Rational coeff_max = 0;
  for (std::size_t n = 1; n <= x.size(); ++n) {
    coeff_max = rat_max(coeff_max, rat_abs(coeffs[n - 1]));
    const auto& e = x.elems_[n - 1];
    if (const auto* u = std::get_if<SeqFamily::Uniform>(&e)) {
      SeqFamily::Uniform scaled = *u;
      scaled.coeff = Rational(scaled.coeff * coeffs[n - 1]);
      if (scaled.coeff == 0) {
        fam.push_vector(SparseVec());
      } else {
        fam.push_uniform(std::move(scaled));
      }
    } else {
      fam.push_vector(scale(coeffs[n - 1], std::get<SparseVec>(e)));
    }
  }
  fam.finish_bound(Rational(coeff_max * x.sup_norm_bound()));
  return fam;
}

inline SeqFamily scale_family(const Rational& c, const SeqFamily& x, std::string label = "") {
  std::vector<Rational> coeffs(x.size(), c);
  SeqFamily out = modulate(coeffs, x);
  out.label_ = label.empty() ? format_rational(c) + "*" + x.label() : std::move(label);
  return out;
}

/// (a_n x_{H_n}): scalars composed with normalized indicators. On any window
/// the sup of ‖a_n x_{H_n}‖₁ equals max |a_n| exactly.
inline SeqFamily embed_linf(const std::vector<Rational>& coeffs,
                            const std::vector<std::vector<std::uint64_t>>& sets,
                            std::string label = "embed_linf") {
  if (coeffs.size() != sets.size())
    throw std::invalid_argument("embed_linf: coefficient/set lists differ in length");
  return SeqFamily::scaled_indicators(coeffs, sets, std::move(label));
}

/// Pointwise sum (x_n + y_n); lengths must agree.
inline SeqFamily add_families(const SeqFamily& x, const SeqFamily& y, std::string label = "") {
  if (x.size() != y.size())
    throw std::invalid_argument("add_families: length mismatch");
  std::vector<SparseVec> vecs;
  vecs.reserve(x.size());
  for (std::size_t n = 1; n <= x.size(); ++n) vecs.push_back(add(x.vec(n), y.vec(n)));
  if (label.empty()) label = x.label() + "+" + y.label();
  return SeqFamily::from_vectors(std::move(vecs), std::move(label),
                                 Rational(x.sup_norm_bound() + y.sup_norm_bound()));
}

/// Random family whose n-th element is supported inside [n+1, n+width], so
/// the mass moves right with n: every fixed coordinate is eventually zero,
/// which is the windowed pointwise-to-zero evidence. Entries are random
/// rationals with denominators up to max_denominator, rescaled so that
/// ‖x_n‖₁ <= 1. Deterministic in the seed.
inline SeqFamily shifted_random_family(std::uint64_t seed, std::size_t length,
                                       std::uint64_t width, std::uint64_t max_denominator,
                                       std::string label = "shifted_random") {
  if (width == 0 || max_denominator == 0)
    throw std::invalid_argument("shifted_random_family: width and denominator must be >= 1");
  Rng rng(seed);
  std::vector<SparseVec> vecs;
  vecs.reserve(length);
  for (std::size_t n = 1; n <= length; ++n) {
    const std::uint64_t terms = rng.range(1, width);
    std::vector<SparseVec::Entry> entries;
    for (auto offset : rng.subset(width, terms)) {
      const std::uint64_t den = rng.range(1, max_denominator);
      const std::uint64_t num = rng.range(1, den);
      const bool negative = rng.below(2) == 1;
      Rational value(num, den);
      if (negative) value = -value;
      entries.emplace_back(n + offset, value);
    }
    SparseVec v = SparseVec::from_entries(std::move(entries));
    const Rational n1 = v.norm1();
    if (n1 > 1) v = scale(Rational(1) / n1, v);
    vecs.push_back(std::move(v));
  }
  return SeqFamily::from_vectors(std::move(vecs), std::move(label), Rational(1));
}

// ---------------------------------------------------------------------------
// Size-budgeted set sequences: at most 2^(rate·m) member sets of each
// cardinality m. The budget check is exact: with rate = p/q it compares
// q_m^q <= 2^(p·m) in big-integer arithmetic.
// ---------------------------------------------------------------------------

struct TLambdaSpec {
  Rational lambda;  // positive rate
  std::vector<std::vector<std::uint64_t>> sets;
};

struct TLambdaRow {
  std::uint64_t cardinality = 0;  // m
  std::uint64_t count = 0;        // q_m
  bool within_budget = false;
};

struct TLambdaReport {
  bool ok = false;
  std::vector<TLambdaRow> rows;  // one per occurring cardinality, ascending
};

inline bool t_lambda_budget_holds(const Rational& lambda, std::uint64_t cardinality,
                                  std::uint64_t count) {
  if (lambda <= 0) throw std::invalid_argument("t_lambda: rate must be positive");
  const BigInt p = numerator(lambda);
  const BigInt q = denominator(lambda);
  if (q > 64 || p * cardinality > 1u << 20)
    throw std::invalid_argument("t_lambda: rate out of desk-scale range");
  const unsigned exp_q = q.convert_to<unsigned>();
  const unsigned exp_pm = (p * cardinality).convert_to<unsigned>();
  // q_m <= 2^(pm/q)  <=>  q_m^q <= 2^(pm)
  return pow(BigInt(count), exp_q) <= (BigInt(1) << exp_pm);
}

inline TLambdaReport check_t_lambda(const TLambdaSpec& spec) {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> counts;  // (m, q_m)
  for (const auto& f : spec.sets) {
    if (f.empty()) throw std::invalid_argument("t_lambda: member sets must be nonempty");
    const std::uint64_t m = f.size();
    auto it = std::lower_bound(counts.begin(), counts.end(), m,
                               [](const auto& c, std::uint64_t k) { return c.first < k; });
    if (it != counts.end() && it->first == m)
      ++it->second;
    else
      counts.insert(it, {m, 1});
  }
  TLambdaReport report;
  report.ok = true;
  for (const auto& [m, q_m] : counts) {
    TLambdaRow row;
    row.cardinality = m;
    row.count = q_m;
    row.within_budget = t_lambda_budget_holds(spec.lambda, m, q_m);
    report.ok = report.ok && row.within_budget;
    report.rows.push_back(row);
  }
  return report;
}

/// Draws `count_per_size` uniform random m-subsets of [1..ground_size] for
/// each m in [size_min, size_max]. Deterministic in the seed; rejects
/// requests that would break the budget.
inline TLambdaSpec generate_t_lambda(const Rational& lambda, std::uint64_t size_min,
                                     std::uint64_t size_max, std::uint64_t count_per_size,
                                     std::uint64_t ground_size, std::uint64_t seed) {
  if (size_min == 0 || size_min > size_max)
    throw std::invalid_argument("generate_t_lambda: bad size range");
  if (size_max > ground_size)
    throw std::invalid_argument("generate_t_lambda: sets larger than the ground set");
  if (count_per_size == 0)
    throw std::invalid_argument("generate_t_lambda: need at least one set per size");
  for (std::uint64_t m = size_min; m <= size_max; ++m)
    if (!t_lambda_budget_holds(lambda, m, count_per_size))
      throw std::invalid_argument("generate_t_lambda: " + std::to_string(count_per_size) +
                                  " sets of size " + std::to_string(m) +
                                  " exceed the budget");
  TLambdaSpec spec;
  spec.lambda = lambda;
  Rng rng(seed);
  for (std::uint64_t m = size_min; m <= size_max; ++m)
    for (std::uint64_t c = 0; c < count_per_size; ++c) spec.sets.push_back(rng.subset(ground_size, m));
  return spec;
}

}  // namespace epsfine
