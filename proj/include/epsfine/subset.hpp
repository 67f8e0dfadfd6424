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

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace epsfine {

/**
 * A subset of {1, 2, 3, ...} in one of two exact representations:
 *
 *  - ExplicitFinite: a sorted list of members.
 *  - EventuallyPeriodic: membership of n >= threshold is decided by
 *    n mod period against a residue list; members below the threshold are
 *    listed explicitly as exceptions.
 *
 * The class is closed under complement, intersection and union (periodic
 * combines with periodic at the lcm of the periods), which is what makes
 * partition blocks, their meets and their residual complements exactly
 * representable. Instances are immutable and kept in a canonical form:
 * minimal threshold, minimal period, and "no residues" collapsed to the
 * explicit-finite representation. Structural equality therefore coincides
 * with set equality.
 */
class SubsetSpec {
 public:
  enum class Kind { ExplicitFinite, EventuallyPeriodic };

  // Guard for lcm blowup when combining periodic sets.
  static constexpr std::uint64_t kMaxPeriod = 1u << 20;

  SubsetSpec() : kind_(Kind::ExplicitFinite) {}

  static SubsetSpec finite(std::vector<std::uint64_t> elements) {
    SubsetSpec s;
    s.kind_ = Kind::ExplicitFinite;
    std::sort(elements.begin(), elements.end());
    elements.erase(std::unique(elements.begin(), elements.end()), elements.end());
    if (!elements.empty() && elements.front() == 0)
      throw std::invalid_argument("SubsetSpec: indices start at 1");
    s.elems_ = std::move(elements);
    return s;
  }

  /// {1, ..., m}; m = 0 gives the empty set.
  static SubsetSpec initial_segment(std::uint64_t m) {
    std::vector<std::uint64_t> v(m);
    std::iota(v.begin(), v.end(), std::uint64_t{1});
    return finite(std::move(v));
  }

  static SubsetSpec periodic(std::uint64_t period, std::vector<std::uint64_t> residues) {
    return eventually_periodic(period, std::move(residues), 1, {});
  }

  static SubsetSpec eventually_periodic(std::uint64_t period,
                                        std::vector<std::uint64_t> residues,
                                        std::uint64_t threshold,
                                        std::vector<std::uint64_t> exceptions) {
    if (period == 0) throw std::invalid_argument("SubsetSpec: period must be >= 1");
    if (period > kMaxPeriod) throw std::invalid_argument("SubsetSpec: period exceeds desk-scale limit");
    if (threshold == 0) threshold = 1;
    std::sort(residues.begin(), residues.end());
    residues.erase(std::unique(residues.begin(), residues.end()), residues.end());
    for (auto r : residues)
      if (r >= period) throw std::invalid_argument("SubsetSpec: residue out of range");
    std::sort(exceptions.begin(), exceptions.end());
    exceptions.erase(std::unique(exceptions.begin(), exceptions.end()), exceptions.end());
    for (auto e : exceptions)
      if (e == 0 || e >= threshold)
        throw std::invalid_argument("SubsetSpec: exception outside [1, threshold)");
    SubsetSpec s;
    s.kind_ = Kind::EventuallyPeriodic;
    s.period_ = period;
    s.residues_ = std::move(residues);
    s.threshold_ = threshold;
    s.elems_ = std::move(exceptions);
    s.normalize();
    return s;
  }

  static SubsetSpec empty_set() { return finite({}); }
  static SubsetSpec full_set() { return periodic(1, {0}); }
  static SubsetSpec evens() { return periodic(2, {0}); }
  static SubsetSpec odds() { return periodic(2, {1}); }

  Kind kind() const { return kind_; }
  bool is_finite() const { return kind_ == Kind::ExplicitFinite; }
  bool is_empty() const { return kind_ == Kind::ExplicitFinite && elems_.empty(); }

  bool contains(std::uint64_t n) const {
    if (n == 0) return false;
    if (kind_ == Kind::ExplicitFinite || n < threshold_)
      return std::binary_search(elems_.begin(), elems_.end(), n);
    return std::binary_search(residues_.begin(), residues_.end(), n % period_);
  }

  /// |A ∩ [1, n]| in O(|residues| + log).
  std::uint64_t count_leq(std::uint64_t n) const {
    if (n == 0) return 0;
    if (kind_ == Kind::ExplicitFinite)
      return static_cast<std::uint64_t>(
          std::upper_bound(elems_.begin(), elems_.end(), n) - elems_.begin());
    const std::uint64_t below = std::min<std::uint64_t>(n, threshold_ - 1);
    std::uint64_t count = static_cast<std::uint64_t>(
        std::upper_bound(elems_.begin(), elems_.end(), below) - elems_.begin());
    if (n >= threshold_) {
      for (auto r : residues_)
        count += members_leq(n, r) - members_leq(threshold_ - 1, r);
    }
    return count;
  }

  std::uint64_t count_range(std::uint64_t lo, std::uint64_t hi) const {
    if (lo > hi) return 0;
    return count_leq(hi) - (lo > 1 ? count_leq(lo - 1) : 0);
  }

  // Explicit-finite view.
  const std::vector<std::uint64_t>& elements() const {
    if (kind_ != Kind::ExplicitFinite)
      throw std::logic_error("SubsetSpec: not an explicit finite set");
    return elems_;
  }

  // Eventually-periodic view.
  std::uint64_t period() const { return require_periodic(), period_; }
  const std::vector<std::uint64_t>& residues() const { return require_periodic(), residues_; }
  std::uint64_t threshold() const { return require_periodic(), threshold_; }
  const std::vector<std::uint64_t>& exceptions() const { return require_periodic(), elems_; }

  std::vector<std::uint64_t> elements_up_to(std::uint64_t hi) const {
    std::vector<std::uint64_t> out;
    if (kind_ == Kind::ExplicitFinite) {
      for (auto e : elems_)
        if (e <= hi) out.push_back(e);
      return out;
    }
    out.reserve(count_leq(hi));
    for (std::uint64_t n = 1; n <= hi; ++n)
      if (contains(n)) out.push_back(n);
    return out;
  }

  std::string describe() const {
    if (kind_ == Kind::ExplicitFinite) {
      if (elems_.empty()) return "{}";
      std::string out = "{";
      const std::size_t show = std::min<std::size_t>(elems_.size(), 12);
      for (std::size_t i = 0; i < show; ++i) {
        if (i) out += ",";
        out += std::to_string(elems_[i]);
      }
      if (elems_.size() > show)
        out += ",..+" + std::to_string(elems_.size() - show);
      return out + "}";
    }
    std::string out = "mod " + std::to_string(period_) + " {";
    for (std::size_t i = 0; i < residues_.size(); ++i) {
      if (i) out += ",";
      out += std::to_string(residues_[i]);
    }
    out += "}";
    if (threshold_ > 1) {
      out += " below " + std::to_string(threshold_) + " {";
      for (std::size_t i = 0; i < elems_.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(elems_[i]);
      }
      out += "}";
    }
    return out;
  }

  bool operator==(const SubsetSpec& other) const = default;

  friend SubsetSpec set_complement(const SubsetSpec& a) {
    if (a.kind_ == Kind::ExplicitFinite) {
      if (a.elems_.empty()) return full_set();
      const std::uint64_t hi = a.elems_.back();
      std::vector<std::uint64_t> exc;
      for (std::uint64_t n = 1; n <= hi; ++n)
        if (!a.contains(n)) exc.push_back(n);
      return eventually_periodic(1, {0}, hi + 1, std::move(exc));
    }
    std::vector<std::uint64_t> residues;
    for (std::uint64_t r = 0; r < a.period_; ++r)
      if (!std::binary_search(a.residues_.begin(), a.residues_.end(), r)) residues.push_back(r);
    std::vector<std::uint64_t> exc;
    for (std::uint64_t n = 1; n < a.threshold_; ++n)
      if (!a.contains(n)) exc.push_back(n);
    return eventually_periodic(a.period_, std::move(residues), a.threshold_, std::move(exc));
  }

  friend SubsetSpec set_meet(const SubsetSpec& a, const SubsetSpec& b) {
    if (a.kind_ == Kind::ExplicitFinite || b.kind_ == Kind::ExplicitFinite) {
      const SubsetSpec& fin = a.kind_ == Kind::ExplicitFinite ? a : b;
      const SubsetSpec& other = a.kind_ == Kind::ExplicitFinite ? b : a;
      std::vector<std::uint64_t> kept;
      for (auto e : fin.elems_)
        if (other.contains(e)) kept.push_back(e);
      return finite(std::move(kept));
    }
    const std::uint64_t p = combined_period(a.period_, b.period_);
    const std::uint64_t t = std::max(a.threshold_, b.threshold_);
    std::vector<std::uint64_t> residues;
    for (std::uint64_t r = 0; r < p; ++r)
      if (std::binary_search(a.residues_.begin(), a.residues_.end(), r % a.period_) &&
          std::binary_search(b.residues_.begin(), b.residues_.end(), r % b.period_))
        residues.push_back(r);
    std::vector<std::uint64_t> exc;
    for (std::uint64_t n = 1; n < t; ++n)
      if (a.contains(n) && b.contains(n)) exc.push_back(n);
    return eventually_periodic(p, std::move(residues), t, std::move(exc));
  }

  friend SubsetSpec set_union(const SubsetSpec& a, const SubsetSpec& b) {
    if (a.kind_ == Kind::ExplicitFinite && b.kind_ == Kind::ExplicitFinite) {
      std::vector<std::uint64_t> merged = a.elems_;
      merged.insert(merged.end(), b.elems_.begin(), b.elems_.end());
      return finite(std::move(merged));
    }
    if (a.kind_ == Kind::ExplicitFinite || b.kind_ == Kind::ExplicitFinite) {
      const SubsetSpec& fin = a.kind_ == Kind::ExplicitFinite ? a : b;
      const SubsetSpec& per = a.kind_ == Kind::ExplicitFinite ? b : a;
      const std::uint64_t t =
          std::max(per.threshold_, fin.elems_.empty() ? 1 : fin.elems_.back() + 1);
      std::vector<std::uint64_t> exc;
      for (std::uint64_t n = 1; n < t; ++n)
        if (fin.contains(n) || per.contains(n)) exc.push_back(n);
      return eventually_periodic(per.period_, per.residues_, t, std::move(exc));
    }
    const std::uint64_t p = combined_period(a.period_, b.period_);
    const std::uint64_t t = std::max(a.threshold_, b.threshold_);
    std::vector<std::uint64_t> residues;
    for (std::uint64_t r = 0; r < p; ++r)
      if (std::binary_search(a.residues_.begin(), a.residues_.end(), r % a.period_) ||
          std::binary_search(b.residues_.begin(), b.residues_.end(), r % b.period_))
        residues.push_back(r);
    std::vector<std::uint64_t> exc;
    for (std::uint64_t n = 1; n < t; ++n)
      if (a.contains(n) || b.contains(n)) exc.push_back(n);
    return eventually_periodic(p, std::move(residues), t, std::move(exc));
  }

  friend bool set_disjoint(const SubsetSpec& a, const SubsetSpec& b) {
    return set_meet(a, b).is_empty();
  }

  /// a ⊆ b, exactly.
  friend bool set_subset_of(const SubsetSpec& a, const SubsetSpec& b) {
    return set_meet(a, set_complement(b)).is_empty();
  }

 private:
  void require_periodic() const {
    if (kind_ != Kind::EventuallyPeriodic)
      throw std::logic_error("SubsetSpec: not eventually periodic");
  }

  // Count of m in [1, x] with m ≡ r (mod period_).
  std::uint64_t members_leq(std::uint64_t x, std::uint64_t r) const {
    if (x == 0) return 0;
    if (r == 0) return x / period_;
    return x >= r ? (x - r) / period_ + 1 : 0;
  }

  static std::uint64_t combined_period(std::uint64_t p1, std::uint64_t p2) {
    const std::uint64_t g = std::gcd(p1, p2);
    const std::uint64_t q = p1 / g;
    if (q > kMaxPeriod / p2)
      throw std::invalid_argument("SubsetSpec: combined period exceeds desk-scale limit");
    return q * p2;
  }

  void normalize() {
    // Fold exceptions that agree with the residue rule into a lower threshold.
    while (threshold_ > 1) {
      const std::uint64_t n = threshold_ - 1;
      const bool rule = std::binary_search(residues_.begin(), residues_.end(), n % period_);
      const bool listed = !elems_.empty() && elems_.back() == n;
      if (rule != listed) break;
      if (listed) elems_.pop_back();
      threshold_ = n;
    }
    // Smallest period that reproduces the residue pattern.
    for (std::uint64_t d = 1; d < period_; ++d) {
      if (period_ % d != 0) continue;
      bool consistent = true;
      for (std::uint64_t r = 0; consistent && r < period_; ++r) {
        const bool in_full = std::binary_search(residues_.begin(), residues_.end(), r);
        const bool in_head = std::binary_search(residues_.begin(), residues_.end(), r % d);
        consistent = in_full == in_head;
      }
      if (consistent) {
        std::vector<std::uint64_t> head;
        for (auto r : residues_)
          if (r < d) head.push_back(r);
        period_ = d;
        residues_ = std::move(head);
        break;
      }
    }
    // No residue classes left: the set is the finite exception list.
    if (residues_.empty()) {
      kind_ = Kind::ExplicitFinite;
      period_ = 0;
      threshold_ = 1;
    }
  }

  Kind kind_;
  // ExplicitFinite: the members. EventuallyPeriodic: the exceptions (< threshold).
  std::vector<std::uint64_t> elems_;
  std::uint64_t period_ = 0;
  std::vector<std::uint64_t> residues_;
  std::uint64_t threshold_ = 1;
};

}  // namespace epsfine
