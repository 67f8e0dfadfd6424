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
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "epsfine/rational.hpp"
#include "epsfine/subset.hpp"

namespace epsfine {

/**
 * Finite-support vector over coordinates {1, 2, 3, ...} with exact rational
 * values. Zero entries are never stored, so structural equality is value
 * equality, and the stored entry list (strictly increasing coordinates) is a
 * canonical form. Immutable after construction.
 */
class SparseVec {
 public:
  using Entry = std::pair<std::uint64_t, Rational>;

  SparseVec() = default;

  /// Builds from arbitrary (coordinate, value) pairs: duplicates are summed,
  /// zeros dropped. Coordinate 0 is rejected.
  static SparseVec from_entries(std::vector<Entry> raw) {
    std::sort(raw.begin(), raw.end(),
              [](const Entry& a, const Entry& b) { return a.first < b.first; });
    SparseVec v;
    for (auto& [idx, val] : raw) {
      if (idx == 0) throw std::invalid_argument("SparseVec: coordinates start at 1");
      if (!v.entries_.empty() && v.entries_.back().first == idx)
        v.entries_.back().second += val;
      else
        v.entries_.emplace_back(idx, std::move(val));
    }
    std::erase_if(v.entries_, [](const Entry& e) { return e.second == 0; });
    return v;
  }

  /// Standard basis vector e_j.
  static SparseVec basis(std::uint64_t j) {
    if (j == 0) throw std::invalid_argument("SparseVec: coordinates start at 1");
    SparseVec v;
    v.entries_.emplace_back(j, Rational(1));
    return v;
  }

  bool is_zero() const { return entries_.empty(); }
  std::size_t support_size() const { return entries_.size(); }
  const std::vector<Entry>& entries() const { return entries_; }

  /// Largest coordinate in the support; 0 for the zero vector.
  std::uint64_t max_index() const { return entries_.empty() ? 0 : entries_.back().first; }

  Rational at(std::uint64_t j) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), j,
                               [](const Entry& e, std::uint64_t k) { return e.first < k; });
    if (it == entries_.end() || it->first != j) return Rational(0);
    return it->second;
  }

  Rational norm1() const {
    Rational sum = 0;
    for (const auto& [idx, val] : entries_) sum += rat_abs(val);
    return sum;
  }

  Rational norm_inf() const {
    Rational best = 0;
    for (const auto& [idx, val] : entries_) best = rat_max(best, rat_abs(val));
    return best;
  }

  /// ‖1_A · x‖₁ without materializing the projection.
  Rational norm1_on(const SubsetSpec& a) const {
    Rational sum = 0;
    for (const auto& [idx, val] : entries_)
      if (a.contains(idx)) sum += rat_abs(val);
    return sum;
  }

  Rational norm_inf_on(const SubsetSpec& a) const {
    Rational best = 0;
    for (const auto& [idx, val] : entries_)
      if (a.contains(idx)) best = rat_max(best, rat_abs(val));
    return best;
  }

  /// max |x(j)| over coordinates j <= cap.
  Rational max_abs_prefix(std::uint64_t cap) const {
    Rational best = 0;
    for (const auto& [idx, val] : entries_) {
      if (idx > cap) break;
      best = rat_max(best, rat_abs(val));
    }
    return best;
  }

  /// Σ |x(j)| over coordinates j <= cap.
  Rational norm1_prefix(std::uint64_t cap) const {
    Rational sum = 0;
    for (const auto& [idx, val] : entries_) {
      if (idx > cap) break;
      sum += rat_abs(val);
    }
    return sum;
  }

  bool operator==(const SparseVec& other) const = default;

  std::string describe() const {
    std::string out = "{";
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      if (i) out += ", ";
      out += std::to_string(entries_[i].first) + ":" + format_rational(entries_[i].second);
    }
    return out + "}";
  }

  friend SparseVec add(const SparseVec& x, const SparseVec& y) {
    SparseVec out;
    out.entries_.reserve(x.entries_.size() + y.entries_.size());
    auto ix = x.entries_.begin();
    auto iy = y.entries_.begin();
    while (ix != x.entries_.end() || iy != y.entries_.end()) {
      if (iy == y.entries_.end() || (ix != x.entries_.end() && ix->first < iy->first)) {
        out.entries_.push_back(*ix++);
      } else if (ix == x.entries_.end() || iy->first < ix->first) {
        out.entries_.push_back(*iy++);
      } else {
        Rational sum = ix->second + iy->second;
        if (sum != 0) out.entries_.emplace_back(ix->first, std::move(sum));
        ++ix;
        ++iy;
      }
    }
    return out;
  }

  friend SparseVec scale(const Rational& c, const SparseVec& x) {
    SparseVec out;
    if (c == 0) return out;
    out.entries_.reserve(x.entries_.size());
    for (const auto& [idx, val] : x.entries_) out.entries_.emplace_back(idx, Rational(c * val));
    return out;
  }

  friend SparseVec modulus(const SparseVec& x) {
    SparseVec out;
    out.entries_.reserve(x.entries_.size());
    for (const auto& [idx, val] : x.entries_) out.entries_.emplace_back(idx, rat_abs(val));
    return out;
  }

  /// Characteristic projection: keeps exactly the coordinates inside A.
  friend SparseVec project(const SubsetSpec& a, const SparseVec& x) {
    SparseVec out;
    for (const auto& e : x.entries_)
      if (a.contains(e.first)) out.entries_.push_back(e);
    return out;
  }

 private:
  std::vector<Entry> entries_;  // strictly increasing coordinates, all values nonzero
};

inline Rational norm1(const SparseVec& x) { return x.norm1(); }
inline Rational norm_inf(const SparseVec& x) { return x.norm_inf(); }

}  // namespace epsfine
