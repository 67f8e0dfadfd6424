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
#include <string>
#include <vector>

#include "epsfine/family.hpp"
#include "epsfine/rational.hpp"
#include "epsfine/subset.hpp"

namespace epsfine {

// The limsup of ‖1_A x_n‖₁ is not computable from finite data; the honest
// finitary surrogate used throughout is the exact max over a recorded window
// [tailStart, horizon]. Every report carries both parameters.

enum class EstimateMode { Windowed, ExactPeriodic };

struct SubmeasureEstimate {
  Rational value;
  std::size_t tail_start = 0;
  std::size_t horizon = 0;
  EstimateMode mode = EstimateMode::Windowed;
  std::string family_label;
  std::string set_label;
  std::size_t attained_at = 0;  // first n achieving the max (Windowed mode)

  bool operator==(const SubmeasureEstimate&) const = default;
};

/// max_{n0 <= n <= N} ‖1_A x_n‖₁, exact.
inline SubmeasureEstimate eval_windowed(const SeqFamily& x, const SubsetSpec& a,
                                        std::size_t n0, std::size_t horizon) {
  x.check_window(n0, horizon);
  SubmeasureEstimate est;
  est.tail_start = n0;
  est.horizon = horizon;
  est.family_label = x.label();
  est.set_label = a.describe();
  est.value = 0;
  est.attained_at = n0;
  for (std::size_t n = n0; n <= horizon; ++n) {
    Rational v = x.norm1_on(n, a);
    if (v > est.value) {
      est.value = std::move(v);
      est.attained_at = n;
    }
  }
  return est;
}

/// Exact upper density |residues|/period of an eventually periodic set (the
/// finite exception list never affects the density). Rejects explicit finite
/// sets. Cross-checked in the tests against windowed evaluation on the
/// upper-density family.
inline Rational exact_periodic_upper_density(const SubsetSpec& a) {
  if (a.kind() != SubsetSpec::Kind::EventuallyPeriodic)
    throw std::invalid_argument("exact_periodic_upper_density: set is not eventually periodic");
  return Rational(static_cast<std::uint64_t>(a.residues().size()), a.period());
}

// ---------------------------------------------------------------------------
// Domination reports: windowed evidence for "small d_x forces small d_y",
// quantified over a finite battery of test sets only.
// ---------------------------------------------------------------------------

struct DominationSetRow {
  std::string set_label;
  Rational value_x;
  Rational value_y;
};

struct DominationCell {
  Rational epsilon;
  Rational delta;
  bool holds = false;
  std::optional<std::size_t> counterexample;  // row index of first violation
};

struct DominationReport {
  std::size_t tail_start = 0;
  std::size_t horizon = 0;
  std::string family_x;
  std::string family_y;
  std::vector<DominationSetRow> rows;
  std::vector<DominationCell> cells;
  bool all_hold = false;
};

inline DominationReport check_domination(const SeqFamily& x, const SeqFamily& y,
                                         const std::vector<SubsetSpec>& test_sets,
                                         const std::vector<std::pair<Rational, Rational>>& grid,
                                         std::size_t n0, std::size_t horizon) {
  DominationReport report;
  report.tail_start = n0;
  report.horizon = horizon;
  report.family_x = x.label();
  report.family_y = y.label();
  for (const auto& a : test_sets) {
    DominationSetRow row;
    row.set_label = a.describe();
    row.value_x = eval_windowed(x, a, n0, horizon).value;
    row.value_y = eval_windowed(y, a, n0, horizon).value;
    report.rows.push_back(std::move(row));
  }
  report.all_hold = true;
  for (const auto& [eps, delta] : grid) {
    DominationCell cell;
    cell.epsilon = eps;
    cell.delta = delta;
    cell.holds = true;
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
      if (report.rows[i].value_x <= delta && report.rows[i].value_y > eps) {
        cell.holds = false;
        cell.counterexample = i;
        break;
      }
    }
    report.all_hold = report.all_hold && cell.holds;
    report.cells.push_back(std::move(cell));
  }
  return report;
}

struct ZeroDominationFlag {
  std::string set_label;
  Rational value_x;
  Rational value_y;
};

struct ZeroDominationReport {
  Rational tolerance;
  std::size_t tail_start = 0;
  std::size_t horizon = 0;
  std::string family_x;
  std::string family_y;
  std::vector<ZeroDominationFlag> flags;  // sets with d_x <= tau < d_y
  bool ok = false;
};

inline ZeroDominationReport check_domination_zero(const SeqFamily& x, const SeqFamily& y,
                                                  const std::vector<SubsetSpec>& test_sets,
                                                  std::size_t n0, std::size_t horizon,
                                                  const Rational& tolerance) {
  if (tolerance < 0) throw std::invalid_argument("check_domination_zero: tolerance < 0");
  ZeroDominationReport report;
  report.tolerance = tolerance;
  report.tail_start = n0;
  report.horizon = horizon;
  report.family_x = x.label();
  report.family_y = y.label();
  for (const auto& a : test_sets) {
    const Rational vx = eval_windowed(x, a, n0, horizon).value;
    const Rational vy = eval_windowed(y, a, n0, horizon).value;
    if (vx <= tolerance && vy > tolerance)
      report.flags.push_back({a.describe(), vx, vy});
  }
  report.ok = report.flags.empty();
  return report;
}

// ---------------------------------------------------------------------------
// Convergence-chain classifier. Strongest windowed label that holds:
//   norm-to-zero    ("c0")            ‖x_n‖₁  <= tau on the tail
//   uniform-to-zero ("u->0")          ‖x_n‖∞  <= tau on the tail
//   pointwise-to-zero ("p->0")        |x_n(j)| <= tau on the tail, for every
//                                     coordinate j below the tail start
//   bounded-only
//
// The pointwise test deliberately stops at coordinates j < tailStart: for
// j inside the window the data cannot distinguish "settles later" from
// "never settles", so such coordinates are out of evidence reach.
// ---------------------------------------------------------------------------

enum class ChainClass { NormToZero, UniformToZero, PointwiseToZero, BoundedOnly };

inline const char* chain_class_name(ChainClass c) {
  switch (c) {
    case ChainClass::NormToZero: return "c0";
    case ChainClass::UniformToZero: return "u->0";
    case ChainClass::PointwiseToZero: return "p->0";
    case ChainClass::BoundedOnly: return "bounded-only";
  }
  return "?";
}

struct ChainLevel {
  bool holds = false;
  std::size_t witness_n = 0;  // first violating n when !holds
  Rational witness_value;     // the offending norm / coordinate value
};

struct ChainEvidence {
  ChainClass label = ChainClass::BoundedOnly;
  Rational tolerance;
  std::size_t tail_start = 0;
  std::size_t horizon = 0;
  std::uint64_t coordinate_cap = 0;  // pointwise test covers j <= this
  std::string family_label;
  ChainLevel norm_level;      // c0
  ChainLevel uniform_level;   // u->0
  ChainLevel pointwise_level; // p->0
};

inline ChainEvidence classify_chain(const SeqFamily& x, std::size_t n0, std::size_t horizon,
                                    const Rational& tolerance) {
  x.check_window(n0, horizon);
  if (tolerance < 0) throw std::invalid_argument("classify_chain: tolerance < 0");
  ChainEvidence ev;
  ev.tolerance = tolerance;
  ev.tail_start = n0;
  ev.horizon = horizon;
  ev.family_label = x.label();
  ev.coordinate_cap = std::min<std::uint64_t>(x.ground_bound(), n0 > 0 ? n0 - 1 : 0);

  ev.norm_level.holds = true;
  ev.uniform_level.holds = true;
  ev.pointwise_level.holds = true;
  for (std::size_t n = n0; n <= horizon; ++n) {
    if (ev.norm_level.holds) {
      Rational v = x.norm1(n);
      if (v > tolerance) {
        ev.norm_level.holds = false;
        ev.norm_level.witness_n = n;
        ev.norm_level.witness_value = std::move(v);
      }
    }
    if (ev.uniform_level.holds) {
      Rational v = x.norm_inf(n);
      if (v > tolerance) {
        ev.uniform_level.holds = false;
        ev.uniform_level.witness_n = n;
        ev.uniform_level.witness_value = std::move(v);
      }
    }
    if (ev.pointwise_level.holds) {
      Rational v = x.max_abs_prefix(n, ev.coordinate_cap);
      if (v > tolerance) {
        ev.pointwise_level.holds = false;
        ev.pointwise_level.witness_n = n;
        ev.pointwise_level.witness_value = std::move(v);
      }
    }
  }
  if (ev.norm_level.holds)
    ev.label = ChainClass::NormToZero;
  else if (ev.uniform_level.holds)
    ev.label = ChainClass::UniformToZero;
  else if (ev.pointwise_level.holds)
    ev.label = ChainClass::PointwiseToZero;
  else
    ev.label = ChainClass::BoundedOnly;
  return ev;
}

}  // namespace epsfine
