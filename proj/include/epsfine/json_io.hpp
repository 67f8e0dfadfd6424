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

#include <json.hpp>

#include "epsfine/operators.hpp"
#include "epsfine/partition.hpp"
#include "epsfine/search.hpp"
#include "epsfine/submeasure.hpp"

// JSON views of reports and certificates. Rationals are always emitted as
// exact "p/q" strings (never JSON numbers); insertion order is preserved by
// ordered_json so a report body is a deterministic function of its data.

namespace epsfine {

using OJson = nlohmann::ordered_json;

inline OJson json_of(const Rational& q) { return format_rational(q); }

inline OJson json_of(const SubsetSpec& s) {
  OJson j;
  if (s.kind() == SubsetSpec::Kind::ExplicitFinite) {
    j["kind"] = "finite";
    j["elements"] = s.elements();
    return j;
  }
  j["kind"] = "periodic";
  j["period"] = s.period();
  j["residues"] = s.residues();
  if (s.threshold() > 1) {
    j["threshold"] = s.threshold();
    j["exceptions"] = s.exceptions();
  }
  return j;
}

inline OJson json_of(const SparseVec& v) {
  OJson j = OJson::array();
  for (const auto& [idx, val] : v.entries()) j.push_back({idx, format_rational(val)});
  return j;
}

inline OJson json_of(const SubmeasureEstimate& e) {
  OJson j;
  j["value"] = json_of(e.value);
  j["tail_start"] = e.tail_start;
  j["horizon"] = e.horizon;
  j["mode"] = e.mode == EstimateMode::Windowed ? "windowed" : "exact-periodic";
  j["family"] = e.family_label;
  j["set"] = e.set_label;
  j["attained_at"] = e.attained_at;
  return j;
}

inline OJson json_of(const FineCertificate& c) {
  OJson j;
  j["family"] = c.family_label;
  j["epsilon"] = json_of(c.epsilon);
  j["tail_start"] = c.tail_start;
  j["horizon"] = c.horizon;
  j["ground"] = c.partition.ground();
  OJson blocks = OJson::array();
  for (const auto& bv : c.values) {
    OJson b;
    b["set"] = json_of(bv.block);
    b["value"] = json_of(bv.estimate.value);
    b["attained_at"] = bv.estimate.attained_at;
    b["residual"] = bv.is_residual;
    blocks.push_back(std::move(b));
  }
  j["blocks"] = std::move(blocks);
  return j;
}

inline OJson json_of(const FineFailure& f) {
  OJson j;
  j["block_index"] = f.block_index;
  j["residual"] = f.is_residual;
  j["set"] = f.estimate.set_label;
  j["value"] = json_of(f.estimate.value);
  j["attained_at"] = f.estimate.attained_at;
  j["epsilon"] = json_of(f.epsilon);
  return j;
}

inline OJson json_of(const FineResult& r) {
  OJson j;
  j["fine"] = r.fine();
  if (r.fine())
    j["certificate"] = json_of(*r.certificate);
  else
    j["failing_block"] = json_of(*r.failure);
  return j;
}

inline OJson json_of(const Partition& p) {
  OJson j;
  j["ground"] = p.ground();
  OJson blocks = OJson::array();
  for (const auto& b : p.blocks()) blocks.push_back(json_of(b));
  j["blocks"] = std::move(blocks);
  j["residual"] = json_of(p.residual());
  return j;
}

inline OJson json_of(const TLambdaSpec& s) {
  OJson j;
  j["lambda"] = json_of(s.lambda);
  j["sets"] = s.sets;
  return j;
}

inline OJson json_of(const TLambdaReport& r) {
  OJson j;
  j["ok"] = r.ok;
  OJson rows = OJson::array();
  for (const auto& row : r.rows) {
    OJson o;
    o["cardinality"] = row.cardinality;
    o["count"] = row.count;
    o["within_budget"] = row.within_budget;
    rows.push_back(std::move(o));
  }
  j["rows"] = std::move(rows);
  return j;
}

inline OJson json_of(const ChainLevel& level) {
  OJson j;
  j["holds"] = level.holds;
  if (!level.holds) {
    j["witness_n"] = level.witness_n;
    j["witness_value"] = json_of(level.witness_value);
  }
  return j;
}

inline OJson json_of(const ChainEvidence& ev) {
  OJson j;
  j["label"] = chain_class_name(ev.label);
  j["tolerance"] = json_of(ev.tolerance);
  j["tail_start"] = ev.tail_start;
  j["horizon"] = ev.horizon;
  j["coordinate_cap"] = ev.coordinate_cap;
  j["family"] = ev.family_label;
  OJson levels;
  levels["c0"] = json_of(ev.norm_level);
  levels["u->0"] = json_of(ev.uniform_level);
  levels["p->0"] = json_of(ev.pointwise_level);
  j["levels"] = std::move(levels);
  return j;
}

inline OJson json_of(const DominationReport& r) {
  OJson j;
  j["family_x"] = r.family_x;
  j["family_y"] = r.family_y;
  j["tail_start"] = r.tail_start;
  j["horizon"] = r.horizon;
  OJson rows = OJson::array();
  for (const auto& row : r.rows) {
    OJson o;
    o["set"] = row.set_label;
    o["value_x"] = json_of(row.value_x);
    o["value_y"] = json_of(row.value_y);
    rows.push_back(std::move(o));
  }
  j["sets"] = std::move(rows);
  OJson cells = OJson::array();
  for (const auto& cell : r.cells) {
    OJson o;
    o["epsilon"] = json_of(cell.epsilon);
    o["delta"] = json_of(cell.delta);
    o["holds"] = cell.holds;
    if (cell.counterexample)
      o["counterexample"] = *cell.counterexample;
    cells.push_back(std::move(o));
  }
  j["cells"] = std::move(cells);
  j["all_hold"] = r.all_hold;
  return j;
}

inline OJson json_of(const ZeroDominationReport& r) {
  OJson j;
  j["family_x"] = r.family_x;
  j["family_y"] = r.family_y;
  j["tolerance"] = json_of(r.tolerance);
  j["tail_start"] = r.tail_start;
  j["horizon"] = r.horizon;
  OJson flags = OJson::array();
  for (const auto& flag : r.flags) {
    OJson o;
    o["set"] = flag.set_label;
    o["value_x"] = json_of(flag.value_x);
    o["value_y"] = json_of(flag.value_y);
    flags.push_back(std::move(o));
  }
  j["flags"] = std::move(flags);
  j["ok"] = r.ok;
  return j;
}

inline OJson json_of(const TriangleChainReport& r) {
  OJson j;
  j["ok"] = r.ok;
  j["operator"] = r.operator_label;
  j["family"] = r.family_label;
  j["set"] = r.set_label;
  j["tail_start"] = r.tail_start;
  j["horizon"] = r.horizon;
  OJson rows = OJson::array();
  for (const auto& row : r.rows) {
    OJson o;
    o["n"] = row.n;
    o["lhs_norm1"] = json_of(row.lhs_norm1);
    o["mid_norm1"] = json_of(row.mid_norm1);
    o["rhs_norm1"] = json_of(row.rhs_norm1);
    o["lhs_norm_inf"] = json_of(row.lhs_norm_inf);
    o["mid_norm_inf"] = json_of(row.mid_norm_inf);
    o["ok"] = row.ok;
    rows.push_back(std::move(o));
  }
  j["rows"] = std::move(rows);
  return j;
}

inline OJson json_of(const SplitChainReport& r) {
  OJson j;
  j["ok"] = r.ok;
  j["split"] = r.split;
  j["operator"] = r.operator_label;
  j["family"] = r.family_label;
  j["set"] = r.set_label;
  j["tail_start"] = r.tail_start;
  j["horizon"] = r.horizon;
  j["tail_column_max"] = json_of(r.tail_column_max);
  OJson rows = OJson::array();
  for (const auto& row : r.rows) {
    OJson o;
    o["n"] = row.n;
    o["lhs"] = json_of(row.lhs);
    o["tail_term"] = json_of(row.tail_term);
    o["head_term"] = json_of(row.head_term);
    o["ok"] = row.ok;
    rows.push_back(std::move(o));
  }
  j["rows"] = std::move(rows);
  return j;
}

inline OJson json_of(const SupnormBoundReport& r) {
  OJson j;
  j["ok"] = r.ok;
  j["epsilon"] = json_of(r.epsilon);
  j["tail_start"] = r.tail_start;
  j["horizon"] = r.horizon;
  j["family"] = r.family_label;
  OJson rows = OJson::array();
  for (const auto& row : r.rows) {
    OJson o;
    o["n"] = row.n;
    o["norm_inf"] = json_of(row.norm_inf);
    o["max_block_norm1"] = json_of(row.max_block_norm1);
    o["ok"] = row.ok;
    rows.push_back(std::move(o));
  }
  j["rows"] = std::move(rows);
  return j;
}

inline OJson json_of(const NotFoundProof& p) {
  OJson j;
  j["epsilon"] = json_of(p.epsilon);
  j["max_blocks"] = p.max_blocks;
  j["tail_start"] = p.tail_start;
  j["horizon"] = p.horizon;
  j["ground_elements"] = p.ground_elements;
  j["nodes_visited"] = p.nodes_visited;
  j["statement"] = p.statement;
  return j;
}

inline OJson json_of(const ExhaustiveResult& r) {
  OJson j;
  j["found"] = r.found();
  j["nodes_visited"] = r.nodes_visited;
  if (r.found())
    j["certificate"] = json_of(*r.certificate);
  else
    j["not_found"] = json_of(*r.not_found);
  return j;
}

inline OJson json_of(const GreedyResult& r) {
  OJson j;
  j["found"] = r.found();
  j["achieved_max"] = json_of(r.achieved_max);
  j["placement_order"] = r.placement_order;
  if (r.found()) j["certificate"] = json_of(*r.certificate);
  return j;
}

inline OJson json_of(const RandomSearchResult& r) {
  OJson j;
  j["found"] = r.found();
  j["seed"] = r.seed;
  j["trials_requested"] = r.trials_requested;
  j["success_trial"] = r.success_trial;
  OJson stats = OJson::array();
  for (const auto& stat : r.trial_stats) {
    OJson o;
    o["trial"] = stat.trial;
    o["achieved_max"] = json_of(stat.achieved_max);
    stats.push_back(std::move(o));
  }
  j["trial_stats"] = std::move(stats);
  if (r.found()) j["certificate"] = json_of(*r.certificate);
  return j;
}

inline OJson json_of(const TransferResult& r) {
  OJson j;
  j["certificate"] = json_of(r.certificate);
  j["image_family"] = r.image.label();
  j["slack"] = json_of(r.slack);
  j["column_tail_max"] = json_of(r.column_tail_max);
  j["split"] = r.split;
  j["input_epsilon"] = json_of(r.input_epsilon);
  return j;
}

inline OJson json_of(const TruncationResult& r) {
  OJson j;
  j["family"] = r.truncated.label();
  OJson rows = OJson::array();
  for (const auto& row : r.rows) {
    OJson o;
    o["n"] = row.n;
    o["kept"] = row.kept;
    o["dropped_mass"] = json_of(row.dropped_mass);
    o["budget"] = json_of(row.budget);
    rows.push_back(std::move(o));
  }
  j["rows"] = std::move(rows);
  return j;
}

}  // namespace epsfine
