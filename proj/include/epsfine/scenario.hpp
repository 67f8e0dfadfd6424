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
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "epsfine/json_io.hpp"
#include "epsfine/search.hpp"
#include "epsfine/version.hpp"

// Declarative scenarios: named families, sets, operators and partitions plus
// an ordered task list, all in one JSON document. Parsing validates the
// whole document and reports every error, not just the first. Running a
// scenario is deterministic: all randomness flows through explicit seeds,
// every rational is exact, and re-running with the same seed reproduces the
// report byte for byte.

namespace epsfine {

// ---------------------------------------------------------------------------
// Task descriptions (validated at parse time).
// ---------------------------------------------------------------------------

struct EvalTask {
  std::string family;
  std::string set;
  std::size_t tail_start = 1;
  std::size_t horizon = 1;
};

enum class CertifyStrategy { GivenPartition, Exhaustive, Greedy, Random };

struct CertifyTask {
  std::string family;
  CertifyStrategy strategy = CertifyStrategy::GivenPartition;
  std::string partition;  // for GivenPartition
  std::size_t blocks = 1;
  std::size_t trials = 1;
  std::optional<std::uint64_t> seed;
  Rational epsilon;
  std::size_t tail_start = 1;
  std::size_t horizon = 1;
};

struct MeetTask {
  std::string left;
  std::string right;
  std::string name;  // registered for later tasks; may be empty
};

struct SumCertifyTask {
  std::string family_x;
  std::string family_y;
  std::string partition_x;
  std::string partition_y;
  Rational epsilon;  // combined tolerance; each side is certified at half
  std::size_t tail_start = 1;
  std::size_t horizon = 1;
};

struct TransferTask {
  std::string op;
  std::string partition;
  Rational delta;
  std::size_t columns_tail_start = 1;
  std::size_t columns_horizon = 1;
  std::string family;  // the pointwise-to-zero input family
  std::uint64_t split = 1;
  std::size_t tail_start = 1;
};

struct ClassifyTask {
  std::string family;
  std::size_t tail_start = 1;
  std::size_t horizon = 1;
  Rational tolerance;
  std::optional<std::string> expect;  // label the family must receive
};

struct GenerateTask {
  Rational lambda;
  std::uint64_t size_min = 1;
  std::uint64_t size_max = 1;
  std::uint64_t count_per_size = 1;
  std::uint64_t ground = 1;
  std::optional<std::uint64_t> seed;
  std::string name;  // register the generated family; may be empty
};

struct VerifyCheck {
  enum class Kind { Triangle, Split, SupnormBound, Domination, DominationZero, Truncation };
  Kind kind = Kind::Triangle;
  std::string op;
  std::string family;       // x for domination, family otherwise
  std::string family_y;     // domination only
  std::string set;          // triangle/split
  std::vector<std::string> sets;  // domination/truncation batteries
  std::string certificate;  // supnorm_bound: id of an earlier certifying task
  std::uint64_t split = 1;
  Rational tolerance;
  std::vector<std::pair<Rational, Rational>> grid;  // domination (eps, delta)
  std::vector<Rational> budgets;                    // truncation; empty = dyadic 2^-n
  std::size_t tail_start = 1;
  std::size_t horizon = 1;
};

struct VerifySuiteTask {
  std::vector<VerifyCheck> checks;
};

using TaskBody = std::variant<EvalTask, CertifyTask, MeetTask, SumCertifyTask, TransferTask,
                              ClassifyTask, GenerateTask, VerifySuiteTask>;

struct Task {
  std::string id;  // may be empty
  TaskBody body;
};

struct Scenario {
  std::uint64_t seed = 0;
  std::map<std::string, SeqFamily> families;
  std::map<std::string, SubsetSpec> sets;
  std::map<std::string, ColumnOperator> operators;
  std::map<std::string, Partition> partitions;
  std::vector<Task> tasks;
  std::string digest;  // fnv1a-64 of the source text
};

struct ScenarioParse {
  std::optional<Scenario> scenario;
  std::vector<std::string> errors;

  bool ok() const { return scenario.has_value(); }
};

inline std::string fnv1a64_hex(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------------------
// Parsing.
// ---------------------------------------------------------------------------

namespace detail {

class ScenarioParser {
 public:
  explicit ScenarioParser(const std::string& text) : text_(text) {}

  ScenarioParse parse() {
    OJson doc;
    try {
      doc = OJson::parse(text_);
    } catch (const std::exception& e) {
      return {{}, {std::string("json: ") + e.what()}};
    }
    if (!doc.is_object()) return {{}, {"top level must be an object"}};

    scenario_.digest = fnv1a64_hex(text_);
    if (doc.contains("seed")) scenario_.seed = get_u64(doc, "seed", "seed");

    if (doc.contains("sets")) parse_named(doc["sets"], "sets", [&](const std::string& name, const OJson& j) {
      scenario_.sets.emplace(name, parse_set(j, "sets." + name));
    });
    if (doc.contains("families"))
      parse_named(doc["families"], "families", [&](const std::string& name, const OJson& j) {
        scenario_.families.emplace(name, parse_family(name, j, "families." + name));
      });
    if (doc.contains("operators"))
      parse_named(doc["operators"], "operators", [&](const std::string& name, const OJson& j) {
        scenario_.operators.emplace(name, parse_operator(j, "operators." + name));
      });
    if (doc.contains("partitions"))
      parse_named(doc["partitions"], "partitions", [&](const std::string& name, const OJson& j) {
        scenario_.partitions.emplace(name, parse_partition(j, "partitions." + name));
      });
    if (doc.contains("tasks")) {
      if (!doc["tasks"].is_array())
        fail("tasks", "must be an array");
      else {
        std::size_t index = 0;
        for (const auto& tj : doc["tasks"]) {
          parse_task(tj, "tasks[" + std::to_string(index) + "]");
          ++index;
        }
      }
    }
    for (const auto& [key, value] : doc.items()) {
      (void)value;
      if (key != "seed" && key != "sets" && key != "families" && key != "operators" &&
          key != "partitions" && key != "tasks")
        fail(key, "unknown top-level section");
    }

    if (!errors_.empty()) return {{}, std::move(errors_)};
    return {std::move(scenario_), {}};
  }

 private:
  template <class Fn>
  void parse_named(const OJson& node, const std::string& ctx, Fn fn) {
    if (!node.is_object()) {
      fail(ctx, "must be an object of named definitions");
      return;
    }
    for (const auto& [name, j] : node.items()) {
      try {
        fn(name, j);
      } catch (const std::exception& e) {
        fail(ctx + "." + name, e.what());
      }
    }
  }

  void fail(const std::string& ctx, const std::string& what) {
    errors_.push_back(ctx + ": " + what);
  }

  // --- leaf readers ------------------------------------------------------

  static std::uint64_t get_u64(const OJson& j, const std::string& key, const std::string& ctx) {
    if (!j.contains(key) || !j[key].is_number_unsigned())
      throw std::invalid_argument(ctx + ": missing or non-integer '" + key + "'");
    return j[key].get<std::uint64_t>();
  }

  static Rational get_rational(const OJson& j, const std::string& key, const std::string& ctx) {
    if (!j.contains(key)) throw std::invalid_argument(ctx + ": missing '" + key + "'");
    return rational_value(j[key], ctx + "." + key);
  }

  static Rational rational_value(const OJson& v, const std::string& ctx) {
    if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
    if (v.is_string()) {
      if (auto q = parse_rational(v.get<std::string>())) return *q;
      throw std::invalid_argument(ctx + ": malformed rational '" + v.get<std::string>() + "'");
    }
    throw std::invalid_argument(ctx + ": rationals are integers or \"p/q\" strings");
  }

  static std::string get_string(const OJson& j, const std::string& key, const std::string& ctx) {
    if (!j.contains(key) || !j[key].is_string())
      throw std::invalid_argument(ctx + ": missing or non-string '" + key + "'");
    return j[key].get<std::string>();
  }

  static std::vector<std::uint64_t> get_u64_list(const OJson& v, const std::string& ctx) {
    if (!v.is_array()) throw std::invalid_argument(ctx + ": must be an array of integers");
    std::vector<std::uint64_t> out;
    for (const auto& e : v) {
      if (!e.is_number_unsigned()) throw std::invalid_argument(ctx + ": non-integer entry");
      out.push_back(e.get<std::uint64_t>());
    }
    return out;
  }

  static std::vector<std::vector<std::uint64_t>> get_sets_list(const OJson& v,
                                                               const std::string& ctx) {
    if (!v.is_array()) throw std::invalid_argument(ctx + ": must be an array of index sets");
    std::vector<std::vector<std::uint64_t>> out;
    std::size_t i = 0;
    for (const auto& e : v) out.push_back(get_u64_list(e, ctx + "[" + std::to_string(i++) + "]"));
    return out;
  }

  static std::vector<Rational> get_rational_list(const OJson& v, const std::string& ctx) {
    if (!v.is_array()) throw std::invalid_argument(ctx + ": must be an array of rationals");
    std::vector<Rational> out;
    std::size_t i = 0;
    for (const auto& e : v) out.push_back(rational_value(e, ctx + "[" + std::to_string(i++) + "]"));
    return out;
  }

  std::pair<std::size_t, std::size_t> get_window(const OJson& j, const std::string& ctx,
                                                 const char* key = "window") {
    if (!j.contains(key) || !j[key].is_array() || j[key].size() != 2 ||
        !j[key][0].is_number_unsigned() || !j[key][1].is_number_unsigned())
      throw std::invalid_argument(ctx + ": '" + key + "' must be [tail_start, horizon]");
    return {j[key][0].get<std::size_t>(), j[key][1].get<std::size_t>()};
  }

  // --- definitions --------------------------------------------------------

  SubsetSpec parse_set(const OJson& j, const std::string& ctx) {
    if (!j.is_object()) throw std::invalid_argument(ctx + ": must be an object");
    const std::string kind = get_string(j, "kind", ctx);
    if (kind == "finite") return SubsetSpec::finite(get_u64_list(j.at("elements"), ctx + ".elements"));
    if (kind == "initial_segment") return SubsetSpec::initial_segment(get_u64(j, "length", ctx));
    if (kind == "periodic") {
      const auto period = get_u64(j, "period", ctx);
      auto residues = get_u64_list(j.at("residues"), ctx + ".residues");
      if (!j.contains("threshold")) return SubsetSpec::periodic(period, std::move(residues));
      return SubsetSpec::eventually_periodic(
          period, std::move(residues), get_u64(j, "threshold", ctx),
          j.contains("exceptions") ? get_u64_list(j["exceptions"], ctx + ".exceptions")
                                   : std::vector<std::uint64_t>{});
    }
    if (kind == "full") return SubsetSpec::full_set();
    if (kind == "empty") return SubsetSpec::empty_set();
    throw std::invalid_argument(ctx + ": unknown set kind '" + kind + "'");
  }

  const SubsetSpec& set_ref(const std::string& name, const std::string& ctx) const {
    auto it = scenario_.sets.find(name);
    if (it == scenario_.sets.end())
      throw std::invalid_argument(ctx + ": undefined set '" + name + "'");
    return it->second;
  }

  const SeqFamily& family_ref(const std::string& name, const std::string& ctx) const {
    auto it = scenario_.families.find(name);
    if (it == scenario_.families.end())
      throw std::invalid_argument(ctx + ": undefined family '" + name + "'");
    return it->second;
  }

  std::vector<std::vector<std::uint64_t>> parse_h_spec(const OJson& j, const std::string& ctx) {
    if (!j.is_object()) throw std::invalid_argument(ctx + ": must be an object");
    const std::string kind = get_string(j, "kind", ctx);
    if (kind == "initial_segments") {
      const auto length = get_u64(j, "length", ctx);
      std::vector<std::vector<std::uint64_t>> out;
      for (std::uint64_t n = 1; n <= length; ++n) {
        std::vector<std::uint64_t> seg(n);
        std::iota(seg.begin(), seg.end(), std::uint64_t{1});
        out.push_back(std::move(seg));
      }
      return out;
    }
    if (kind == "sets") return get_sets_list(j.at("sets"), ctx + ".sets");
    throw std::invalid_argument(ctx + ": unknown window spec kind '" + kind + "'");
  }

  SeqFamily parse_family(const std::string& name, const OJson& j, const std::string& ctx) {
    if (!j.is_object()) throw std::invalid_argument(ctx + ": must be an object");
    const std::string kind = get_string(j, "kind", ctx);
    if (kind == "upper_density") return upper_density_family(get_u64(j, "length", ctx), name);
    if (kind == "from_sets")
      return family_from_sets(get_sets_list(j.at("sets"), ctx + ".sets"), name);
    if (kind == "basis") {
      std::vector<std::vector<std::uint64_t>> sets;
      const auto length = get_u64(j, "length", ctx);
      for (std::uint64_t n = 1; n <= length; ++n) sets.push_back({n});
      return family_from_sets(sets, name);
    }
    if (kind == "constant_basis") {
      const auto index = get_u64(j, "index", ctx);
      const auto length = get_u64(j, "length", ctx);
      std::vector<std::vector<std::uint64_t>> sets(length, {index});
      return family_from_sets(sets, name);
    }
    if (kind == "t_lambda_random") {
      const auto spec = generate_t_lambda(get_rational(j, "lambda", ctx), get_u64(j, "size_min", ctx),
                                          get_u64(j, "size_max", ctx),
                                          get_u64(j, "count_per_size", ctx),
                                          get_u64(j, "ground", ctx), get_u64(j, "seed", ctx));
      return family_from_sets(spec.sets, name);
    }
    if (kind == "modulate") {
      const auto& base = family_ref(get_string(j, "base", ctx), ctx);
      SeqFamily out = modulate(get_rational_list(j.at("coefficients"), ctx + ".coefficients"), base);
      return SeqFamily::from_vectors(materialize(out), name, out.sup_norm_bound());
    }
    if (kind == "embed_linf")
      return embed_linf(get_rational_list(j.at("coefficients"), ctx + ".coefficients"),
                        get_sets_list(j.at("sets"), ctx + ".sets"), name);
    if (kind == "cesaro") {
      const auto& base = family_ref(get_string(j, "base", ctx), ctx);
      return cesaro_average(base, parse_h_spec(j.at("windows"), ctx + ".windows"), name);
    }
    if (kind == "shifted_random")
      return shifted_random_family(get_u64(j, "seed", ctx), get_u64(j, "length", ctx),
                                   get_u64(j, "width", ctx), get_u64(j, "max_denominator", ctx),
                                   name);
    if (kind == "sum") {
      const auto& left = family_ref(get_string(j, "left", ctx), ctx);
      const auto& right = family_ref(get_string(j, "right", ctx), ctx);
      return add_families(left, right, name);
    }
    if (kind == "scale") {
      const auto& base = family_ref(get_string(j, "base", ctx), ctx);
      return scale_family(get_rational(j, "factor", ctx), base, name);
    }
    throw std::invalid_argument(ctx + ": unknown family kind '" + kind + "'");
  }

  static std::vector<SparseVec> materialize(const SeqFamily& f) {
    std::vector<SparseVec> vecs;
    vecs.reserve(f.size());
    for (std::size_t n = 1; n <= f.size(); ++n) vecs.push_back(f.vec(n));
    return vecs;
  }

  ColumnOperator parse_operator(const OJson& j, const std::string& ctx) {
    if (!j.is_object()) throw std::invalid_argument(ctx + ": must be an object");
    const std::string kind = get_string(j, "kind", ctx);
    if (kind == "identity") return ColumnOperator::identity(get_u64(j, "columns", ctx));
    if (kind == "rank_one")
      return ColumnOperator::rank_one(get_u64(j, "target", ctx), get_u64(j, "columns", ctx));
    if (kind == "columns_from_family")
      return ColumnOperator::from_family(family_ref(get_string(j, "family", ctx), ctx));
    if (kind == "cesaro") {
      const auto& base = family_ref(get_string(j, "family", ctx), ctx);
      return ColumnOperator::from_family(
          cesaro_average(base, parse_h_spec(j.at("windows"), ctx + ".windows")));
    }
    throw std::invalid_argument(ctx + ": unknown operator kind '" + kind + "'");
  }

  Partition parse_partition(const OJson& j, const std::string& ctx) {
    if (!j.is_object()) throw std::invalid_argument(ctx + ": must be an object");
    const std::string kind = get_string(j, "kind", ctx);
    if (kind == "residues")
      return Partition::residues(get_u64(j, "ground", ctx), get_u64(j, "modulus", ctx));
    if (kind == "single") return Partition::single(get_u64(j, "ground", ctx));
    if (kind == "blocks") {
      if (!j.contains("blocks") || !j["blocks"].is_array())
        throw std::invalid_argument(ctx + ": missing 'blocks' array");
      std::vector<SubsetSpec> blocks;
      std::size_t i = 0;
      for (const auto& b : j["blocks"]) {
        const std::string bctx = ctx + ".blocks[" + std::to_string(i++) + "]";
        if (b.is_string())
          blocks.push_back(set_ref(b.get<std::string>(), bctx));
        else
          blocks.push_back(parse_set(b, bctx));
      }
      return Partition(get_u64(j, "ground", ctx), std::move(blocks));
    }
    throw std::invalid_argument(ctx + ": unknown partition kind '" + kind + "'");
  }

  // --- tasks ---------------------------------------------------------------

  void require_family(const std::string& name, std::size_t n0, std::size_t horizon,
                      const std::string& ctx) {
    auto it = family_lengths_.find(name);
    if (it == family_lengths_.end())
      throw std::invalid_argument(ctx + ": undefined family '" + name + "'");
    if (n0 < 1 || n0 > horizon || horizon > it->second)
      throw std::invalid_argument(ctx + ": window outside family '" + name + "' of length " +
                                  std::to_string(it->second));
  }

  void require_partition(const std::string& name, const std::string& ctx) {
    if (!partition_names_.count(name))
      throw std::invalid_argument(ctx + ": undefined partition '" + name + "'");
  }

  void parse_task(const OJson& j, const std::string& ctx) {
    try {
      if (!j.is_object()) throw std::invalid_argument(ctx + ": must be an object");
      if (family_lengths_.empty()) {
        for (const auto& [name, fam] : scenario_.families)
          family_lengths_.emplace(name, fam.size());
        for (const auto& [name, part] : scenario_.partitions) partition_names_.insert(name);
      }
      Task task;
      if (j.contains("id")) task.id = get_string(j, "id", ctx);
      const std::string type = get_string(j, "task", ctx);
      if (type == "eval") {
        EvalTask t;
        t.family = get_string(j, "family", ctx);
        t.set = get_string(j, "set", ctx);
        std::tie(t.tail_start, t.horizon) = get_window(j, ctx);
        require_family(t.family, t.tail_start, t.horizon, ctx);
        set_ref(t.set, ctx);
        task.body = std::move(t);
      } else if (type == "certify") {
        CertifyTask t;
        t.family = get_string(j, "family", ctx);
        t.epsilon = get_rational(j, "epsilon", ctx);
        std::tie(t.tail_start, t.horizon) = get_window(j, ctx);
        require_family(t.family, t.tail_start, t.horizon, ctx);
        if (j.contains("partition")) {
          t.strategy = CertifyStrategy::GivenPartition;
          t.partition = get_string(j, "partition", ctx);
          require_partition(t.partition, ctx);
        } else {
          const std::string strategy = get_string(j, "strategy", ctx);
          t.blocks = get_u64(j, "blocks", ctx);
          if (strategy == "exhaustive") {
            t.strategy = CertifyStrategy::Exhaustive;
          } else if (strategy == "greedy") {
            t.strategy = CertifyStrategy::Greedy;
          } else if (strategy == "random") {
            t.strategy = CertifyStrategy::Random;
            t.trials = get_u64(j, "trials", ctx);
            if (j.contains("seed")) t.seed = get_u64(j, "seed", ctx);
          } else {
            throw std::invalid_argument(ctx + ": unknown strategy '" + strategy + "'");
          }
        }
        if (!task.id.empty()) certificate_ids_.insert(task.id);
        task.body = std::move(t);
      } else if (type == "meet") {
        MeetTask t;
        t.left = get_string(j, "left", ctx);
        t.right = get_string(j, "right", ctx);
        require_partition(t.left, ctx);
        require_partition(t.right, ctx);
        if (j.contains("name")) {
          t.name = get_string(j, "name", ctx);
          partition_names_.insert(t.name);
        }
        task.body = std::move(t);
      } else if (type == "sum_certify") {
        SumCertifyTask t;
        t.family_x = get_string(j, "x", ctx);
        t.family_y = get_string(j, "y", ctx);
        t.partition_x = get_string(j, "x_partition", ctx);
        t.partition_y = get_string(j, "y_partition", ctx);
        t.epsilon = get_rational(j, "epsilon", ctx);
        std::tie(t.tail_start, t.horizon) = get_window(j, ctx);
        require_family(t.family_x, t.tail_start, t.horizon, ctx);
        require_family(t.family_y, t.tail_start, t.horizon, ctx);
        require_partition(t.partition_x, ctx);
        require_partition(t.partition_y, ctx);
        if (!task.id.empty()) certificate_ids_.insert(task.id);
        task.body = std::move(t);
      } else if (type == "transfer") {
        TransferTask t;
        t.op = get_string(j, "operator", ctx);
        t.partition = get_string(j, "partition", ctx);
        t.delta = get_rational(j, "delta", ctx);
        std::tie(t.columns_tail_start, t.columns_horizon) = get_window(j, ctx, "columns_window");
        t.family = get_string(j, "x", ctx);
        t.split = get_u64(j, "split", ctx);
        t.tail_start = get_u64(j, "tail_start", ctx);
        if (!scenario_.operators.count(t.op))
          throw std::invalid_argument(ctx + ": undefined operator '" + t.op + "'");
        require_partition(t.partition, ctx);
        auto it = family_lengths_.find(t.family);
        if (it == family_lengths_.end())
          throw std::invalid_argument(ctx + ": undefined family '" + t.family + "'");
        if (t.tail_start < 1 || t.tail_start > it->second)
          throw std::invalid_argument(ctx + ": tail_start outside family '" + t.family + "'");
        if (!task.id.empty()) certificate_ids_.insert(task.id);
        task.body = std::move(t);
      } else if (type == "classify") {
        ClassifyTask t;
        t.family = get_string(j, "family", ctx);
        std::tie(t.tail_start, t.horizon) = get_window(j, ctx);
        t.tolerance = get_rational(j, "tolerance", ctx);
        require_family(t.family, t.tail_start, t.horizon, ctx);
        if (j.contains("expect")) t.expect = get_string(j, "expect", ctx);
        task.body = std::move(t);
      } else if (type == "generate") {
        GenerateTask t;
        t.lambda = get_rational(j, "lambda", ctx);
        t.size_min = get_u64(j, "size_min", ctx);
        t.size_max = get_u64(j, "size_max", ctx);
        t.count_per_size = get_u64(j, "count_per_size", ctx);
        t.ground = get_u64(j, "ground", ctx);
        if (j.contains("seed")) t.seed = get_u64(j, "seed", ctx);
        if (t.size_min == 0 || t.size_min > t.size_max)
          throw std::invalid_argument(ctx + ": bad size range");
        if (j.contains("name")) {
          t.name = get_string(j, "name", ctx);
          family_lengths_[t.name] =
              (t.size_max - t.size_min + 1) * static_cast<std::size_t>(t.count_per_size);
        }
        task.body = std::move(t);
      } else if (type == "verify_suite") {
        VerifySuiteTask t;
        if (!j.contains("checks") || !j["checks"].is_array())
          throw std::invalid_argument(ctx + ": missing 'checks' array");
        std::size_t i = 0;
        for (const auto& cj : j["checks"])
          t.checks.push_back(parse_check(cj, ctx + ".checks[" + std::to_string(i++) + "]"));
        task.body = std::move(t);
      } else {
        throw std::invalid_argument(ctx + ": unknown task '" + type + "'");
      }
      scenario_.tasks.push_back(std::move(task));
    } catch (const std::exception& e) {
      errors_.push_back(e.what());
    }
  }

  VerifyCheck parse_check(const OJson& j, const std::string& ctx) {
    if (!j.is_object()) throw std::invalid_argument(ctx + ": must be an object");
    VerifyCheck c;
    const std::string kind = get_string(j, "check", ctx);
    if (kind == "triangle" || kind == "split") {
      c.kind = kind == "triangle" ? VerifyCheck::Kind::Triangle : VerifyCheck::Kind::Split;
      c.op = get_string(j, "operator", ctx);
      c.family = get_string(j, "family", ctx);
      c.set = get_string(j, "set", ctx);
      std::tie(c.tail_start, c.horizon) = get_window(j, ctx);
      if (!scenario_.operators.count(c.op))
        throw std::invalid_argument(ctx + ": undefined operator '" + c.op + "'");
      require_family(c.family, c.tail_start, c.horizon, ctx);
      set_ref(c.set, ctx);
      if (c.kind == VerifyCheck::Kind::Split) c.split = get_u64(j, "split", ctx);
    } else if (kind == "supnorm_bound") {
      c.kind = VerifyCheck::Kind::SupnormBound;
      c.certificate = get_string(j, "certificate", ctx);
      if (!certificate_ids_.count(c.certificate))
        throw std::invalid_argument(ctx + ": '" + c.certificate +
                                    "' is not an earlier certifying task id");
    } else if (kind == "domination" || kind == "domination_zero") {
      c.kind = kind == "domination" ? VerifyCheck::Kind::Domination
                                    : VerifyCheck::Kind::DominationZero;
      c.family = get_string(j, "x", ctx);
      c.family_y = get_string(j, "y", ctx);
      std::tie(c.tail_start, c.horizon) = get_window(j, ctx);
      require_family(c.family, c.tail_start, c.horizon, ctx);
      require_family(c.family_y, c.tail_start, c.horizon, ctx);
      if (!j.contains("sets") || !j["sets"].is_array())
        throw std::invalid_argument(ctx + ": missing 'sets' array");
      for (const auto& s : j["sets"]) {
        if (!s.is_string()) throw std::invalid_argument(ctx + ": set names must be strings");
        set_ref(s.get<std::string>(), ctx);
        c.sets.push_back(s.get<std::string>());
      }
      if (c.kind == VerifyCheck::Kind::Domination) {
        if (!j.contains("grid") || !j["grid"].is_array())
          throw std::invalid_argument(ctx + ": missing 'grid' array");
        for (const auto& cell : j["grid"]) {
          if (!cell.is_array() || cell.size() != 2)
            throw std::invalid_argument(ctx + ": grid cells are [epsilon, delta]");
          c.grid.emplace_back(rational_value(cell[0], ctx + ".grid"),
                              rational_value(cell[1], ctx + ".grid"));
        }
      } else {
        c.tolerance = get_rational(j, "tolerance", ctx);
      }
    } else if (kind == "truncation") {
      c.kind = VerifyCheck::Kind::Truncation;
      c.family = get_string(j, "family", ctx);
      std::tie(c.tail_start, c.horizon) = get_window(j, ctx);
      require_family(c.family, c.tail_start, c.horizon, ctx);
      if (j.contains("budgets")) c.budgets = get_rational_list(j["budgets"], ctx + ".budgets");
      if (!j.contains("sets") || !j["sets"].is_array())
        throw std::invalid_argument(ctx + ": missing 'sets' array");
      for (const auto& s : j["sets"]) {
        if (!s.is_string()) throw std::invalid_argument(ctx + ": set names must be strings");
        set_ref(s.get<std::string>(), ctx);
        c.sets.push_back(s.get<std::string>());
      }
    } else {
      throw std::invalid_argument(ctx + ": unknown check '" + kind + "'");
    }
    return c;
  }

  const std::string& text_;
  Scenario scenario_;
  std::vector<std::string> errors_;
  std::map<std::string, std::size_t> family_lengths_;
  std::set<std::string> partition_names_;
  std::set<std::string> certificate_ids_;
};

}  // namespace detail

inline ScenarioParse parse_scenario(const std::string& text) {
  return detail::ScenarioParser(text).parse();
}

// ---------------------------------------------------------------------------
// Execution.
// ---------------------------------------------------------------------------

struct RunResult {
  OJson report;
  bool all_ok = false;
};

namespace detail {

struct RunEnv {
  std::map<std::string, SeqFamily> families;
  std::map<std::string, Partition> partitions;
  struct StoredCert {
    FineCertificate certificate;
    SeqFamily family;
  };
  std::map<std::string, StoredCert> certificates;
  std::uint64_t seed = 0;
};

class TaskRunner {
 public:
  TaskRunner(const Scenario& s, RunEnv& env) : scenario_(s), env_(env) {}

  // Each operator() returns the task's result object and sets ok_.
  OJson operator()(const EvalTask& t) {
    const auto est = eval_windowed(env_.families.at(t.family), scenario_.sets.at(t.set),
                                   t.tail_start, t.horizon);
    ok_ = true;
    return json_of(est);
  }

  OJson operator()(const CertifyTask& t) {
    const SeqFamily& fam = env_.families.at(t.family);
    OJson result;
    switch (t.strategy) {
      case CertifyStrategy::GivenPartition: {
        FineResult r = is_fine(env_.partitions.at(t.partition), fam, t.epsilon, t.tail_start,
                               t.horizon);
        ok_ = r.fine();
        result = json_of(r);
        if (r.fine()) store_certificate(*r.certificate, fam);
        break;
      }
      case CertifyStrategy::Exhaustive: {
        const auto r = search_exhaustive(fam, t.epsilon, t.blocks, t.tail_start, t.horizon);
        ok_ = r.found();
        result = json_of(r);
        if (r.found()) store_certificate(*r.certificate, fam);
        break;
      }
      case CertifyStrategy::Greedy: {
        const auto r = search_greedy(fam, t.epsilon, t.blocks, t.tail_start, t.horizon);
        ok_ = r.found();
        result = json_of(r);
        if (r.found()) store_certificate(*r.certificate, fam);
        break;
      }
      case CertifyStrategy::Random: {
        const auto r = search_random_coloring(fam, t.epsilon, t.blocks, t.trials,
                                              t.seed.value_or(env_.seed), t.tail_start,
                                              t.horizon);
        ok_ = r.found();
        result = json_of(r);
        if (r.found()) store_certificate(*r.certificate, fam);
        break;
      }
    }
    return result;
  }

  OJson operator()(const MeetTask& t) {
    Partition m = meet(env_.partitions.at(t.left), env_.partitions.at(t.right));
    OJson result = json_of(m);
    if (!t.name.empty()) env_.partitions.insert_or_assign(t.name, std::move(m));
    ok_ = true;
    return result;
  }

  OJson operator()(const SumCertifyTask& t) {
    const SeqFamily& x = env_.families.at(t.family_x);
    const SeqFamily& y = env_.families.at(t.family_y);
    const Rational half = t.epsilon / 2;
    FineResult cx = is_fine(env_.partitions.at(t.partition_x), x, half, t.tail_start, t.horizon);
    FineResult cy = is_fine(env_.partitions.at(t.partition_y), y, half, t.tail_start, t.horizon);
    OJson result;
    result["half_epsilon"] = json_of(half);
    result["x_certificate"] = json_of(cx);
    result["y_certificate"] = json_of(cy);
    if (!cx.fine() || !cy.fine()) {
      ok_ = false;
      return result;
    }
    auto combined = certify_sum(x, *cx.certificate, y, *cy.certificate);
    result["combined"] = json_of(combined.certificate);
    const auto reval = revalidate(combined.certificate, combined.sum);
    result["revalidated"] = reval.ok;
    ok_ = reval.ok;
    store_certificate(combined.certificate, combined.sum);
    return result;
  }

  OJson operator()(const TransferTask& t) {
    const ColumnOperator& op = scenario_.operators.at(t.op);
    const SeqFamily columns = op.columns_family();
    FineResult col_res = is_fine(env_.partitions.at(t.partition), columns, t.delta,
                                 t.columns_tail_start, t.columns_horizon);
    OJson result;
    result["columns_certificate"] = json_of(col_res);
    if (!col_res.fine()) {
      ok_ = false;
      return result;
    }
    const auto transferred = transfer_fineness(op, *col_res.certificate,
                                               env_.families.at(t.family), t.split, t.tail_start);
    result["transfer"] = json_of(transferred);
    const auto reval = revalidate(transferred.certificate, transferred.image);
    result["revalidated"] = reval.ok;
    ok_ = reval.ok;
    store_certificate(transferred.certificate, transferred.image);
    return result;
  }

  OJson operator()(const ClassifyTask& t) {
    const auto ev = classify_chain(env_.families.at(t.family), t.tail_start, t.horizon,
                                   t.tolerance);
    OJson result = json_of(ev);
    ok_ = !t.expect || *t.expect == chain_class_name(ev.label);
    if (t.expect) result["expected"] = *t.expect;
    return result;
  }

  OJson operator()(const GenerateTask& t) {
    const auto spec = generate_t_lambda(t.lambda, t.size_min, t.size_max, t.count_per_size,
                                        t.ground, t.seed.value_or(env_.seed));
    const auto report = check_t_lambda(spec);
    OJson result;
    result["spec"] = json_of(spec);
    result["budget"] = json_of(report);
    if (!t.name.empty())
      env_.families.insert_or_assign(t.name, family_from_sets(spec.sets, t.name));
    ok_ = report.ok;
    return result;
  }

  OJson operator()(const VerifySuiteTask& t) {
    OJson checks = OJson::array();
    bool all = true;
    for (const auto& check : t.checks) {
      OJson cj;
      bool check_ok = false;
      switch (check.kind) {
        case VerifyCheck::Kind::Triangle: {
          const auto report =
              verify_column_triangle(scenario_.operators.at(check.op),
                                     env_.families.at(check.family),
                                     scenario_.sets.at(check.set), check.tail_start,
                                     check.horizon);
          cj["check"] = "triangle";
          cj["report"] = json_of(report);
          check_ok = report.ok;
          break;
        }
        case VerifyCheck::Kind::Split: {
          const auto report = verify_column_split(
              scenario_.operators.at(check.op), env_.families.at(check.family),
              scenario_.sets.at(check.set), check.split, check.tail_start, check.horizon);
          cj["check"] = "split";
          cj["report"] = json_of(report);
          check_ok = report.ok;
          break;
        }
        case VerifyCheck::Kind::SupnormBound: {
          cj["check"] = "supnorm_bound";
          auto it = env_.certificates.find(check.certificate);
          if (it == env_.certificates.end()) {
            cj["error"] = "certificate '" + check.certificate + "' was not produced";
            check_ok = false;
          } else {
            const auto report = verify_supnorm_bound(it->second.family, it->second.certificate);
            cj["report"] = json_of(report);
            check_ok = report.ok;
          }
          break;
        }
        case VerifyCheck::Kind::Domination: {
          const auto report = check_domination(
              env_.families.at(check.family), env_.families.at(check.family_y),
              named_sets(check.sets), check.grid, check.tail_start, check.horizon);
          cj["check"] = "domination";
          cj["report"] = json_of(report);
          check_ok = report.all_hold;
          break;
        }
        case VerifyCheck::Kind::DominationZero: {
          const auto report = check_domination_zero(
              env_.families.at(check.family), env_.families.at(check.family_y),
              named_sets(check.sets), check.tail_start, check.horizon, check.tolerance);
          cj["check"] = "domination_zero";
          cj["report"] = json_of(report);
          check_ok = report.ok;
          break;
        }
        case VerifyCheck::Kind::Truncation: {
          const SeqFamily& fam = env_.families.at(check.family);
          std::vector<Rational> budgets = check.budgets;
          if (budgets.empty())
            for (std::size_t n = 1; n <= fam.size(); ++n)
              budgets.emplace_back(1, BigInt(1) << n);
          const auto trunc = finite_support_approx(fam, budgets);
          Rational max_budget = 0;
          for (std::size_t n = check.tail_start; n <= check.horizon; ++n)
            max_budget = rat_max(max_budget, budgets[n - 1]);
          bool within = true;
          OJson gaps = OJson::array();
          for (const auto& a : named_sets(check.sets)) {
            const Rational before = eval_windowed(fam, a, check.tail_start, check.horizon).value;
            const Rational after =
                eval_windowed(trunc.truncated, a, check.tail_start, check.horizon).value;
            const Rational gap = rat_abs(before - after);
            OJson g;
            g["set"] = a.describe();
            g["gap"] = json_of(gap);
            gaps.push_back(std::move(g));
            within = within && gap <= max_budget;
          }
          cj["check"] = "truncation";
          cj["truncation"] = json_of(trunc);
          cj["max_budget"] = json_of(max_budget);
          cj["gaps"] = std::move(gaps);
          check_ok = within;
          break;
        }
      }
      cj["ok"] = check_ok;
      all = all && check_ok;
      checks.push_back(std::move(cj));
    }
    ok_ = all;
    OJson result;
    result["checks"] = std::move(checks);
    return result;
  }

  bool ok() const { return ok_; }
  void set_task_id(const std::string& id) { task_id_ = id; }

 private:
  std::vector<SubsetSpec> named_sets(const std::vector<std::string>& names) const {
    std::vector<SubsetSpec> out;
    out.reserve(names.size());
    for (const auto& n : names) out.push_back(scenario_.sets.at(n));
    return out;
  }

  void store_certificate(const FineCertificate& cert, const SeqFamily& fam) {
    if (!task_id_.empty())
      env_.certificates.insert_or_assign(task_id_, RunEnv::StoredCert{cert, fam});
  }

  const Scenario& scenario_;
  RunEnv& env_;
  bool ok_ = false;
  std::string task_id_;
};

}  // namespace detail

inline RunResult run_scenario(const Scenario& scenario,
                              std::optional<std::uint64_t> seed_override = std::nullopt) {
  detail::RunEnv env;
  env.families = scenario.families;
  env.partitions = scenario.partitions;
  env.seed = seed_override.value_or(scenario.seed);

  OJson report;
  report["tool"] = std::string(kToolName) + " " + kVersion;
  report["scenario_digest"] = scenario.digest;
  report["seed"] = env.seed;
  OJson tasks = OJson::array();
  bool all_ok = true;

  detail::TaskRunner runner(scenario, env);
  std::size_t index = 0;
  for (const auto& task : scenario.tasks) {
    OJson tj;
    tj["index"] = index++;
    if (!task.id.empty()) tj["id"] = task.id;
    tj["task"] = std::visit(
        [](const auto& body) -> const char* {
          using T = std::decay_t<decltype(body)>;
          if constexpr (std::is_same_v<T, EvalTask>) return "eval";
          if constexpr (std::is_same_v<T, CertifyTask>) return "certify";
          if constexpr (std::is_same_v<T, MeetTask>) return "meet";
          if constexpr (std::is_same_v<T, SumCertifyTask>) return "sum_certify";
          if constexpr (std::is_same_v<T, TransferTask>) return "transfer";
          if constexpr (std::is_same_v<T, ClassifyTask>) return "classify";
          if constexpr (std::is_same_v<T, GenerateTask>) return "generate";
          if constexpr (std::is_same_v<T, VerifySuiteTask>) return "verify_suite";
          return "?";
        },
        task.body);
    runner.set_task_id(task.id);
    tj["result"] = std::visit(runner, task.body);
    tj["ok"] = runner.ok();
    all_ok = all_ok && runner.ok();
    tasks.push_back(std::move(tj));
  }
  report["tasks"] = std::move(tasks);
  report["all_ok"] = all_ok;
  return RunResult{std::move(report), all_ok};
}

// ---------------------------------------------------------------------------
// Emission.
// ---------------------------------------------------------------------------

enum class ReportFormat { Json, Csv };

namespace detail {

inline std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline void csv_row(std::string& out, const OJson& task, const std::string& item,
                    const OJson& window_src, const OJson& value, bool ok) {
  out += task.contains("index") ? std::to_string(task["index"].get<std::size_t>()) : "";
  out += ",";
  out += csv_escape(task.contains("id") ? task["id"].get<std::string>() : "");
  out += "," + task["task"].get<std::string>();
  out += "," + csv_escape(item);
  const bool has_window = window_src.contains("tail_start") && window_src.contains("horizon");
  out += ",";
  if (has_window) out += std::to_string(window_src["tail_start"].get<std::size_t>());
  out += ",";
  if (has_window) out += std::to_string(window_src["horizon"].get<std::size_t>());
  out += ",";
  if (value.is_string()) out += csv_escape(value.get<std::string>());
  else if (!value.is_null()) out += value.dump();
  out += ",";
  out += ok ? "1" : "0";
  out += "\n";
}

inline void csv_certificate_rows(std::string& out, const OJson& task, const OJson& cert, bool ok) {
  for (const auto& block : cert["blocks"]) {
    const std::string item = block["residual"].get<bool>() ? "residual" : "block";
    csv_row(out, task, item, cert, block["value"], ok);
  }
  csv_row(out, task, "epsilon", cert, cert["epsilon"], ok);
}

}  // namespace detail

/// CSV flattening: one row per (task, item, tail_start, horizon, value, ok).
inline std::string emit_report(const OJson& report, ReportFormat format) {
  if (format == ReportFormat::Json) return report.dump(2) + "\n";

  std::string out = "task_index,task_id,task_type,item,tail_start,horizon,value,ok\n";
  for (const auto& task : report["tasks"]) {
    const bool ok = task["ok"].get<bool>();
    const auto& result = task["result"];
    const std::string type = task["task"].get<std::string>();
    if (type == "eval") {
      detail::csv_row(out, task, result["set"].get<std::string>(), result, result["value"], ok);
    } else if (type == "certify") {
      if (result.contains("certificate"))
        detail::csv_certificate_rows(out, task, result["certificate"], ok);
      else if (result.contains("failing_block"))
        detail::csv_row(out, task, "failing_block", OJson::object(),
                        result["failing_block"]["value"], ok);
      else if (result.contains("not_found"))
        detail::csv_row(out, task, "not_found", result["not_found"],
                        result["not_found"]["epsilon"], ok);
    } else if (type == "sum_certify" && result.contains("combined")) {
      detail::csv_certificate_rows(out, task, result["combined"], ok);
    } else if (type == "transfer" && result.contains("transfer")) {
      detail::csv_certificate_rows(out, task, result["transfer"]["certificate"], ok);
      detail::csv_row(out, task, "slack", result["transfer"]["certificate"],
                      result["transfer"]["slack"], ok);
    } else if (type == "classify") {
      detail::csv_row(out, task, "label", result, result["label"], ok);
    } else if (type == "generate") {
      for (const auto& row : result["budget"]["rows"])
        detail::csv_row(out, task,
                        "cardinality " + std::to_string(row["cardinality"].get<std::uint64_t>()),
                        OJson::object(), row["count"], row["within_budget"].get<bool>());
    } else if (type == "verify_suite") {
      for (const auto& check : result["checks"])
        detail::csv_row(out, task, check["check"].get<std::string>(), OJson::object(), OJson(),
                        check["ok"].get<bool>());
    } else if (type == "meet") {
      detail::csv_row(out, task, "blocks", OJson::object(), OJson(result["blocks"].size()), ok);
    }
  }
  return out;
}

}  // namespace epsfine
