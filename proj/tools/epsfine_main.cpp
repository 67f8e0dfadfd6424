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

// Command line front end. The ad-hoc subcommands (eval, certify, transfer,
// generate, verify-suite) are sugar: each one assembles a one-task scenario
// from its flags and feeds it through the same parse/run/emit pipeline as
// `run`, so ad-hoc output and scenario output are byte-compatible.
//
// Exit codes: 0 all tasks passed, 1 some verification task failed,
// 2 usage or parse error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "epsfine/scenario.hpp"
#include "epsfine/version.hpp"

namespace {

using epsfine::OJson;

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string current;
  for (char c : text) {
    if (c == sep) {
      parts.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  parts.push_back(current);
  return parts;
}

std::uint64_t parse_u64(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw CLI::ValidationError(what + ": expected an unsigned integer, got '" + text + "'");
  }
}

OJson index_list(const std::string& csv, const std::string& what) {
  OJson out = OJson::array();
  for (const auto& part : split(csv, ','))
    if (!part.empty()) out.push_back(parse_u64(part, what));
  return out;
}

// "upper_density:N" | "basis:N" | "constant:j:N" | "shifted_random:seed:N:width:maxden"
// | "from_sets:1,2|3,4"
OJson family_spec(const std::string& text) {
  const auto parts = split(text, ':');
  OJson j;
  if (parts[0] == "upper_density" && parts.size() == 2) {
    j["kind"] = "upper_density";
    j["length"] = parse_u64(parts[1], "family length");
  } else if (parts[0] == "basis" && parts.size() == 2) {
    j["kind"] = "basis";
    j["length"] = parse_u64(parts[1], "family length");
  } else if (parts[0] == "constant" && parts.size() == 3) {
    j["kind"] = "constant_basis";
    j["index"] = parse_u64(parts[1], "basis index");
    j["length"] = parse_u64(parts[2], "family length");
  } else if (parts[0] == "shifted_random" && parts.size() == 5) {
    j["kind"] = "shifted_random";
    j["seed"] = parse_u64(parts[1], "seed");
    j["length"] = parse_u64(parts[2], "family length");
    j["width"] = parse_u64(parts[3], "support width");
    j["max_denominator"] = parse_u64(parts[4], "denominator bound");
  } else if (parts[0] == "from_sets" && parts.size() == 2) {
    j["kind"] = "from_sets";
    OJson sets = OJson::array();
    for (const auto& group : split(parts[1], '|')) sets.push_back(index_list(group, "set"));
    j["sets"] = std::move(sets);
  } else {
    throw CLI::ValidationError("unknown family spec '" + text + "'");
  }
  return j;
}

// "evens" | "odds" | "full" | "finite:1,2,3" | "mod:p:r1,r2"
OJson set_spec(const std::string& text) {
  const auto parts = split(text, ':');
  OJson j;
  if (text == "evens") {
    j["kind"] = "periodic";
    j["period"] = 2;
    j["residues"] = {0};
  } else if (text == "odds") {
    j["kind"] = "periodic";
    j["period"] = 2;
    j["residues"] = {1};
  } else if (text == "full") {
    j["kind"] = "full";
  } else if (parts[0] == "finite" && parts.size() == 2) {
    j["kind"] = "finite";
    j["elements"] = index_list(parts[1], "elements");
  } else if (parts[0] == "mod" && parts.size() == 3) {
    j["kind"] = "periodic";
    j["period"] = parse_u64(parts[1], "period");
    j["residues"] = index_list(parts[2], "residues");
  } else {
    throw CLI::ValidationError("unknown set spec '" + text + "'");
  }
  return j;
}

// "mod:k" (ground defaults to the window horizon) | "mod:k:ground" | "single:ground"
OJson partition_spec(const std::string& text, std::uint64_t default_ground) {
  const auto parts = split(text, ':');
  OJson j;
  if (parts[0] == "mod" && (parts.size() == 2 || parts.size() == 3)) {
    j["kind"] = "residues";
    j["modulus"] = parse_u64(parts[1], "modulus");
    j["ground"] = parts.size() == 3 ? parse_u64(parts[2], "ground") : default_ground;
  } else if (parts[0] == "single" && parts.size() <= 2) {
    j["kind"] = "single";
    j["ground"] = parts.size() == 2 ? parse_u64(parts[1], "ground") : default_ground;
  } else {
    throw CLI::ValidationError("unknown partition spec '" + text + "'");
  }
  return j;
}

// "identity:J" | "rank_one:target:J" | "columns=<family spec>"
OJson operator_spec(const std::string& text) {
  OJson j;
  if (text.rfind("columns=", 0) == 0) {
    j["kind"] = "columns_from_family";
    j["family"] = "__op_columns";
    return j;
  }
  const auto parts = split(text, ':');
  if (parts[0] == "identity" && parts.size() == 2) {
    j["kind"] = "identity";
    j["columns"] = parse_u64(parts[1], "columns");
  } else if (parts[0] == "rank_one" && parts.size() == 3) {
    j["kind"] = "rank_one";
    j["target"] = parse_u64(parts[1], "target");
    j["columns"] = parse_u64(parts[2], "columns");
  } else {
    throw CLI::ValidationError("unknown operator spec '" + text + "'");
  }
  return j;
}

std::pair<std::uint64_t, std::uint64_t> window_spec(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 2) throw CLI::ValidationError("window must be 'tail_start:horizon'");
  return {parse_u64(parts[0], "tail start"), parse_u64(parts[1], "horizon")};
}

std::string require_rational(const std::string& text, const std::string& what) {
  if (!epsfine::parse_rational(text))
    throw CLI::ValidationError(what + ": malformed rational '" + text + "'");
  return text;
}

int run_and_emit(const std::string& scenario_text, std::optional<std::uint64_t> seed,
                 const std::string& format, const std::string& out_path) {
  const auto parsed = epsfine::parse_scenario(scenario_text);
  if (!parsed.ok()) {
    for (const auto& error : parsed.errors) std::cerr << "error: " << error << "\n";
    return 2;
  }
  const auto result = epsfine::run_scenario(*parsed.scenario, seed);
  const auto body = epsfine::emit_report(
      result.report,
      format == "csv" ? epsfine::ReportFormat::Csv : epsfine::ReportFormat::Json);
  if (out_path.empty()) {
    std::cout << body;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot write '" << out_path << "'\n";
      return 2;
    }
    out << body;
  }
  return result.all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"windowed submeasures and fineness certificates over exact rationals"};
  app.set_version_flag("--version", std::string(epsfine::kToolName) + " " + epsfine::kVersion);
  app.require_subcommand(1);
  app.fallthrough();

  std::string format = "json";
  std::string out_path;
  std::optional<std::uint64_t> seed;
  app.add_option("--format", format, "report format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--out", out_path, "write the report to a file instead of stdout");
  std::uint64_t seed_value = 0;
  auto* seed_opt = app.add_option("--seed", seed_value, "seed override for seedless tasks");

  // --- run ----------------------------------------------------------------
  std::string scenario_path;
  auto* run = app.add_subcommand("run", "run a scenario file");
  run->add_option("scenario", scenario_path, "scenario JSON file")->required();

  // --- eval ---------------------------------------------------------------
  std::string eval_family, eval_set, eval_window;
  auto* eval = app.add_subcommand("eval", "windowed submeasure of a set under a family");
  eval->add_option("--family", eval_family)->required();
  eval->add_option("--set", eval_set)->required();
  eval->add_option("--window", eval_window, "tail_start:horizon")->required();

  // --- certify --------------------------------------------------------------
  std::string cert_family, cert_partition, cert_strategy, cert_epsilon, cert_window;
  std::uint64_t cert_blocks = 4, cert_trials = 100, cert_seed = 0;
  bool cert_seed_given = false;
  auto* certify = app.add_subcommand("certify", "epsilon-fineness certificate search/validation");
  certify->add_option("--family", cert_family)->required();
  certify->add_option("--partition", cert_partition, "validate this partition");
  certify->add_option("--strategy", cert_strategy, "search instead: exhaustive|greedy|random")
      ->check(CLI::IsMember({"exhaustive", "greedy", "random"}));
  certify->add_option("--epsilon", cert_epsilon)->required();
  certify->add_option("--window", cert_window)->required();
  certify->add_option("--blocks", cert_blocks);
  certify->add_option("--trials", cert_trials);
  certify->add_option("--task-seed", cert_seed)->each([&](const std::string&) {
    cert_seed_given = true;
  });

  // --- transfer -------------------------------------------------------------
  std::string tr_columns, tr_partition, tr_delta, tr_cwindow, tr_x;
  std::uint64_t tr_split = 1, tr_tail = 1;
  auto* transfer =
      app.add_subcommand("transfer", "move a columns certificate to an image family");
  transfer->add_option("--columns", tr_columns, "family spec for the operator columns")
      ->required();
  transfer->add_option("--partition", tr_partition)->required();
  transfer->add_option("--delta", tr_delta, "tolerance certified for the columns")->required();
  transfer->add_option("--columns-window", tr_cwindow)->required();
  transfer->add_option("--x", tr_x, "family spec for the input family")->required();
  transfer->add_option("--split", tr_split)->required();
  transfer->add_option("--tail", tr_tail, "tail start for the image window")->required();

  // --- generate ---------------------------------------------------------------
  std::string gen_lambda = "1", gen_sizes = "4:12";
  std::uint64_t gen_count = 1, gen_ground = 64, gen_seed = 0;
  auto* generate = app.add_subcommand("generate", "draw a size-budgeted set sequence");
  generate->add_option("--lambda", gen_lambda, "budget rate (rational)");
  generate->add_option("--sizes", gen_sizes, "lo:hi cardinality range");
  generate->add_option("--count", gen_count, "sets per cardinality");
  generate->add_option("--ground", gen_ground);
  generate->add_option("--task-seed", gen_seed);

  // --- verify-suite -----------------------------------------------------------
  std::string vs_operator, vs_family, vs_set, vs_window;
  std::uint64_t vs_split = 0;
  auto* verify = app.add_subcommand("verify-suite", "inequality-chain checks for an operator");
  verify->add_option("--operator", vs_operator)->required();
  verify->add_option("--family", vs_family)->required();
  verify->add_option("--set", vs_set)->required();
  verify->add_option("--window", vs_window)->required();
  verify->add_option("--split", vs_split, "also run the split chain at this cut");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (seed_opt->count() > 0) seed = seed_value;

  try {
    if (*run) {
      std::ifstream in(scenario_path, std::ios::binary);
      if (!in) {
        std::cerr << "error: cannot read '" << scenario_path << "'\n";
        return 2;
      }
      std::ostringstream buffer;
      buffer << in.rdbuf();
      return run_and_emit(buffer.str(), seed, format, out_path);
    }

    OJson scenario;
    if (*eval) {
      const auto [n0, horizon] = window_spec(eval_window);
      scenario["families"]["f"] = family_spec(eval_family);
      scenario["sets"]["a"] = set_spec(eval_set);
      scenario["tasks"] = {OJson{{"id", "eval"},
                                 {"task", "eval"},
                                 {"family", "f"},
                                 {"set", "a"},
                                 {"window", {n0, horizon}}}};
    } else if (*certify) {
      const auto [n0, horizon] = window_spec(cert_window);
      if (cert_partition.empty() == cert_strategy.empty())
        throw CLI::ValidationError("certify needs exactly one of --partition / --strategy");
      scenario["families"]["f"] = family_spec(cert_family);
      OJson task{{"id", "certify"},
                 {"task", "certify"},
                 {"family", "f"},
                 {"epsilon", require_rational(cert_epsilon, "epsilon")},
                 {"window", {n0, horizon}}};
      if (!cert_partition.empty()) {
        scenario["partitions"]["p"] = partition_spec(cert_partition, horizon);
        task["partition"] = "p";
      } else {
        task["strategy"] = cert_strategy;
        task["blocks"] = cert_blocks;
        if (cert_strategy == "random") {
          task["trials"] = cert_trials;
          if (cert_seed_given) task["seed"] = cert_seed;
        }
      }
      scenario["tasks"] = {std::move(task)};
    } else if (*transfer) {
      const auto [zn0, zhorizon] = window_spec(tr_cwindow);
      scenario["families"]["columns"] = family_spec(tr_columns);
      scenario["families"]["x"] = family_spec(tr_x);
      scenario["operators"]["T"] = OJson{{"kind", "columns_from_family"}, {"family", "columns"}};
      scenario["partitions"]["p"] = partition_spec(tr_partition, zhorizon);
      scenario["tasks"] = {OJson{{"id", "transfer"},
                                 {"task", "transfer"},
                                 {"operator", "T"},
                                 {"partition", "p"},
                                 {"delta", require_rational(tr_delta, "delta")},
                                 {"columns_window", {zn0, zhorizon}},
                                 {"x", "x"},
                                 {"split", tr_split},
                                 {"tail_start", tr_tail}}};
    } else if (*generate) {
      const auto sizes = window_spec(gen_sizes);
      scenario["tasks"] = {OJson{{"id", "generate"},
                                 {"task", "generate"},
                                 {"lambda", require_rational(gen_lambda, "lambda")},
                                 {"size_min", sizes.first},
                                 {"size_max", sizes.second},
                                 {"count_per_size", gen_count},
                                 {"ground", gen_ground},
                                 {"seed", gen_seed}}};
    } else if (*verify) {
      const auto [n0, horizon] = window_spec(vs_window);
      if (vs_operator.rfind("columns=", 0) == 0)
        scenario["families"]["__op_columns"] = family_spec(vs_operator.substr(8));
      scenario["families"]["f"] = family_spec(vs_family);
      scenario["sets"]["a"] = set_spec(vs_set);
      scenario["operators"]["T"] = operator_spec(vs_operator);
      OJson checks = OJson::array();
      checks.push_back(OJson{{"check", "triangle"},
                             {"operator", "T"},
                             {"family", "f"},
                             {"set", "a"},
                             {"window", {n0, horizon}}});
      if (vs_split > 0)
        checks.push_back(OJson{{"check", "split"},
                               {"operator", "T"},
                               {"family", "f"},
                               {"set", "a"},
                               {"split", vs_split},
                               {"window", {n0, horizon}}});
      scenario["tasks"] = {OJson{{"id", "verify"}, {"task", "verify_suite"}, {"checks", checks}}};
    }
    return run_and_emit(scenario.dump(), seed, format, out_path);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
