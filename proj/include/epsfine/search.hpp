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
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "epsfine/partition.hpp"
#include "epsfine/rng.hpp"

namespace epsfine {

namespace detail {

// Per-element value columns |x_n(j)| over the search window, plus the sorted
// effective support. Assigning element j to a block adds its column to the
// block's per-n load; a block's value is the max of its load over the window.
struct SearchGrid {
  std::vector<std::uint64_t> elems;        // effective support, sorted
  std::vector<std::vector<Rational>> cols; // cols[i][n - n0]
  std::uint64_t ground = 1;
  std::size_t n0 = 1;
  std::size_t horizon = 1;

  std::size_t window() const { return horizon - n0 + 1; }

  static SearchGrid build(const SeqFamily& x, std::size_t n0, std::size_t horizon) {
    SearchGrid g;
    g.elems = x.support_union(n0, horizon);
    g.ground = std::max<std::uint64_t>(1, x.ground_bound());
    g.n0 = n0;
    g.horizon = horizon;
    g.cols.reserve(g.elems.size());
    for (auto j : g.elems) {
      std::vector<Rational> col;
      col.reserve(g.window());
      for (std::size_t n = n0; n <= horizon; ++n) col.push_back(x.abs_value_at(n, j));
      g.cols.push_back(std::move(col));
    }
    return g;
  }

  /// Total weight Σ_n |x_n(j)| per element, computed with one pass per
  /// element family rather than per (element, n) pair for initial segments.
  std::vector<Rational> total_weights(const SeqFamily& x) const {
    std::vector<Rational> weight(elems.size(), Rational(0));
    auto pos = [&](std::uint64_t j) {
      return static_cast<std::size_t>(
          std::lower_bound(elems.begin(), elems.end(), j) - elems.begin());
    };
    std::vector<std::pair<std::uint64_t, Rational>> ranges;  // (hi, |coeff|)
    for (std::size_t n = n0; n <= horizon; ++n) {
      x.visit_element(
          n,
          [&](std::uint64_t hi, const Rational& c) { ranges.emplace_back(hi, rat_abs(c)); },
          [&](const std::vector<std::uint64_t>& list, const Rational& c) {
            const Rational a = rat_abs(c);
            for (auto j : list) weight[pos(j)] += a;
          },
          [&](const SparseVec& v) {
            for (const auto& [j, val] : v.entries()) weight[pos(j)] += rat_abs(val);
          });
    }
    if (!ranges.empty()) {
      std::sort(ranges.begin(), ranges.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      std::vector<Rational> suffix(ranges.size() + 1, Rational(0));
      for (std::size_t i = ranges.size(); i-- > 0;)
        suffix[i] = suffix[i + 1] + ranges[i].second;
      for (std::size_t i = 0; i < elems.size(); ++i) {
        const auto it = std::lower_bound(
            ranges.begin(), ranges.end(), elems[i],
            [](const auto& r, std::uint64_t j) { return r.first < j; });
        weight[i] += suffix[static_cast<std::size_t>(it - ranges.begin())];
      }
    }
    return weight;
  }
};

}  // namespace detail

struct SearchLimits {
  std::size_t max_ground = 14;
  std::size_t max_blocks = 4;
};

struct NotFoundProof {
  Rational epsilon;
  std::size_t max_blocks = 0;
  std::size_t tail_start = 0;
  std::size_t horizon = 0;
  std::vector<std::uint64_t> ground_elements;
  std::uint64_t nodes_visited = 0;
  std::string statement;
};

struct ExhaustiveResult {
  std::optional<FineCertificate> certificate;
  std::optional<NotFoundProof> not_found;
  std::uint64_t nodes_visited = 0;

  bool found() const { return certificate.has_value(); }
};

/**
 * Complete search over all partitions of the effective support into at most
 * k blocks (canonical first-occurrence labeling kills the block symmetry;
 * block values only grow as elements join, so branches whose partial block
 * already exceeds epsilon are pruned soundly). Either returns a validated
 * certificate or an exhaustiveness statement that none exists. Refuses
 * instances beyond the configured limits.
 */
inline ExhaustiveResult search_exhaustive(const SeqFamily& x, const Rational& epsilon,
                                          std::size_t max_blocks, std::size_t n0,
                                          std::size_t horizon, SearchLimits limits = {}) {
  x.check_window(n0, horizon);
  if (max_blocks == 0) throw std::invalid_argument("search_exhaustive: need k >= 1");
  auto grid = detail::SearchGrid::build(x, n0, horizon);
  if (grid.elems.size() > limits.max_ground)
    throw std::invalid_argument("search_exhaustive: effective support " +
                                std::to_string(grid.elems.size()) + " exceeds limit " +
                                std::to_string(limits.max_ground));
  if (max_blocks > limits.max_blocks)
    throw std::invalid_argument("search_exhaustive: block count exceeds limit");

  ExhaustiveResult result;
  const std::size_t m = grid.elems.size();
  const std::size_t win = grid.window();

  if (m == 0) {
    FineResult r = is_fine(Partition::single(grid.ground), x, epsilon, n0, horizon);
    if (r.fine()) {
      result.certificate = std::move(r.certificate);
    } else {
      result.not_found = NotFoundProof{
          epsilon, max_blocks, n0, horizon, {}, 0,
          "family carries no mass on the window, yet epsilon < 0 leaves every block infeasible"};
    }
    return result;
  }

  std::vector<std::vector<Rational>> sums(max_blocks, std::vector<Rational>(win, Rational(0)));
  std::vector<std::size_t> assign(m, 0);
  std::size_t used = 0;
  std::uint64_t nodes = 0;
  bool found = false;

  std::function<void(std::size_t)> dfs = [&](std::size_t depth) {
    if (found) return;
    if (depth == m) {
      found = true;
      return;
    }
    const auto& col = grid.cols[depth];
    const std::size_t reachable = std::min(used + 1, max_blocks);
    for (std::size_t b = 0; b < reachable && !found; ++b) {
      ++nodes;
      bool feasible = true;
      for (std::size_t i = 0; i < win && feasible; ++i)
        feasible = sums[b][i] + col[i] <= epsilon;
      if (!feasible) continue;
      for (std::size_t i = 0; i < win; ++i) sums[b][i] += col[i];
      const bool opened = b == used;
      if (opened) ++used;
      assign[depth] = b;
      dfs(depth + 1);
      if (!found) {
        if (opened) --used;
        for (std::size_t i = 0; i < win; ++i) sums[b][i] -= col[i];
      }
    }
  };
  dfs(0);
  result.nodes_visited = nodes;

  if (!found) {
    NotFoundProof proof;
    proof.epsilon = epsilon;
    proof.max_blocks = max_blocks;
    proof.tail_start = n0;
    proof.horizon = horizon;
    proof.ground_elements = grid.elems;
    proof.nodes_visited = nodes;
    proof.statement = "no partition of the " + std::to_string(m) +
                      "-element effective support into at most " + std::to_string(max_blocks) +
                      " blocks keeps every windowed block value within " +
                      format_rational(epsilon);
    result.not_found = std::move(proof);
    return result;
  }

  Partition p = Partition::from_coloring(grid.ground, grid.elems, assign, max_blocks);
  FineResult r = is_fine(p, x, epsilon, n0, horizon);
  if (!r.fine())
    throw std::logic_error("search_exhaustive: found assignment failed revalidation");
  result.certificate = std::move(r.certificate);
  return result;
}

enum class GreedyOrdering { TotalWeightDescending, IndexAscending };

struct GreedyResult {
  std::optional<FineCertificate> certificate;
  Rational achieved_max;                  // max block value of the built partition
  std::optional<Partition> partition;
  std::vector<std::uint64_t> placement_order;

  bool found() const { return certificate.has_value(); }
};

/**
 * Min-max greedy: place elements one at a time (heaviest total weight first,
 * ties by index) into the block that minimizes the resulting maximum block
 * value; ties go to the lowest block index. The built partition is validated
 * with is_fine; on failure the achieved maximum is reported.
 */
inline GreedyResult search_greedy(const SeqFamily& x, const Rational& epsilon,
                                  std::size_t blocks, std::size_t n0, std::size_t horizon,
                                  GreedyOrdering ordering = GreedyOrdering::TotalWeightDescending) {
  x.check_window(n0, horizon);
  if (blocks == 0) throw std::invalid_argument("search_greedy: need k >= 1");
  auto grid = detail::SearchGrid::build(x, n0, horizon);
  const std::size_t m = grid.elems.size();
  const std::size_t win = grid.window();

  std::vector<std::size_t> order(m);
  for (std::size_t i = 0; i < m; ++i) order[i] = i;
  if (ordering == GreedyOrdering::TotalWeightDescending && m > 0) {
    const std::vector<Rational> weight = grid.total_weights(x);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (weight[a] != weight[b]) return weight[a] > weight[b];
      return grid.elems[a] < grid.elems[b];
    });
  }

  std::vector<std::vector<Rational>> sums(blocks, std::vector<Rational>(win, Rational(0)));
  std::vector<Rational> block_value(blocks, Rational(0));
  std::vector<std::size_t> color(m, 0);
  for (std::size_t oi = 0; oi < m; ++oi) {
    const std::size_t i = order[oi];
    const auto& col = grid.cols[i];
    std::size_t best_block = 0;
    Rational best_global;
    Rational best_candidate;
    for (std::size_t b = 0; b < blocks; ++b) {
      Rational cand = 0;
      for (std::size_t w = 0; w < win; ++w) cand = rat_max(cand, Rational(sums[b][w] + col[w]));
      Rational global = cand;
      for (std::size_t o = 0; o < blocks; ++o)
        if (o != b) global = rat_max(global, block_value[o]);
      if (b == 0 || global < best_global) {
        best_block = b;
        best_global = std::move(global);
        best_candidate = std::move(cand);
      }
    }
    for (std::size_t w = 0; w < win; ++w) sums[best_block][w] += col[w];
    block_value[best_block] = std::move(best_candidate);
    color[i] = best_block;
  }

  GreedyResult result;
  result.achieved_max = 0;
  for (const auto& v : block_value) result.achieved_max = rat_max(result.achieved_max, v);
  result.placement_order.reserve(m);
  for (auto oi : order) result.placement_order.push_back(grid.elems[oi]);
  Partition p = Partition::from_coloring(grid.ground, grid.elems, color, std::max<std::size_t>(blocks, 1));
  FineResult r = is_fine(p, x, epsilon, n0, horizon);
  result.partition = std::move(p);
  if (r.fine()) result.certificate = std::move(r.certificate);
  return result;
}

struct RandomTrialStat {
  std::size_t trial = 0;  // 1-based
  Rational achieved_max;
};

struct RandomSearchResult {
  std::optional<FineCertificate> certificate;
  std::size_t success_trial = 0;  // 0 when no trial succeeded
  std::vector<RandomTrialStat> trial_stats;
  std::uint64_t seed = 0;
  std::size_t trials_requested = 0;

  bool found() const { return certificate.has_value(); }
};

/**
 * Independent uniform colorings of the effective support, one per trial; the
 * first coloring whose partition is epsilon-fine is validated and returned.
 * Deterministic in the seed.
 */
inline RandomSearchResult search_random_coloring(const SeqFamily& x, const Rational& epsilon,
                                                 std::size_t blocks, std::size_t trials,
                                                 std::uint64_t seed, std::size_t n0,
                                                 std::size_t horizon) {
  x.check_window(n0, horizon);
  if (blocks == 0) throw std::invalid_argument("search_random_coloring: need k >= 1");
  if (trials == 0) throw std::invalid_argument("search_random_coloring: need trials >= 1");
  auto grid = detail::SearchGrid::build(x, n0, horizon);
  const std::size_t m = grid.elems.size();
  const std::size_t win = grid.window();

  RandomSearchResult result;
  result.seed = seed;
  result.trials_requested = trials;
  Rng rng(seed);

  std::vector<std::vector<Rational>> sums(blocks);
  std::vector<std::size_t> color(m, 0);
  for (std::size_t trial = 1; trial <= trials; ++trial) {
    for (auto& s : sums) s.assign(win, Rational(0));
    for (std::size_t i = 0; i < m; ++i) {
      color[i] = static_cast<std::size_t>(rng.below(blocks));
      const auto& col = grid.cols[i];
      auto& s = sums[color[i]];
      for (std::size_t w = 0; w < win; ++w) s[w] += col[w];
    }
    Rational achieved = 0;
    for (const auto& s : sums)
      for (const auto& v : s) achieved = rat_max(achieved, v);
    result.trial_stats.push_back({trial, achieved});
    if (achieved <= epsilon) {
      Partition p = Partition::from_coloring(grid.ground, grid.elems, color, blocks);
      FineResult r = is_fine(p, x, epsilon, n0, horizon);
      if (!r.fine())
        throw std::logic_error("search_random_coloring: trial passed screening but failed is_fine");
      result.certificate = std::move(r.certificate);
      result.success_trial = trial;
      return result;
    }
  }
  return result;
}

}  // namespace epsfine
