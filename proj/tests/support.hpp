// Shared fixtures and brute-force oracles for the test binaries. The oracles
// deliberately avoid the library's own evaluators.
#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "bddlearn/cnf.hpp"
#include "bddlearn/data.hpp"

namespace testing {

using bddlearn::cnf::Formula;
using bddlearn::data::Dataset;

// The 8-example, 4-feature running dataset.
inline Dataset table1() {
  return Dataset::from_rows({{1, 0, 1, 0},
                             {1, 0, 0, 1},
                             {0, 0, 1, 0},
                             {1, 1, 0, 0},
                             {0, 0, 0, 1},
                             {1, 1, 1, 1},
                             {0, 1, 1, 0},
                             {0, 0, 1, 1}},
                            {0, 0, 1, 0, 1, 0, 0, 1});
}

inline Dataset random_dataset(std::mt19937_64 &rng, std::size_t k, std::size_t m,
                              bool consistent = false) {
  std::bernoulli_distribution coin(0.5);
  std::vector<std::vector<std::uint8_t>> rows;
  std::vector<std::uint8_t> labels;
  std::map<std::vector<std::uint8_t>, std::uint8_t> seen;
  while (rows.size() < m) {
    std::vector<std::uint8_t> row(k);
    for (auto &b : row)
      b = coin(rng) ? 1 : 0;
    const std::uint8_t label = coin(rng) ? 1 : 0;
    if (consistent) {
      const auto it = seen.find(row);
      if (it != seen.end() && it->second != label)
        continue;
      seen[row] = label;
    }
    rows.push_back(std::move(row));
    labels.push_back(label);
  }
  return Dataset::from_rows(rows, labels);
}

// Clause as a pair of bitmasks over variables 1..n (bit v-1).
struct MaskClause {
  std::uint32_t pos = 0;
  std::uint32_t neg = 0;
};

inline std::vector<MaskClause> to_masks(const std::vector<bddlearn::cnf::Clause> &cs) {
  std::vector<MaskClause> out;
  for (const auto &c : cs) {
    MaskClause mc;
    for (const auto &l : c)
      (l.negated() ? mc.neg : mc.pos) |= 1U << (l.var() - 1);
    out.push_back(mc);
  }
  return out;
}

inline bool mask_sat(const MaskClause &c, std::uint32_t a) {
  return ((a & c.pos) | (~a & c.neg)) != 0;
}

// Exhaustive SAT: first satisfying assignment in counting order.
inline std::optional<std::uint32_t> brute_sat(const Formula &f) {
  const int n = f.var_count();
  const auto cs = to_masks(f.hard());
  for (std::uint64_t a = 0; a < (std::uint64_t{1} << n); ++a) {
    bool ok = true;
    for (const auto &c : cs)
      if (!mask_sat(c, static_cast<std::uint32_t>(a))) {
        ok = false;
        break;
      }
    if (ok)
      return static_cast<std::uint32_t>(a);
  }
  return std::nullopt;
}

// Exhaustive partial MaxSAT optimum; nullopt when the hard part is UNSAT.
inline std::optional<std::uint64_t> brute_maxsat(const Formula &f) {
  const int n = f.var_count();
  const auto hard = to_masks(f.hard());
  std::vector<bddlearn::cnf::Clause> soft_lits;
  std::vector<std::uint64_t> weights;
  for (const auto &s : f.soft()) {
    soft_lits.push_back(s.lits);
    weights.push_back(s.weight);
  }
  const auto soft = to_masks(soft_lits);
  std::optional<std::uint64_t> best;
  for (std::uint64_t a = 0; a < (std::uint64_t{1} << n); ++a) {
    const auto x = static_cast<std::uint32_t>(a);
    if (!std::all_of(hard.begin(), hard.end(),
                     [&](const MaskClause &c) { return mask_sat(c, x); }))
      continue;
    std::uint64_t cost = 0;
    for (std::size_t i = 0; i < soft.size(); ++i)
      if (!mask_sat(soft[i], x))
        cost += weights[i];
    if (!best || cost < *best)
      best = cost;
  }
  return best;
}

// Cell of example q under an ordering: most significant bit at position 0.
inline std::size_t cell_of(const Dataset &d, std::size_t q,
                           const std::vector<std::size_t> &ordering) {
  std::size_t j = 0;
  for (auto r : ordering)
    j = 2 * j + d.feature(q, r);
  return j;
}

inline void for_each_ordering(std::size_t k, std::size_t h,
                              const std::function<void(const std::vector<std::size_t> &)> &fn) {
  std::vector<std::size_t> cur;
  std::vector<bool> used(k, false);
  std::function<void()> rec = [&] {
    if (cur.size() == h) {
      fn(cur);
      return;
    }
    for (std::size_t r = 0; r < k; ++r) {
      if (used[r])
        continue;
      used[r] = true;
      cur.push_back(r);
      rec();
      cur.pop_back();
      used[r] = false;
    }
  };
  rec();
}

struct OracleResult {
  std::size_t errors = 0;
  // Same minimum without the requirement that the table's halves differ.
  std::size_t errors_any_table = 0;
};

// Minimum misclassifications of an ordered depth-h classifier whose table
// has differing halves. Per ordering each cell takes its majority label;
// when that forced choice is a table of the form (alpha, alpha) the
// cheapest single cell is flipped.
inline OracleResult bdd_optimum(const Dataset &d, std::size_t h) {
  OracleResult best{SIZE_MAX, SIZE_MAX};
  const std::size_t cells = std::size_t{1} << h;
  for_each_ordering(d.num_features(), h, [&](const std::vector<std::size_t> &ord) {
    std::vector<std::size_t> pos(cells, 0), neg(cells, 0);
    for (std::size_t q = 0; q < d.size(); ++q)
      (d.label(q) ? pos : neg)[cell_of(d, q, ord)]++;
    std::size_t base = 0;
    bool forced = true;
    std::string fill(cells, '0');
    std::size_t cheapest = SIZE_MAX;
    for (std::size_t j = 0; j < cells; ++j) {
      base += std::min(pos[j], neg[j]);
      if (pos[j] == neg[j])
        forced = false;
      fill[j] = pos[j] > neg[j] ? '1' : '0';
      const auto gap = pos[j] > neg[j] ? pos[j] - neg[j] : neg[j] - pos[j];
      cheapest = std::min(cheapest, gap);
    }
    std::size_t cost = base;
    if (forced && fill.substr(0, cells / 2) == fill.substr(cells / 2))
      cost += cheapest;
    best.errors = std::min(best.errors, cost);
    best.errors_any_table = std::min(best.errors_any_table, base);
  });
  return best;
}

// A perfect depth-h classifier exists: some ordering projects the data
// without label conflicts, and the table can still be completed so its two
// halves differ (some pair of cells j, j + 2^(h-1) is not forced equal).
inline bool separable(const Dataset &d, std::size_t h) {
  const std::size_t cells = std::size_t{1} << h;
  bool found = false;
  for_each_ordering(d.num_features(), h, [&](const std::vector<std::size_t> &ord) {
    if (found)
      return;
    std::vector<int> label(cells, -1);
    for (std::size_t q = 0; q < d.size(); ++q) {
      auto &l = label[cell_of(d, q, ord)];
      if (l >= 0 && l != d.label(q))
        return;
      l = d.label(q);
    }
    if (h == 0) {
      found = true;
      return;
    }
    for (std::size_t j = 0; j < cells / 2; ++j)
      if (label[j] < 0 || label[j + cells / 2] < 0 || label[j] != label[j + cells / 2]) {
        found = true;
        return;
      }
  });
  return found;
}

// Independent bead enumeration: distinct recursive halves whose halves differ.
inline std::set<std::string> bead_strings(const std::string &t) {
  std::set<std::string> out;
  for (std::size_t len = t.size(); len >= 1; len /= 2)
    for (std::size_t b = 0; b < t.size(); b += len) {
      const auto s = t.substr(b, len);
      if (len == 1 || s.substr(0, len / 2) != s.substr(len / 2))
        out.insert(s);
    }
  return out;
}

inline std::string random_table(std::mt19937_64 &rng, std::size_t h) {
  std::string t(std::size_t{1} << h, '0');
  std::bernoulli_distribution coin(0.5);
  for (auto &c : t)
    c = coin(rng) ? '1' : '0';
  return t;
}

inline Formula random_cnf(std::mt19937_64 &rng, int n, std::size_t m,
                          std::size_t max_len) {
  Formula f(n);
  std::uniform_int_distribution<int> var(1, n);
  std::uniform_int_distribution<std::size_t> len(1, max_len);
  std::bernoulli_distribution coin(0.5);
  for (std::size_t i = 0; i < m; ++i) {
    bddlearn::cnf::Clause c;
    const auto l = len(rng);
    for (std::size_t k = 0; k < l; ++k)
      c.push_back(bddlearn::cnf::Lit(var(rng), coin(rng)));
    f.add_hard(std::move(c));
  }
  return f;
}

} // namespace testing
