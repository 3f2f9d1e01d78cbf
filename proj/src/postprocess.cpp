#include "bddlearn/postprocess.hpp"

#include <numeric>
#include <set>
#include <stdexcept>

namespace bddlearn::post {

CellCounts ExtTable::global() const noexcept {
  CellCounts g;
  for (const auto &c : counts) {
    g.positives += c.positives;
    g.negatives += c.negatives;
  }
  return g;
}

std::string_view to_string(BiasPolicy b) noexcept {
  switch (b) {
  case BiasPolicy::P:
    return "P";
  case BiasPolicy::C:
    return "C";
  case BiasPolicy::S:
    return "S";
  }
  return "S";
}

BiasPolicy parse_bias(std::string_view s) {
  if (s == "P" || s == "p")
    return BiasPolicy::P;
  if (s == "C" || s == "c")
    return BiasPolicy::C;
  if (s == "S" || s == "s")
    return BiasPolicy::S;
  throw std::invalid_argument("unknown bias '" + std::string(s) +
                              "' (expected P, C or S)");
}

ExtTable mark_unknown(const bdd::TruthTable &t,
                      const bdd::FeatureOrdering &ordering,
                      const data::Dataset &train) {
  if (ordering.size() != t.order())
    throw std::invalid_argument("ordering length differs from table order");
  for (auto r : ordering)
    if (r >= train.num_features() && !train.empty())
      throw std::invalid_argument("ordering names a feature the dataset lacks");

  ExtTable ext;
  ext.order = t.order();
  ext.solver_cells = t.cells();
  ext.counts.assign(t.size(), {});
  for (std::size_t q = 0; q < train.size(); ++q) {
    auto &c = ext.counts[bdd::cell_index(ordering, train.row(q))];
    if (train.label(q) != 0)
      ++c.positives;
    else
      ++c.negatives;
  }
  ext.cells = t.cells();
  for (std::size_t j = 0; j < ext.cells.size(); ++j)
    if (ext.counts[j].total() == 0)
      ext.cells[j] = 'u';
  return ext;
}

bdd::TruthTable apply_bias_S(const ExtTable &t) {
  std::string cells = t.cells;
  for (std::size_t j = 0; j < cells.size(); ++j)
    if (cells[j] == 'u')
      cells[j] = t.solver_cells[j];
  return bdd::TruthTable(std::move(cells));
}

namespace {

// 1, 0, or -1 for a tie.
int majority(const CellCounts &c) {
  if (c.positives > c.negatives)
    return 1;
  if (c.negatives > c.positives)
    return 0;
  return -1;
}

char fill_from_blocks(const ExtTable &t, std::size_t j, char global) {
  for (std::size_t size = 2; size <= t.counts.size(); size *= 2) {
    const std::size_t start = j & ~(size - 1);
    CellCounts block;
    for (std::size_t k = start; k < start + size; ++k) {
      block.positives += t.counts[k].positives;
      block.negatives += t.counts[k].negatives;
    }
    if (block.total() == 0)
      continue;
    const int m = majority(block);
    return m < 0 ? global : static_cast<char>('0' + m);
  }
  return global;
}

std::string fill_p(const ExtTable &t, std::string cells) {
  const int g = majority(t.global());
  const char global = g == 1 ? '1' : '0';
  for (std::size_t j = 0; j < cells.size(); ++j)
    if (cells[j] == 'u')
      cells[j] = fill_from_blocks(t, j, global);
  return cells;
}

std::string unify(std::string_view a, std::string_view b) {
  std::string out(a);
  for (std::size_t i = 0; i < out.size(); ++i)
    if (out[i] == 'u')
      out[i] = b[i];
  return out;
}

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent[x] != x)
      x = parent[x] = parent[parent[x]];
    return x;
  }
};

} // namespace

bdd::TruthTable apply_bias_P(const ExtTable &t) {
  return bdd::TruthTable(fill_p(t, t.cells));
}

bool u_compatible(std::string_view a, std::string_view b) {
  if (a.size() != b.size())
    return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != 'u' && b[i] != 'u' && a[i] != b[i])
      return false;
  return true;
}

bool is_u_bead(std::string_view s) {
  if (!bdd::is_power_of_two(s.size()))
    throw std::invalid_argument("length is not a power of two");
  return s.size() == 1 || !u_compatible(bdd::first_half(s), bdd::second_half(s));
}

BiasCResult apply_bias_C(const ExtTable &t,
                         const bdd::FeatureOrdering &ordering) {
  std::string cells = t.cells;
  const std::size_t n = cells.size();

  // Level l has 2^l subtables; match the 2^(l+1) subtables one level down.
  for (std::size_t l = 0; l + 1 < t.order; ++l) {
    const std::size_t count = std::size_t{2} << l;
    const std::size_t len = n / count;
    std::vector<std::string> value(count);
    for (std::size_t b = 0; b < count; ++b)
      value[b] = cells.substr(b * len, len);

    UnionFind uf(count);
    for (std::size_t a = 0; a < count; ++a)
      for (std::size_t b = a + 1; b < count; ++b) {
        const auto ra = uf.find(a);
        const auto rb = uf.find(b);
        if (ra == rb || !u_compatible(value[ra], value[rb]))
          continue;
        const auto root = std::min(ra, rb);
        const auto other = std::max(ra, rb);
        value[root] = unify(value[root], value[other]);
        uf.parent[other] = root;
      }
    for (std::size_t b = 0; b < count; ++b)
      cells.replace(b * len, len, value[uf.find(b)]);
  }

  BiasCResult result;
  result.table = bdd::TruthTable(fill_p(t, std::move(cells)));
  result.bdd = bdd::gen_bdd(result.table, ordering);

  // Greedy matching can break sharing the solver's fill had.
  auto solver = apply_bias_S(t);
  auto solver_bdd = bdd::gen_bdd(solver, ordering);
  if (solver_bdd.node_count() < result.bdd.node_count()) {
    result.table = std::move(solver);
    result.bdd = std::move(solver_bdd);
    result.solver_fill = true;
  }

  result.level_beads.push_back({t.cells});
  const std::string &final_cells = result.table.cells();
  for (std::size_t len = n / 2; len >= 1; len /= 2) {
    std::set<std::string> level;
    for (std::size_t b = 0; b < n; b += len) {
      auto s = final_cells.substr(b, len);
      if (bdd::is_bead(s))
        level.insert(std::move(s));
    }
    result.level_beads.emplace_back(level.begin(), level.end());
  }
  return result;
}

bdd::TruthTable apply_bias(const ExtTable &t, BiasPolicy policy,
                           const bdd::FeatureOrdering &ordering) {
  switch (policy) {
  case BiasPolicy::P:
    return apply_bias_P(t);
  case BiasPolicy::C:
    return apply_bias_C(t, ordering).table;
  case BiasPolicy::S:
    break;
  }
  return apply_bias_S(t);
}

} // namespace bddlearn::post
