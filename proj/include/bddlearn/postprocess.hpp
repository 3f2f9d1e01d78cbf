#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "bddlearn/bdd.hpp"
#include "bddlearn/data.hpp"
#include "bddlearn/truth_table.hpp"

namespace bddlearn::post {

struct CellCounts {
  std::uint32_t positives = 0;
  std::uint32_t negatives = 0;

  [[nodiscard]] std::uint32_t total() const noexcept {
    return positives + negatives;
  }
  friend bool operator==(const CellCounts &, const CellCounts &) = default;
};

/// Truth table over {0,1,u} with the training traffic of every cell.
/// `solver_cells` keeps the table as the solver returned it.
struct ExtTable {
  std::size_t order = 0;
  std::string cells;
  std::string solver_cells;
  std::vector<CellCounts> counts;

  [[nodiscard]] CellCounts global() const noexcept;
};

enum class BiasPolicy { P, C, S };

[[nodiscard]] std::string_view to_string(BiasPolicy b) noexcept;
/// Accepts "P", "C", "S" in either case.
[[nodiscard]] BiasPolicy parse_bias(std::string_view s);

/// Cells no training example reaches become 'u'.
ExtTable mark_unknown(const bdd::TruthTable &t,
                      const bdd::FeatureOrdering &ordering,
                      const data::Dataset &train);

/// Every 'u' takes the solver's value.
bdd::TruthTable apply_bias_S(const ExtTable &t);

/// Every 'u' takes the majority label of the smallest enclosing aligned
/// block (2, 4, ... cells) that has training traffic. Block ties and the
/// no-traffic case use the global majority; a global tie gives 0.
bdd::TruthTable apply_bias_P(const ExtTable &t);

struct BiasCResult {
  bdd::TruthTable table;
  bdd::Bdd bdd;
  /// Per level (root first): the distinct u-beads after merging. The root
  /// entry is the table as marked.
  std::vector<std::vector<std::string>> level_beads;
  /// The greedy merge gave a larger diagram than the solver's own fill, so
  /// the solver's fill was kept.
  bool solver_fill = false;
};

/// Merges u-compatible subtables level by level, then resolves leftover
/// 'u' cells with bias P and builds the diagram. Never larger than the
/// diagram of the bias-S table.
BiasCResult apply_bias_C(const ExtTable &t,
                         const bdd::FeatureOrdering &ordering);

/// Two strings agree wherever neither holds 'u'.
[[nodiscard]] bool u_compatible(std::string_view a, std::string_view b);
/// u-wildcard bead test: single cells, or halves that are not u-compatible.
[[nodiscard]] bool is_u_bead(std::string_view s);

bdd::TruthTable apply_bias(const ExtTable &t, BiasPolicy policy,
                           const bdd::FeatureOrdering &ordering);

} // namespace bddlearn::post
