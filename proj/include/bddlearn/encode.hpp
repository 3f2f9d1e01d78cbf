#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "bddlearn/cnf.hpp"
#include "bddlearn/data.hpp"
#include "bddlearn/truth_table.hpp"

namespace bddlearn::encode {

enum class Variant { bdd1, bdd2, maxsat };

/// Ties solver variables to their meaning.
///
/// - `feature_at(r, i)`: feature r is placed at ordering position i
/// - `cell(j)`: truth-table cell j is 1
/// - `feature_value(i, q)`: the feature at position i is 1 on example q
///   (absent for BDD1)
///
/// All indices are 0-based. Semantic variables are numbered first (a, then
/// c, then d); auxiliaries follow.
class EncodingContext {
public:
  EncodingContext() = default;
  EncodingContext(Variant variant, std::size_t depth, std::size_t features,
                  std::size_t examples);

  [[nodiscard]] Variant variant() const noexcept { return variant_; }
  [[nodiscard]] std::size_t depth() const noexcept { return depth_; }
  [[nodiscard]] std::size_t num_features() const noexcept { return features_; }
  [[nodiscard]] std::size_t num_examples() const noexcept { return examples_; }
  [[nodiscard]] std::size_t num_cells() const noexcept {
    return std::size_t{1} << depth_;
  }
  [[nodiscard]] bool has_feature_values() const noexcept {
    return variant_ != Variant::bdd1;
  }
  /// Number of semantic (non-auxiliary) variables.
  [[nodiscard]] cnf::Var semantic_vars() const noexcept;

  [[nodiscard]] cnf::Var feature_at(std::size_t feature,
                                    std::size_t position) const;
  [[nodiscard]] cnf::Var cell(std::size_t j) const;
  [[nodiscard]] cnf::Var feature_value(std::size_t position,
                                       std::size_t example) const;

  friend bool operator==(const EncodingContext &,
                         const EncodingContext &) = default;

private:
  Variant variant_ = Variant::bdd2;
  std::size_t depth_ = 0;
  std::size_t features_ = 0;
  std::size_t examples_ = 0;
};

struct Encoding {
  cnf::Formula formula;
  EncodingContext context;
};

/// Largest supported depth (2^H cells must stay addressable).
inline constexpr std::size_t max_depth = 20;

/// Perfect-classification encoding with direct classification clauses.
/// Throws InconsistentDataError when two examples conflict.
Encoding encode_bdd1(const data::Dataset &d, std::size_t depth);

/// Perfect-classification encoding through per-example feature-value
/// variables; every classification clause has depth+1 literals.
Encoding encode_bdd2(const data::Dataset &d, std::size_t depth);

/// Partial MaxSAT: ordering, bead and feature-value constraints are hard;
/// each example's classification clauses are soft with that example's
/// weight (1 when `weights` is empty).
Encoding encode_maxsat(const data::Dataset &d, std::size_t depth,
                       std::span<const std::uint64_t> weights = {});

struct Decoded {
  bdd::FeatureOrdering ordering;
  bdd::TruthTable table;
};

/// Reads the ordering and truth table out of a solver model. Throws
/// std::runtime_error when a position has zero or several features.
Decoded decode(const cnf::Model &model, const EncodingContext &ctx);

} // namespace bddlearn::encode
