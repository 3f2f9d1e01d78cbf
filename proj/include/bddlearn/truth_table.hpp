#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bddlearn::bdd {

/// Sequence of distinct dataset feature indices (0-based) bound to the
/// levels of a diagram; position 0 is tested at the root.
class FeatureOrdering {
public:
  FeatureOrdering() = default;
  explicit FeatureOrdering(std::vector<std::size_t> features);

  /// 0, 1, ..., depth-1
  static FeatureOrdering identity(std::size_t depth);

  [[nodiscard]] std::size_t size() const noexcept { return features_.size(); }
  [[nodiscard]] std::size_t operator[](std::size_t position) const {
    return features_[position];
  }
  [[nodiscard]] const std::vector<std::size_t> &features() const noexcept {
    return features_;
  }
  [[nodiscard]] auto begin() const noexcept { return features_.begin(); }
  [[nodiscard]] auto end() const noexcept { return features_.end(); }

  friend bool operator==(const FeatureOrdering &,
                         const FeatureOrdering &) = default;

private:
  std::vector<std::size_t> features_;
};

/// A string of 2^order cells over {0,1}, or over {0,1,u} when unknown cells
/// are allowed.
class TruthTable {
public:
  TruthTable() : cells_("0") {}
  explicit TruthTable(std::string cells, bool allow_unknown = false);

  [[nodiscard]] std::size_t order() const noexcept { return order_; }
  [[nodiscard]] std::size_t size() const noexcept { return cells_.size(); }
  [[nodiscard]] const std::string &cells() const noexcept { return cells_; }
  [[nodiscard]] char operator[](std::size_t cell) const { return cells_[cell]; }
  [[nodiscard]] bool has_unknown() const noexcept {
    return cells_.find('u') != std::string::npos;
  }

  friend bool operator==(const TruthTable &, const TruthTable &) = default;

private:
  std::string cells_;
  std::size_t order_ = 0;
};

[[nodiscard]] constexpr bool is_power_of_two(std::size_t n) noexcept {
  return n != 0 && (n & (n - 1)) == 0;
}

[[nodiscard]] inline std::string_view first_half(std::string_view s) {
  return s.substr(0, s.size() / 2);
}
[[nodiscard]] inline std::string_view second_half(std::string_view s) {
  return s.substr(s.size() / 2);
}
[[nodiscard]] inline bool leads_to_zero(std::string_view s) {
  return s.find_first_not_of('0') == std::string_view::npos;
}
[[nodiscard]] inline bool leads_to_one(std::string_view s) {
  return s.find_first_not_of('1') == std::string_view::npos;
}

/// True iff the two halves differ, or the string is a single cell.
/// Throws std::invalid_argument when the length is not a power of two.
bool is_bead(std::string_view s);

/// The table itself and all of its recursive halves.
std::set<std::string> subtables(const TruthTable &t);

/// Bead string -> shallowest level (root = 1) at which it occurs.
using BeadSet = std::map<std::string, std::size_t>;
BeadSet beads(const TruthTable &t);

/// Value of the feature at `position` (0-based) for the assignment that
/// selects `cell` (0-based) of a table of order `depth`.
[[nodiscard]] int cell_bit(std::size_t position, std::size_t cell,
                           std::size_t depth);

/// Table cell reached by an example: sum of bit(ordering[i]) * 2^(H-1-i).
[[nodiscard]] std::size_t cell_index(const FeatureOrdering &ordering,
                                     std::span<const std::uint8_t> example);

/// Looks up the example's cell; the table must not contain 'u'.
[[nodiscard]] std::uint8_t classify_table(const TruthTable &t,
                                          const FeatureOrdering &ordering,
                                          std::span<const std::uint8_t> example);

} // namespace bddlearn::bdd
