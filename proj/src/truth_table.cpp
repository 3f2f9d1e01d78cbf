#include "bddlearn/truth_table.hpp"

#include <algorithm>
#include <stdexcept>

namespace bddlearn::bdd {

FeatureOrdering::FeatureOrdering(std::vector<std::size_t> features)
    : features_(std::move(features)) {
  auto sorted = features_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("feature ordering repeats a feature");
}

FeatureOrdering FeatureOrdering::identity(std::size_t depth) {
  std::vector<std::size_t> f(depth);
  for (std::size_t i = 0; i < depth; ++i)
    f[i] = i;
  return FeatureOrdering(std::move(f));
}

TruthTable::TruthTable(std::string cells, bool allow_unknown)
    : cells_(std::move(cells)) {
  if (!is_power_of_two(cells_.size()))
    throw std::invalid_argument("truth table length " +
                                std::to_string(cells_.size()) +
                                " is not a power of two");
  const char *alphabet = allow_unknown ? "01u" : "01";
  if (cells_.find_first_not_of(alphabet) != std::string::npos)
    throw std::invalid_argument("truth table '" + cells_ +
                                "' has cells outside {" +
                                (allow_unknown ? "0,1,u" : "0,1") + "}");
  while ((std::size_t{1} << order_) < cells_.size())
    ++order_;
}

bool is_bead(std::string_view s) {
  if (!is_power_of_two(s.size()))
    throw std::invalid_argument("bead test needs a power-of-two length");
  return s.size() == 1 || first_half(s) != second_half(s);
}

std::set<std::string> subtables(const TruthTable &t) {
  std::set<std::string> out;
  std::vector<std::string_view> level{t.cells()};
  while (!level.empty()) {
    std::vector<std::string_view> next;
    for (auto s : level) {
      if (!out.insert(std::string(s)).second)
        continue;
      if (s.size() > 1) {
        next.push_back(first_half(s));
        next.push_back(second_half(s));
      }
    }
    level = std::move(next);
  }
  return out;
}

BeadSet beads(const TruthTable &t) {
  BeadSet out;
  std::vector<std::string_view> level{t.cells()};
  for (std::size_t depth = 1; !level.empty(); ++depth) {
    std::vector<std::string_view> next;
    for (auto s : level) {
      if (is_bead(s))
        out.emplace(std::string(s), depth);
      if (s.size() > 1) {
        next.push_back(first_half(s));
        next.push_back(second_half(s));
      }
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    level = std::move(next);
  }
  return out;
}

int cell_bit(std::size_t position, std::size_t cell, std::size_t depth) {
  if (position >= depth || cell >= (std::size_t{1} << depth))
    throw std::out_of_range("cell_bit arguments out of range");
  return static_cast<int>((cell >> (depth - 1 - position)) & 1U);
}

std::size_t cell_index(const FeatureOrdering &ordering,
                       std::span<const std::uint8_t> example) {
  std::size_t j = 0;
  for (auto r : ordering) {
    if (r >= example.size())
      throw std::out_of_range("example lacks an ordered feature");
    j = (j << 1) | (example[r] & 1U);
  }
  return j;
}

std::uint8_t classify_table(const TruthTable &t, const FeatureOrdering &ordering,
                            std::span<const std::uint8_t> example) {
  if (t.order() != ordering.size())
    throw std::invalid_argument("table order does not match ordering length");
  const char cell = t[cell_index(ordering, example)];
  if (cell == 'u')
    throw std::invalid_argument("cannot classify through an unknown cell");
  return cell == '1' ? 1 : 0;
}

} // namespace bddlearn::bdd
