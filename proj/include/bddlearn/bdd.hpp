#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "bddlearn/truth_table.hpp"

namespace bddlearn::bdd {

enum class Direction : std::uint8_t { left, right };

inline constexpr int sink_one = -1;
inline constexpr int sink_zero = -2;

/// Branch nodes have ids >= 1 and test ordering[position]; the two sinks use
/// the reserved ids -1 (value 1) and -2 (value 0).
struct Node {
  int id = 0;
  std::size_t position = 0;

  [[nodiscard]] bool is_sink() const noexcept { return id < 0; }
  [[nodiscard]] std::uint8_t sink_value() const noexcept {
    return id == sink_one ? 1 : 0;
  }
  friend bool operator==(const Node &, const Node &) = default;
};

struct Edge {
  int parent = 0;
  int child = 0;
  Direction direction = Direction::left;

  friend bool operator==(const Edge &, const Edge &) = default;
};

/// Ordered, reduced binary decision diagram over a feature ordering.
///
/// Left edges are taken when the tested feature is 0, right edges when it
/// is 1. Only sinks that are reachable are listed in `nodes()`.
class Bdd {
public:
  Bdd() = default;
  Bdd(std::vector<Node> nodes, std::vector<Edge> edges, int root,
      FeatureOrdering ordering);

  [[nodiscard]] const std::vector<Node> &nodes() const noexcept { return nodes_; }
  [[nodiscard]] const std::vector<Edge> &edges() const noexcept { return edges_; }
  [[nodiscard]] int root() const noexcept { return root_; }
  [[nodiscard]] const FeatureOrdering &ordering() const noexcept {
    return ordering_;
  }

  [[nodiscard]] const Node &node(int id) const;
  [[nodiscard]] bool has_node(int id) const noexcept;
  /// Child along `dir`; throws std::logic_error when the edge is missing.
  [[nodiscard]] int child(int id, Direction dir) const;

  [[nodiscard]] std::size_t branch_count() const noexcept;
  /// Branch nodes plus sinks in use.
  [[nodiscard]] std::size_t node_count() const noexcept { return nodes_.size(); }

  friend bool operator==(const Bdd &, const Bdd &) = default;

private:
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  int root_ = sink_zero;
  FeatureOrdering ordering_;
};

/// Breadth-first construction from the beads of `t`; branch node ids are
/// assigned in order of first appearance.
Bdd gen_bdd(const TruthTable &t, const FeatureOrdering &ordering);

/// Root-to-sink walk over a full dataset row.
std::uint8_t classify(const Bdd &b, std::span<const std::uint8_t> example);

/// Structural problems found in `b`; empty when it is a well-formed ordered
/// and reduced diagram.
std::vector<std::string> audit(const Bdd &b);

/// Graphviz rendering: dashed edges go left (0), solid edges go right (1).
/// Branch labels use `feature_names[ordering[position]]` when provided.
void export_dot(const Bdd &b, std::ostream &out,
                const std::vector<std::string> &feature_names = {});

} // namespace bddlearn::bdd
