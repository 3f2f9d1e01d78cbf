#include "bddlearn/bdd.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <stdexcept>
#include <string_view>
#include <tuple>
#include <unordered_map>

namespace bddlearn::bdd {

Bdd::Bdd(std::vector<Node> nodes, std::vector<Edge> edges, int root,
         FeatureOrdering ordering)
    : nodes_(std::move(nodes)), edges_(std::move(edges)), root_(root),
      ordering_(std::move(ordering)) {
  if (!has_node(root_))
    throw std::invalid_argument("root is not a node of the diagram");
}

const Node &Bdd::node(int id) const {
  const auto it = std::find_if(nodes_.begin(), nodes_.end(),
                               [&](const Node &n) { return n.id == id; });
  if (it == nodes_.end())
    throw std::out_of_range("no node with id " + std::to_string(id));
  return *it;
}

bool Bdd::has_node(int id) const noexcept {
  return std::any_of(nodes_.begin(), nodes_.end(),
                     [&](const Node &n) { return n.id == id; });
}

int Bdd::child(int id, Direction dir) const {
  for (const auto &e : edges_)
    if (e.parent == id && e.direction == dir)
      return e.child;
  throw std::logic_error("node " + std::to_string(id) + " has no " +
                         (dir == Direction::left ? "left" : "right") + " edge");
}

std::size_t Bdd::branch_count() const noexcept {
  return static_cast<std::size_t>(std::count_if(
      nodes_.begin(), nodes_.end(), [](const Node &n) { return !n.is_sink(); }));
}

Bdd gen_bdd(const TruthTable &t, const FeatureOrdering &ordering) {
  if (t.order() != ordering.size())
    throw std::invalid_argument("table of order " + std::to_string(t.order()) +
                                " needs an ordering of the same length, got " +
                                std::to_string(ordering.size()));
  if (t.has_unknown())
    throw std::invalid_argument("gen_bdd needs a table over {0,1}");

  struct Item {
    std::string_view s;
    int parent;
    std::size_t level; // 1 = root level
    Direction dir;
  };

  std::vector<Node> branches;
  std::vector<Edge> edges;
  std::unordered_map<std::string_view, int> seen;
  bool used_one = false;
  bool used_zero = false;
  int root = 0;

  auto attach = [&](int parent, int child, Direction dir) {
    if (child == sink_one)
      used_one = true;
    if (child == sink_zero)
      used_zero = true;
    if (parent >= 1)
      edges.push_back({parent, child, dir});
    else if (root == 0)
      root = child;
  };

  std::queue<Item> q;
  q.push({t.cells(), 0, 1, Direction::left});
  while (!q.empty()) {
    const Item it = q.front();
    q.pop();
    if (it.s.size() > 1 && is_bead(it.s)) {
      const int next_id = static_cast<int>(branches.size()) + 1;
      const auto [pos, fresh] = seen.try_emplace(it.s, next_id);
      const int id = pos->second;
      if (fresh)
        branches.push_back({id, it.level - 1});
      attach(it.parent, id, it.dir);
      // Children are expanded once per distinct bead.
      if (fresh) {
        q.push({first_half(it.s), id, it.level + 1, Direction::left});
        q.push({second_half(it.s), id, it.level + 1, Direction::right});
      }
    } else if (it.s.size() > 1) {
      if (leads_to_one(it.s))
        attach(it.parent, sink_one, it.dir);
      else if (leads_to_zero(it.s))
        attach(it.parent, sink_zero, it.dir);
      else // alpha-alpha: the level's variable is irrelevant here
        q.push({first_half(it.s), it.parent, it.level + 1, it.dir});
    } else {
      attach(it.parent, it.s == "1" ? sink_one : sink_zero, it.dir);
    }
  }

  std::vector<Node> nodes;
  if (used_one)
    nodes.push_back({sink_one, 0});
  if (used_zero)
    nodes.push_back({sink_zero, 0});
  nodes.insert(nodes.end(), branches.begin(), branches.end());
  return Bdd(std::move(nodes), std::move(edges), root, ordering);
}

std::uint8_t classify(const Bdd &b, std::span<const std::uint8_t> example) {
  int cur = b.root();
  for (std::size_t steps = 0; steps <= b.nodes().size(); ++steps) {
    const Node &n = b.node(cur);
    if (n.is_sink())
      return n.sink_value();
    const auto feature = b.ordering()[n.position];
    if (feature >= example.size())
      throw std::out_of_range("example lacks feature " + std::to_string(feature));
    cur = b.child(cur, example[feature] ? Direction::right : Direction::left);
  }
  throw std::logic_error("cycle in decision diagram");
}

std::vector<std::string> audit(const Bdd &b) {
  std::vector<std::string> problems;
  std::map<int, std::pair<int, int>> kids; // id -> (left count, right count)
  std::map<int, int> indegree;
  for (const auto &n : b.nodes()) {
    if (!n.is_sink()) {
      kids[n.id] = {0, 0};
      if (n.position >= b.ordering().size())
        problems.push_back("node " + std::to_string(n.id) +
                           " tests a position beyond the ordering");
    } else if (n.id != sink_one && n.id != sink_zero) {
      problems.push_back("sink with unreserved id " + std::to_string(n.id));
    }
    indegree[n.id] = 0;
  }
  for (const auto &e : b.edges()) {
    if (!b.has_node(e.parent) || !b.has_node(e.child)) {
      problems.push_back("edge references a missing node");
      continue;
    }
    const Node &p = b.node(e.parent);
    const Node &c = b.node(e.child);
    if (p.is_sink()) {
      problems.push_back("edge leaves a sink");
      continue;
    }
    auto &[l, r] = kids[p.id];
    (e.direction == Direction::left ? l : r) += 1;
    ++indegree[c.id];
    if (!c.is_sink() && c.position <= p.position)
      problems.push_back("edge " + std::to_string(p.id) + "->" +
                         std::to_string(c.id) + " breaks the variable order");
  }
  for (const auto &[id, lr] : kids)
    if (lr.first != 1 || lr.second != 1)
      problems.push_back("node " + std::to_string(id) +
                         " lacks exactly one left and one right edge");
  for (const auto &[id, deg] : indegree) {
    if (id == b.root() && deg != 0)
      problems.push_back("root has a parent");
    if (id != b.root() && deg == 0)
      problems.push_back("node " + std::to_string(id) + " is unreachable");
  }
  if (!problems.empty())
    return problems;

  // Reducedness: intern (position, left, right) bottom-up; a repeated key
  // means two isomorphic subgraphs.
  std::map<int, int> canon{{sink_one, sink_one}, {sink_zero, sink_zero}};
  std::map<std::tuple<std::size_t, int, int>, int> interned;
  std::vector<Node> order;
  for (const auto &n : b.nodes())
    if (!n.is_sink())
      order.push_back(n);
  std::sort(order.begin(), order.end(), [](const Node &x, const Node &y) {
    return x.position > y.position;
  });
  for (const auto &n : order) {
    const int l = canon.at(b.child(n.id, Direction::left));
    const int r = canon.at(b.child(n.id, Direction::right));
    if (l == r)
      problems.push_back("node " + std::to_string(n.id) +
                         " has identical children");
    const auto [it, fresh] = interned.try_emplace({n.position, l, r}, n.id);
    if (!fresh)
      problems.push_back("nodes " + std::to_string(it->second) + " and " +
                         std::to_string(n.id) + " are isomorphic");
    canon[n.id] = it->second;
  }
  return problems;
}

void export_dot(const Bdd &b, std::ostream &out,
                const std::vector<std::string> &feature_names) {
  auto name = [](int id) {
    return id == sink_one ? std::string("s1")
           : id == sink_zero ? std::string("s0")
                             : "n" + std::to_string(id);
  };
  out << "digraph bdd {\n";
  for (const auto &n : b.nodes()) {
    if (n.is_sink()) {
      out << "  " << name(n.id) << " [label=\"" << int(n.sink_value())
          << "\", shape=box];\n";
      continue;
    }
    const auto feature = b.ordering()[n.position];
    std::string label = feature < feature_names.size()
                            ? feature_names[feature]
                            : "f" + std::to_string(feature + 1);
    std::string escaped;
    for (char ch : label) {
      if (ch == '"' || ch == '\\')
        escaped.push_back('\\');
      escaped.push_back(ch);
    }
    out << "  " << name(n.id) << " [label=\"" << escaped
        << "\", shape=circle];\n";
  }
  for (const auto &e : b.edges())
    out << "  " << name(e.parent) << " -> " << name(e.child) << " [style="
        << (e.direction == Direction::left ? "dashed" : "solid") << "];\n";
  out << "}\n";
}

} // namespace bddlearn::bdd
