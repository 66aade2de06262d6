#ifndef QFG_GRAPH_HPP
#define QFG_GRAPH_HPP

#include <algorithm>
#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"

namespace qfg {

/// Undirected edge stored with tail < head.
struct Edge {
  int tail = 0;
  int head = 0;
  friend auto operator<=>(const Edge &, const Edge &) = default;
  bool has_endpoint(int v) const noexcept { return tail == v || head == v; }
  int other(int v) const noexcept { return v == tail ? head : tail; }
};

/// Finite simple graph with canonically indexed edges.
///
/// Edges are stored as (min, max) and sorted lexicographically; an edge's
/// index is its rank in that order. The stored orientation tail → head is
/// the orientation used for the metric structure.
class SimpleGraph {
public:
  SimpleGraph() = default;

  SimpleGraph(int node_count, std::vector<std::pair<int, int>> edge_list) : node_count_(node_count) {
    if (node_count < 0)
      throw PreconditionError("negative node count");
    edges_.reserve(edge_list.size());
    for (auto [u, v] : edge_list) {
      if (u < 0 || v < 0 || u >= node_count || v >= node_count)
        throw PreconditionError("edge {" + std::to_string(u) + "," + std::to_string(v) + "} references a missing node");
      if (u == v)
        throw PreconditionError("self-loop at node " + std::to_string(u));
      edges_.push_back({std::min(u, v), std::max(u, v)});
    }
    std::sort(edges_.begin(), edges_.end());
    if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end())
      throw PreconditionError("duplicate edge");
    neighbors_.assign(static_cast<std::size_t>(node_count), {});
    incident_.assign(static_cast<std::size_t>(node_count), {});
    adjacency_.assign(static_cast<std::size_t>(node_count) * static_cast<std::size_t>(node_count), 0);
    for (std::size_t i = 0; i < edges_.size(); ++i) {
      auto [u, v] = edges_[i];
      neighbors_[static_cast<std::size_t>(u)].push_back(v);
      neighbors_[static_cast<std::size_t>(v)].push_back(u);
      incident_[static_cast<std::size_t>(u)].push_back(static_cast<int>(i));
      incident_[static_cast<std::size_t>(v)].push_back(static_cast<int>(i));
      adjacency_[index(u, v)] = adjacency_[index(v, u)] = 1;
    }
    for (auto &n : neighbors_)
      std::sort(n.begin(), n.end());
  }

  int node_count() const noexcept { return node_count_; }
  int edge_count() const noexcept { return static_cast<int>(edges_.size()); }
  const std::vector<Edge> &edges() const noexcept { return edges_; }
  const Edge &edge(int e) const { return edges_.at(static_cast<std::size_t>(e)); }
  const std::vector<int> &neighbors(int v) const { return neighbors_.at(static_cast<std::size_t>(v)); }
  /// Indices of the edges incident to v, ascending.
  const std::vector<int> &incident_edges(int v) const { return incident_.at(static_cast<std::size_t>(v)); }
  int degree(int v) const { return static_cast<int>(neighbors(v).size()); }
  bool adjacent(int u, int v) const { return adjacency_[index(u, v)] != 0; }

  std::optional<int> edge_index(int u, int v) const {
    Edge key{std::min(u, v), std::max(u, v)};
    auto it = std::lower_bound(edges_.begin(), edges_.end(), key);
    if (it == edges_.end() || *it != key)
      return std::nullopt;
    return static_cast<int>(it - edges_.begin());
  }

  std::vector<std::pair<int, int>> edge_pairs() const {
    std::vector<std::pair<int, int>> out;
    for (const auto &e : edges_)
      out.emplace_back(e.tail, e.head);
    return out;
  }

  friend bool operator==(const SimpleGraph &a, const SimpleGraph &b) {
    return a.node_count_ == b.node_count_ && a.edges_ == b.edges_;
  }

private:
  std::size_t index(int u, int v) const {
    return static_cast<std::size_t>(u) * static_cast<std::size_t>(node_count_) + static_cast<std::size_t>(v);
  }

  int node_count_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> neighbors_;
  std::vector<std::vector<int>> incident_;
  std::vector<char> adjacency_;
};

struct LineGraph {
  SimpleGraph graph;
  std::vector<int> node_of_edge; // edge index of the source graph -> node of `graph`
};

/// One node per edge; two nodes adjacent iff the edges share an endpoint.
inline LineGraph line_graph(const SimpleGraph &g) {
  std::vector<std::pair<int, int>> pairs;
  for (int v = 0; v < g.node_count(); ++v) {
    const auto &inc = g.incident_edges(v);
    for (std::size_t i = 0; i < inc.size(); ++i)
      for (std::size_t j = i + 1; j < inc.size(); ++j)
        pairs.emplace_back(inc[i], inc[j]);
  }
  // Simple graphs: two distinct edges share at most one endpoint, so no duplicates arise.
  LineGraph lg{SimpleGraph(g.edge_count(), std::move(pairs)), {}};
  for (int e = 0; e < g.edge_count(); ++e)
    lg.node_of_edge.push_back(e);
  return lg;
}

struct GraphClassification {
  bool connected = true;
  std::vector<int> isolated_nodes;
  std::vector<int> isolated_edges; // edge indices whose endpoints both have degree 1
  std::optional<int> regular_degree;
  int node_count = 0;
  int edge_count = 0;
};

inline std::vector<int> connected_component(const SimpleGraph &g, int start) {
  std::vector<char> seen(static_cast<std::size_t>(g.node_count()), 0);
  std::vector<int> order{start};
  seen[static_cast<std::size_t>(start)] = 1;
  for (std::size_t head = 0; head < order.size(); ++head)
    for (int w : g.neighbors(order[head]))
      if (!seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = 1;
        order.push_back(w);
      }
  return order;
}

inline GraphClassification classify(const SimpleGraph &g) {
  GraphClassification c;
  c.node_count = g.node_count();
  c.edge_count = g.edge_count();
  c.connected = g.node_count() == 0 || static_cast<int>(connected_component(g, 0).size()) == g.node_count();
  for (int v = 0; v < g.node_count(); ++v)
    if (g.degree(v) == 0)
      c.isolated_nodes.push_back(v);
  for (int e = 0; e < g.edge_count(); ++e)
    if (g.degree(g.edge(e).tail) == 1 && g.degree(g.edge(e).head) == 1)
      c.isolated_edges.push_back(e);
  if (g.node_count() > 0) {
    int d = g.degree(0);
    bool regular = true;
    for (int v = 1; v < g.node_count() && regular; ++v)
      regular = g.degree(v) == d;
    if (regular)
      c.regular_degree = d;
  }
  return c;
}

/// Reads the text graph format:
///
///     nodes N
///     u v          one edge per line, 0-based
///
/// Blank lines and '#' comments are ignored.
inline SimpleGraph read_graph(std::istream &in) {
  std::string line;
  int lineno = 0;
  int n = -1;
  std::vector<std::pair<int, int>> pairs;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos)
      line.erase(hash);
    std::istringstream ss(line);
    std::string first;
    if (!(ss >> first))
      continue;
    std::string rest;
    if (n < 0) {
      if (first != "nodes")
        throw ParseError(lineno, "expected 'nodes N' header");
      if (!(ss >> n) || n < 0)
        throw ParseError(lineno, "'nodes' expects a non-negative integer");
      if (ss >> rest)
        throw ParseError(lineno, "trailing text after node count");
      continue;
    }
    int u = 0, v = 0;
    try {
      std::size_t used = 0;
      u = std::stoi(first, &used);
      if (used != first.size())
        throw std::invalid_argument(first);
    } catch (const std::exception &) {
      throw ParseError(lineno, "expected an edge 'u v', got '" + first + "'");
    }
    if (!(ss >> v))
      throw ParseError(lineno, "edge line needs two node indices");
    if (ss >> rest)
      throw ParseError(lineno, "trailing text after edge");
    pairs.emplace_back(u, v);
  }
  if (n < 0)
    throw ParseError("missing 'nodes N' header");
  try {
    return SimpleGraph(n, std::move(pairs));
  } catch (const PreconditionError &e) {
    throw ParseError(e.what());
  }
}

inline SimpleGraph parse_graph(const std::string &text) {
  std::istringstream in(text);
  return read_graph(in);
}

inline void write_graph(std::ostream &out, const SimpleGraph &g) {
  out << "nodes " << g.node_count() << '\n';
  for (const auto &e : g.edges())
    out << e.tail << ' ' << e.head << '\n';
}

inline std::string to_graph_text(const SimpleGraph &g) {
  std::ostringstream out;
  write_graph(out, g);
  return out.str();
}

/// Graphviz export; edges are labeled e1, e2, ... by canonical index.
inline void write_dot(std::ostream &out, const SimpleGraph &g, const std::vector<int> &highlight = {}) {
  out << "graph G {\n";
  for (int v = 0; v < g.node_count(); ++v) {
    out << "  " << v;
    if (std::find(highlight.begin(), highlight.end(), v) != highlight.end())
      out << " [style=filled, fillcolor=lightblue]";
    out << ";\n";
  }
  for (int e = 0; e < g.edge_count(); ++e)
    out << "  " << g.edge(e).tail << " -- " << g.edge(e).head << " [label=\"e" << e + 1 << "\"];\n";
  out << "}\n";
}

/// Small named graphs used by the CLI and the tests.
namespace graphs {

inline SimpleGraph complete(int n) {
  std::vector<std::pair<int, int>> p;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      p.emplace_back(i, j);
  return {n, p};
}

inline SimpleGraph path(int n) {
  std::vector<std::pair<int, int>> p;
  for (int i = 0; i + 1 < n; ++i)
    p.emplace_back(i, i + 1);
  return {n, p};
}

inline SimpleGraph cycle(int n) {
  std::vector<std::pair<int, int>> p;
  for (int i = 0; i < n; ++i)
    p.emplace_back(i, (i + 1) % n);
  return {n, p};
}

// Center 0, leaves 1..k.
inline SimpleGraph star(int k) {
  std::vector<std::pair<int, int>> p;
  for (int i = 1; i <= k; ++i)
    p.emplace_back(0, i);
  return {k + 1, p};
}

// Triangle 0-1-2 with pendant 2-3. Canonical edges: e1=01, e2=02, e3=12, e4=23.
inline SimpleGraph paw() { return {4, {{0, 1}, {0, 2}, {1, 2}, {2, 3}}}; }

inline SimpleGraph diamond() { return {4, {{0, 1}, {0, 2}, {1, 2}, {1, 3}, {2, 3}}}; }

// One edge 0-1 and two isolated nodes 2, 3.
inline SimpleGraph edge_plus_two_isolated() { return {4, {{0, 1}}}; }

} // namespace graphs

} // namespace qfg

#endif // QFG_GRAPH_HPP
