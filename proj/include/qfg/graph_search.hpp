#ifndef QFG_GRAPH_SEARCH_HPP
#define QFG_GRAPH_SEARCH_HPP

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "caps.hpp"
#include "error.hpp"
#include "graph.hpp"
#include "permutation.hpp"

namespace qfg {

namespace detail {

// Equitable coloring reached by colour refinement, plus the refinement trace.
// Two colorings related by an isomorphism produce identical traces and
// identical color labels on corresponding nodes.
struct Coloring {
  std::vector<int> color;
  std::vector<long> trace;
  int num_colors = 0;
};

inline Coloring refine(const SimpleGraph &g, std::vector<int> color) {
  Coloring out;
  const int n = g.node_count();
  int num = 0;
  for (int c : color)
    num = std::max(num, c + 1);

  for (;;) {
    std::map<std::vector<int>, int> classes;
    std::vector<std::vector<int>> sig(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) {
      auto &s = sig[static_cast<std::size_t>(v)];
      s.push_back(color[static_cast<std::size_t>(v)]);
      std::size_t mark = s.size();
      for (int w : g.neighbors(v))
        s.push_back(color[static_cast<std::size_t>(w)]);
      std::sort(s.begin() + static_cast<std::ptrdiff_t>(mark), s.end());
      ++classes[s];
    }
    int next = 0;
    for (auto &[s, count] : classes) {
      out.trace.push_back(static_cast<long>(s.size()));
      out.trace.insert(out.trace.end(), s.begin(), s.end());
      out.trace.push_back(count);
      count = next++;
    }
    out.trace.push_back(-1);
    for (int v = 0; v < n; ++v)
      color[static_cast<std::size_t>(v)] = classes[sig[static_cast<std::size_t>(v)]];
    const bool stable = next == num;
    num = next;
    if (stable)
      break;
  }
  out.color = std::move(color);
  out.num_colors = num;
  return out;
}

// Individualization-refinement search for node bijections left → right that
// preserve adjacency. `emit` receives each one (image array indexed by left
// node) and returns false to stop. Returns false when stopped early.
template <typename Emit>
bool search_isomorphisms(const SimpleGraph &left, const SimpleGraph &right, Coloring lc, Coloring rc, Emit &emit) {
  if (lc.trace != rc.trace)
    return true;
  const int n = left.node_count();
  if (lc.num_colors == n) {
    std::vector<int> by_color(static_cast<std::size_t>(n));
    for (int w = 0; w < n; ++w)
      by_color[static_cast<std::size_t>(rc.color[static_cast<std::size_t>(w)])] = w;
    std::vector<int> map(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v)
      map[static_cast<std::size_t>(v)] = by_color[static_cast<std::size_t>(lc.color[static_cast<std::size_t>(v)])];
    for (const auto &e : left.edges())
      if (!right.adjacent(map[static_cast<std::size_t>(e.tail)], map[static_cast<std::size_t>(e.head)]))
        return true;
    return emit(std::move(map));
  }

  // Target cell: smallest non-singleton color class, lowest label on ties.
  std::vector<int> size(static_cast<std::size_t>(lc.num_colors), 0);
  for (int c : lc.color)
    ++size[static_cast<std::size_t>(c)];
  int target = -1;
  for (int c = 0; c < lc.num_colors; ++c)
    if (size[static_cast<std::size_t>(c)] > 1 &&
        (target < 0 || size[static_cast<std::size_t>(c)] < size[static_cast<std::size_t>(target)]))
      target = c;

  int v = 0;
  while (lc.color[static_cast<std::size_t>(v)] != target)
    ++v;
  auto left_col = lc.color;
  left_col[static_cast<std::size_t>(v)] = lc.num_colors;
  Coloring left_next = refine(left, std::move(left_col));
  for (int w = 0; w < n; ++w) {
    if (rc.color[static_cast<std::size_t>(w)] != target)
      continue;
    auto right_col = rc.color;
    right_col[static_cast<std::size_t>(w)] = rc.num_colors;
    if (!search_isomorphisms(left, right, left_next, refine(right, std::move(right_col)), emit))
      return false;
  }
  return true;
}

inline bool is_automorphism(const SimpleGraph &g, const Permutation &p) {
  if (p.degree() != g.node_count())
    return false;
  for (const auto &e : g.edges())
    if (!g.adjacent(p[e.tail], p[e.head]))
      return false;
  return true;
}

} // namespace detail

/// Adjacency-preserving node bijection g1 → g2, if one exists.
inline std::optional<Permutation> find_graph_isomorphism(const SimpleGraph &g1, const SimpleGraph &g2,
                                                         std::size_t node_cap = Caps{}.isomorphism_nodes) {
  if (static_cast<std::size_t>(std::max(g1.node_count(), g2.node_count())) > node_cap)
    throw CapExceeded("graph isomorphism: node count exceeds cap " + std::to_string(node_cap));
  if (g1.node_count() != g2.node_count() || g1.edge_count() != g2.edge_count())
    return std::nullopt;
  auto d1 = std::vector<int>{}, d2 = std::vector<int>{};
  for (int v = 0; v < g1.node_count(); ++v) {
    d1.push_back(g1.degree(v));
    d2.push_back(g2.degree(v));
  }
  std::sort(d1.begin(), d1.end());
  std::sort(d2.begin(), d2.end());
  if (d1 != d2)
    return std::nullopt;

  std::optional<Permutation> found;
  auto emit = [&](std::vector<int> map) {
    found = Permutation(std::move(map));
    return false;
  };
  const std::vector<int> zero1(static_cast<std::size_t>(g1.node_count()), 0);
  const std::vector<int> zero2(static_cast<std::size_t>(g2.node_count()), 0);
  detail::search_isomorphisms(g1, g2, detail::refine(g1, zero1), detail::refine(g2, zero2), emit);
  return found;
}

inline bool graphs_isomorphic(const SimpleGraph &g1, const SimpleGraph &g2,
                              std::size_t node_cap = Caps{}.isomorphism_nodes) {
  return find_graph_isomorphism(g1, g2, node_cap).has_value();
}

} // namespace qfg

#endif // QFG_GRAPH_SEARCH_HPP
