#ifndef QFG_FRUCHT_HPP
#define QFG_FRUCHT_HPP

#include <cstddef>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "automorphism.hpp"
#include "caps.hpp"
#include "finite_group.hpp"
#include "graph.hpp"

namespace qfg {

/// Gadget substituted for one Cayley arc (or, for an involution, one
/// undirected Cayley edge).
///
/// Generator index i is encoded by pendant path lengths. A non-involution
/// arc u → v becomes u-p-q-v with a pendant path of 2i+1 nodes at p and
/// 2i+2 nodes at q; an involution edge {u, v} becomes u-p-v with a pendant
/// path of 2i+2 nodes at p.
struct Gadget {
  int tail = 0;  // group element index
  int head = 0;
  int color = 0; // generator index
  bool involution = false;
  std::vector<int> internal; // p (and q)
  std::vector<std::vector<int>> pendants; // one path per internal node, nearest node first
};

struct FruchtGraph {
  SimpleGraph graph;
  std::vector<int> group_nodes; // node of group element a (always a itself)
  std::vector<Gadget> gadgets;

  /// Gadget index for the arc (tail, color), or for the involution edge with
  /// that endpoint and color.
  std::optional<std::size_t> gadget_of_arc(int tail, int color) const {
    for (std::size_t k = 0; k < gadgets.size(); ++k) {
      const auto &gd = gadgets[k];
      if (gd.color == color && (gd.tail == tail || (gd.involution && gd.head == tail)))
        return k;
    }
    return std::nullopt;
  }
};

inline int pendant_length(int color, int position) { return 2 * color + 1 + position; }

/// Builds a connected simple graph whose automorphism group realizes `g`.
inline FruchtGraph frucht_graph(const FiniteGroup &g) {
  const ColoredDigraph cayley = cayley_color_digraph(g);
  FruchtGraph fg;
  int next = g.order();
  for (int a = 0; a < g.order(); ++a)
    fg.group_nodes.push_back(a);
  std::vector<std::pair<int, int>> edges;

  auto add_path_from = [&](int anchor, int length) {
    std::vector<int> path;
    int prev = anchor;
    for (int k = 0; k < length; ++k) {
      int x = next++;
      edges.emplace_back(prev, x);
      path.push_back(x);
      prev = x;
    }
    return path;
  };

  for (const auto &arc : cayley.arcs) {
    const int s = g.generators()[static_cast<std::size_t>(arc.color)];
    Gadget gd;
    gd.tail = arc.tail;
    gd.head = arc.head;
    gd.color = arc.color;
    gd.involution = g.is_involution(s);
    if (gd.involution) {
      if (arc.tail > arc.head)
        continue; // the reverse arc carries this edge
      const int p = next++;
      edges.emplace_back(arc.tail, p);
      edges.emplace_back(p, arc.head);
      gd.internal = {p};
      gd.pendants.push_back(add_path_from(p, pendant_length(arc.color, 1)));
    } else {
      const int p = next++;
      const int q = next++;
      edges.emplace_back(arc.tail, p);
      edges.emplace_back(p, q);
      edges.emplace_back(q, arc.head);
      gd.internal = {p, q};
      gd.pendants.push_back(add_path_from(p, pendant_length(arc.color, 0)));
      gd.pendants.push_back(add_path_from(q, pendant_length(arc.color, 1)));
    }
    fg.gadgets.push_back(std::move(gd));
  }
  fg.graph = SimpleGraph(next, std::move(edges));
  return fg;
}

/// Extends the left translation u ↦ a·u of group nodes gadget by gadget to
/// a node map of the Frucht graph.
inline Permutation left_translation(const FiniteGroup &g, const FruchtGraph &fg, int a) {
  std::vector<int> images(static_cast<std::size_t>(fg.graph.node_count()), -1);
  for (int u = 0; u < g.order(); ++u)
    images[static_cast<std::size_t>(u)] = g.mul(a, u);
  for (const auto &gd : fg.gadgets) {
    const int tail = g.mul(a, gd.tail);
    const auto target = fg.gadget_of_arc(tail, gd.color);
    if (!target)
      throw Error("left translation: missing gadget");
    const Gadget &to = fg.gadgets[*target];
    for (std::size_t k = 0; k < gd.internal.size(); ++k)
      images[static_cast<std::size_t>(gd.internal[k])] = to.internal[k];
    for (std::size_t k = 0; k < gd.pendants.size(); ++k)
      for (std::size_t j = 0; j < gd.pendants[k].size(); ++j)
        images[static_cast<std::size_t>(gd.pendants[k][j])] = to.pendants[k][j];
  }
  return Permutation(std::move(images));
}

/// Abstract multiplication table of a list of permutations closed under
/// composition; the product of elements i and j is perms[i]∘perms[j].
inline FiniteGroup group_from_permutations(const std::vector<Permutation> &perms,
                                           std::size_t order_cap = Caps{}.group_order) {
  std::map<Permutation, int> index;
  for (std::size_t i = 0; i < perms.size(); ++i)
    index.emplace(perms[i], static_cast<int>(i));
  if (index.size() != perms.size())
    throw PreconditionError("duplicate permutations");
  std::vector<std::vector<int>> rows(perms.size());
  for (std::size_t i = 0; i < perms.size(); ++i)
    for (const auto &q : perms) {
      auto it = index.find(compose(perms[i], q));
      if (it == index.end())
        throw PreconditionError("permutations are not closed under composition");
      rows[i].push_back(it->second);
    }
  return FiniteGroup::from_table(rows, {}, order_cap);
}

struct Realization {
  bool realized = false;
  std::vector<Permutation> automorphisms; // A(graph), sorted
  std::vector<int> witness;               // group element -> index into `automorphisms`
};

/// Checks A(graph) ≅ g by exhaustive automorphism search and an explicit
/// isomorphism witness.
inline Realization verify_realization(const FiniteGroup &g, const SimpleGraph &graph, const Caps &caps = {}) {
  Realization r;
  r.automorphisms = node_automorphisms(graph, caps);
  if (r.automorphisms.size() != static_cast<std::size_t>(g.order()))
    return r;
  const FiniteGroup aut = group_from_permutations(r.automorphisms, caps.group_order);
  auto iso = groups_isomorphic(g, aut, caps.group_order);
  r.realized = iso.isomorphic;
  r.witness = std::move(iso.witness);
  return r;
}

} // namespace qfg

#endif // QFG_FRUCHT_HPP
