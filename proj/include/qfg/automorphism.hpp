#ifndef QFG_AUTOMORPHISM_HPP
#define QFG_AUTOMORPHISM_HPP

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "caps.hpp"
#include "error.hpp"
#include "graph.hpp"
#include "graph_search.hpp"
#include "permutation.hpp"

namespace qfg {

/// All automorphisms of `g`, sorted lexicographically by image array.
///
/// Throws CapExceeded when the node count exceeds `caps.automorphism_nodes`
/// or the group grows past `caps.group_order`.
inline std::vector<Permutation> node_automorphisms(const SimpleGraph &g, const Caps &caps = {}) {
  if (static_cast<std::size_t>(g.node_count()) > caps.automorphism_nodes)
    throw CapExceeded("automorphism search: " + std::to_string(g.node_count()) + " nodes exceeds cap " +
                      std::to_string(caps.automorphism_nodes));
  std::vector<Permutation> out;
  auto emit = [&](std::vector<int> map) {
    if (out.size() >= caps.group_order)
      throw CapExceeded("automorphism group exceeds order cap " + std::to_string(caps.group_order));
    out.emplace_back(std::move(map));
    return true;
  };
  auto start = detail::refine(g, std::vector<int>(static_cast<std::size_t>(g.node_count()), 0));
  detail::search_isomorphisms(g, g, start, start, emit);
  std::sort(out.begin(), out.end());
  return out;
}

/// Automorphisms of the line graph, written as permutations of edge indices.
inline std::vector<Permutation> edge_symmetries(const SimpleGraph &g, const Caps &caps = {}) {
  if (static_cast<std::size_t>(g.edge_count()) > caps.automorphism_nodes)
    throw CapExceeded("edge symmetry search: " + std::to_string(g.edge_count()) + " edges exceeds cap " +
                      std::to_string(caps.automorphism_nodes));
  const LineGraph lg = line_graph(g);
  std::vector<int> edge_of_node(static_cast<std::size_t>(g.edge_count()));
  for (int e = 0; e < g.edge_count(); ++e)
    edge_of_node[static_cast<std::size_t>(lg.node_of_edge[static_cast<std::size_t>(e)])] = e;
  std::vector<Permutation> out;
  for (const auto &p : node_automorphisms(lg.graph, caps)) {
    std::vector<int> images(static_cast<std::size_t>(g.edge_count()));
    for (int e = 0; e < g.edge_count(); ++e)
      images[static_cast<std::size_t>(e)] =
          edge_of_node[static_cast<std::size_t>(p[lg.node_of_edge[static_cast<std::size_t>(e)]])];
    out.emplace_back(std::move(images));
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Edge permutation induced by a node automorphism, with orientation flips.
///
/// `flips[e]` is true when the node map sends the stored tail of edge e to
/// the stored head of edge `edge_perm[e]`.
struct InducedEdgeMap {
  Permutation edge_perm;
  std::vector<bool> flips;
  std::optional<Permutation> source;

  static InducedEdgeMap identity(int edge_count) {
    return {Permutation::identity(edge_count), std::vector<bool>(static_cast<std::size_t>(edge_count), false),
            std::nullopt};
  }

  friend bool operator==(const InducedEdgeMap &a, const InducedEdgeMap &b) {
    return a.edge_perm == b.edge_perm && a.flips == b.flips;
  }
};

inline InducedEdgeMap induce_edge_map(const Permutation &pi, const SimpleGraph &g) {
  if (!detail::is_automorphism(g, pi))
    throw PreconditionError("induce_edge_map: " + pi.to_cycle_string() + " is not an automorphism");
  std::vector<int> images(static_cast<std::size_t>(g.edge_count()));
  std::vector<bool> flips(static_cast<std::size_t>(g.edge_count()));
  for (int e = 0; e < g.edge_count(); ++e) {
    const int a = pi[g.edge(e).tail], b = pi[g.edge(e).head];
    images[static_cast<std::size_t>(e)] = *g.edge_index(a, b);
    flips[static_cast<std::size_t>(e)] = a > b;
  }
  return {Permutation(std::move(images)), std::move(flips), pi};
}

/// Edge map of "q first, then p": permutation composition with XOR of flips.
inline InducedEdgeMap compose(const InducedEdgeMap &p, const InducedEdgeMap &q) {
  InducedEdgeMap r{compose(p.edge_perm, q.edge_perm), std::vector<bool>(q.flips.size()), std::nullopt};
  for (int e = 0; e < q.edge_perm.degree(); ++e)
    r.flips[static_cast<std::size_t>(e)] =
        q.flips[static_cast<std::size_t>(e)] != p.flips[static_cast<std::size_t>(q.edge_perm[e])];
  if (p.source && q.source)
    r.source = compose(*p.source, *q.source);
  return r;
}

struct SymmetryGroups {
  std::vector<Permutation> node_auts;     // A(G)
  std::vector<Permutation> edge_syms;     // A*(G)
  std::vector<InducedEdgeMap> induced;    // A'(G), one representative per distinct edge permutation
  std::size_t node_aut_order() const noexcept { return node_auts.size(); }
  std::size_t edge_sym_order() const noexcept { return edge_syms.size(); }
  std::size_t induced_order() const noexcept { return induced.size(); }
};

inline SymmetryGroups symmetry_groups(const SimpleGraph &g, const Caps &caps = {}) {
  SymmetryGroups s;
  s.node_auts = node_automorphisms(g, caps);
  s.edge_syms = edge_symmetries(g, caps);
  for (const auto &pi : s.node_auts) {
    auto m = induce_edge_map(pi, g);
    bool seen = std::any_of(s.induced.begin(), s.induced.end(),
                            [&](const InducedEdgeMap &x) { return x.edge_perm == m.edge_perm; });
    if (!seen)
      s.induced.push_back(std::move(m));
  }
  std::sort(s.induced.begin(), s.induced.end(),
            [](const InducedEdgeMap &a, const InducedEdgeMap &b) { return a.edge_perm < b.edge_perm; });
  return s;
}

/// Edge symmetries that are not induced by any node automorphism.
inline std::vector<Permutation> non_induced_edge_symmetries(const SymmetryGroups &s) {
  std::vector<Permutation> out;
  for (const auto &p : s.edge_syms)
    if (std::none_of(s.induced.begin(), s.induced.end(), [&](const InducedEdgeMap &m) { return m.edge_perm == p; }))
      out.push_back(p);
  return out;
}

enum class WhitneyStatus {
  HararyFails,    // more than one isolated node, or an isolated edge
  Exceptional,    // connected, >= 3 nodes, isomorphic to paw, diamond or K4
  AllIsomorphic,  // |A| = |A'| = |A*|
  OutsideWhitney, // disconnected graph whose groups still differ (an exceptional component)
};

enum class ExceptionalGraph { Paw = 1, Diamond = 2, K4 = 3 };

inline const char *to_string(WhitneyStatus s) {
  switch (s) {
  case WhitneyStatus::HararyFails:
    return "HararyFails";
  case WhitneyStatus::Exceptional:
    return "Exceptional";
  case WhitneyStatus::AllIsomorphic:
    return "AllIsomorphic";
  case WhitneyStatus::OutsideWhitney:
    return "OutsideWhitney";
  }
  return "?";
}

inline const char *to_string(ExceptionalGraph g) {
  switch (g) {
  case ExceptionalGraph::Paw:
    return "paw";
  case ExceptionalGraph::Diamond:
    return "diamond";
  case ExceptionalGraph::K4:
    return "K4";
  }
  return "?";
}

struct WhitneyReport {
  WhitneyStatus status = WhitneyStatus::AllIsomorphic;
  std::optional<ExceptionalGraph> exceptional;
  SymmetryGroups groups;
};

/// Relates A(G), A'(G) and A*(G) for `g`.
inline WhitneyReport whitney_status(const SimpleGraph &g, const Caps &caps = {}) {
  WhitneyReport r;
  r.groups = symmetry_groups(g, caps);
  const auto cls = classify(g);
  if (cls.isolated_nodes.size() > 1 || !cls.isolated_edges.empty()) {
    r.status = WhitneyStatus::HararyFails;
    return r;
  }
  if (cls.connected && g.node_count() == 4) {
    const std::pair<ExceptionalGraph, SimpleGraph> candidates[] = {
        {ExceptionalGraph::Paw, graphs::paw()},
        {ExceptionalGraph::Diamond, graphs::diamond()},
        {ExceptionalGraph::K4, graphs::complete(4)},
    };
    for (const auto &[which, h] : candidates)
      if (graphs_isomorphic(g, h, caps.isomorphism_nodes)) {
        r.status = WhitneyStatus::Exceptional;
        r.exceptional = which;
        return r;
      }
  }
  const auto &s = r.groups;
  const bool equal = s.node_aut_order() == s.induced_order() && s.induced_order() == s.edge_sym_order();
  if (equal) {
    r.status = WhitneyStatus::AllIsomorphic;
  } else if (!cls.connected) {
    r.status = WhitneyStatus::OutsideWhitney;
  } else {
    throw Error("connected non-exceptional graph with |A| = " + std::to_string(s.node_aut_order()) +
                ", |A'| = " + std::to_string(s.induced_order()) + ", |A*| = " + std::to_string(s.edge_sym_order()));
  }
  return r;
}

} // namespace qfg

#endif // QFG_AUTOMORPHISM_HPP
