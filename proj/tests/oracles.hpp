// Independent reference computations for the test suites. Nothing here
// calls into the refinement search, the BFS closure, or the eigensolver path.
#ifndef QFG_TESTS_ORACLES_HPP
#define QFG_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <set>
#include <vector>

#include <qfg/finite_group.hpp>
#include <qfg/graph.hpp>
#include <qfg/permutation.hpp>

namespace oracle {

inline bool preserves_adjacency(const qfg::SimpleGraph &g, const std::vector<int> &p) {
  for (int u = 0; u < g.node_count(); ++u)
    for (int v = 0; v < g.node_count(); ++v)
      if (u != v && g.adjacent(u, v) != g.adjacent(p[u], p[v]))
        return false;
  return true;
}

// Every n! node permutation.
inline std::vector<std::vector<int>> brute_force_automorphisms(const qfg::SimpleGraph &g) {
  std::vector<int> p(static_cast<std::size_t>(g.node_count()));
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<int>> out;
  do {
    if (preserves_adjacency(g, p))
      out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

// Plain vertex-by-vertex backtracking with degree and adjacency consistency
// against already mapped nodes. Nodes are taken in BFS order so that a node
// with a mapped neighbour only tries the neighbours of that neighbour's image.
inline std::size_t backtrack_automorphism_count(const qfg::SimpleGraph &g) {
  const int n = g.node_count();
  std::vector<int> order, parent(static_cast<std::size_t>(n), -1);
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (int root = 0; root < n; ++root) {
    if (seen[root])
      continue;
    seen[root] = 1;
    order.push_back(root);
    for (std::size_t head = order.size() - 1; head < order.size(); ++head) {
      const int v = order[head];
      for (int w = 0; w < n; ++w)
        if (g.adjacent(v, w) && !seen[w]) {
          seen[w] = 1;
          parent[w] = v;
          order.push_back(w);
        }
    }
  }
  std::vector<int> map(static_cast<std::size_t>(n), -1);
  std::vector<char> used(static_cast<std::size_t>(n), 0);
  std::size_t count = 0;
  auto rec = [&](auto &&self, std::size_t k) -> void {
    if (k == order.size()) {
      ++count;
      return;
    }
    const int v = order[k];
    for (int w = 0; w < n; ++w) {
      if (used[w] || g.degree(w) != g.degree(v))
        continue;
      if (parent[v] >= 0 && !g.adjacent(map[parent[v]], w))
        continue;
      bool ok = true;
      for (std::size_t i = 0; i < k && ok; ++i)
        ok = g.adjacent(order[i], v) == g.adjacent(map[order[i]], w);
      if (!ok)
        continue;
      map[v] = w;
      used[w] = 1;
      self(self, k + 1);
      used[w] = 0;
    }
  };
  rec(rec, 0);
  return count;
}

inline bool brute_force_graphs_isomorphic(const qfg::SimpleGraph &a, const qfg::SimpleGraph &b) {
  if (a.node_count() != b.node_count() || a.edge_count() != b.edge_count())
    return false;
  std::vector<int> p(static_cast<std::size_t>(a.node_count()));
  std::iota(p.begin(), p.end(), 0);
  do {
    bool ok = true;
    for (const auto &e : a.edges())
      if (!b.adjacent(p[e.tail], p[e.head])) {
        ok = false;
        break;
      }
    if (ok)
      return true;
  } while (std::next_permutation(p.begin(), p.end()));
  return false;
}

// Fixpoint of products of known elements with the generators.
inline std::set<std::vector<int>> brute_force_closure(const std::vector<std::vector<int>> &gens, int degree) {
  std::vector<int> id(static_cast<std::size_t>(degree));
  std::iota(id.begin(), id.end(), 0);
  std::set<std::vector<int>> elems{id};
  bool grew = true;
  while (grew) {
    grew = false;
    std::vector<std::vector<int>> current(elems.begin(), elems.end());
    for (const auto &x : current)
      for (const auto &s : gens) {
        std::vector<int> y(static_cast<std::size_t>(degree));
        for (int i = 0; i < degree; ++i)
          y[i] = x[s[i]];
        grew |= elems.insert(y).second;
      }
  }
  return elems;
}

// Tries every bijection of elements.
inline bool brute_force_groups_isomorphic(const qfg::FiniteGroup &a, const qfg::FiniteGroup &b) {
  if (a.order() != b.order())
    return false;
  std::vector<int> p(static_cast<std::size_t>(a.order()));
  std::iota(p.begin(), p.end(), 0);
  do {
    bool ok = true;
    for (int x = 0; x < a.order() && ok; ++x)
      for (int y = 0; y < a.order() && ok; ++y)
        ok = p[a.mul(x, y)] == b.mul(p[x], p[y]);
    if (ok)
      return true;
  } while (std::next_permutation(p.begin(), p.end()));
  return false;
}

// Σ_e Σ_cells |ψ_{j+1} − ψ_j|² / h over a broken P1 coefficient vector.
template <typename Vec>
double dirichlet_sum(const Vec &psi, int edges, int mesh_n) {
  const double h = 1.0 / mesh_n;
  double s = 0.0;
  for (int e = 0; e < edges; ++e)
    for (int j = 0; j < mesh_n; ++j) {
      auto diff = psi[e * (mesh_n + 1) + j + 1] - psi[e * (mesh_n + 1) + j];
      s += std::norm(std::complex<double>(diff)) / h;
    }
  return s;
}

} // namespace oracle

#endif
