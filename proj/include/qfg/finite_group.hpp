#ifndef QFG_FINITE_GROUP_HPP
#define QFG_FINITE_GROUP_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "caps.hpp"
#include "error.hpp"
#include "permutation.hpp"

namespace qfg {

/// A finite group given by its multiplication table and a generating list.
///
/// `mul(a, b)` is the index of a·b. For groups built from permutations the
/// product is composition with b applied first, and elements are indexed in
/// breadth-first discovery order from the identity (index 0) over the
/// generators.
class FiniteGroup {
public:
  int order() const noexcept { return order_; }
  int identity() const noexcept { return identity_; }
  const std::vector<int> &generators() const noexcept { return generators_; }
  const std::optional<std::vector<Permutation>> &element_perms() const noexcept { return perms_; }

  int mul(int a, int b) const {
    return table_[static_cast<std::size_t>(a) * static_cast<std::size_t>(order_) + static_cast<std::size_t>(b)];
  }

  int inverse(int a) const {
    for (int b = 0; b < order_; ++b)
      if (mul(a, b) == identity_)
        return b;
    throw Error("element without inverse");
  }

  int element_order(int a) const {
    int k = 1;
    for (int x = a; x != identity_; x = mul(x, a))
      ++k;
    return k;
  }

  bool is_involution(int a) const { return a != identity_ && mul(a, a) == identity_; }

  std::vector<std::vector<int>> table() const {
    std::vector<std::vector<int>> rows(static_cast<std::size_t>(order_));
    for (int a = 0; a < order_; ++a)
      for (int b = 0; b < order_; ++b)
        rows[static_cast<std::size_t>(a)].push_back(mul(a, b));
    return rows;
  }

  /// Builds a group from a full multiplication table.
  ///
  /// Validates the Latin-square property, locates the identity and checks
  /// associativity. When `generators` is empty a generating set is chosen
  /// greedily in index order.
  static FiniteGroup from_table(const std::vector<std::vector<int>> &rows, std::vector<int> generators = {},
                                std::size_t order_cap = Caps{}.group_order);

  friend FiniteGroup closure_from_generators(const std::vector<Permutation> &, int, std::size_t);

private:
  int order_ = 0;
  int identity_ = 0;
  std::vector<int> table_;
  std::vector<int> generators_;
  std::optional<std::vector<Permutation>> perms_;
};

namespace detail {

// Elements reachable from the identity under right multiplication by `gens`.
inline std::vector<char> span_of(const FiniteGroup &g, const std::vector<int> &gens) {
  std::vector<char> in(static_cast<std::size_t>(g.order()), 0);
  std::vector<int> queue{g.identity()};
  in[static_cast<std::size_t>(g.identity())] = 1;
  for (std::size_t head = 0; head < queue.size(); ++head)
    for (int s : gens) {
      int y = g.mul(queue[head], s);
      if (!in[static_cast<std::size_t>(y)]) {
        in[static_cast<std::size_t>(y)] = 1;
        queue.push_back(y);
      }
    }
  return in;
}

} // namespace detail

/// Greedy irredundant subsequence of `candidates` generating the same subgroup.
inline std::vector<int> irredundant_generators(const FiniteGroup &g, const std::vector<int> &candidates) {
  std::vector<int> chosen;
  std::vector<char> span = detail::span_of(g, chosen);
  for (int c : candidates) {
    if (span[static_cast<std::size_t>(c)])
      continue;
    chosen.push_back(c);
    span = detail::span_of(g, chosen);
  }
  return chosen;
}

inline bool generates_group(const FiniteGroup &g, const std::vector<int> &gens) {
  auto span = detail::span_of(g, gens);
  return std::all_of(span.begin(), span.end(), [](char c) { return c != 0; });
}

inline bool is_latin_square(const FiniteGroup &g) {
  for (int a = 0; a < g.order(); ++a) {
    std::vector<char> row(static_cast<std::size_t>(g.order()), 0), col(static_cast<std::size_t>(g.order()), 0);
    for (int b = 0; b < g.order(); ++b) {
      int r = g.mul(a, b), c = g.mul(b, a);
      if (row[static_cast<std::size_t>(r)]++ || col[static_cast<std::size_t>(c)]++)
        return false;
    }
  }
  return true;
}

/// Associativity via Light's test: (x·s)·z = x·(s·z) for all x, z and every
/// generator s implies it for every element.
inline bool is_associative(const FiniteGroup &g) {
  for (int s : g.generators())
    for (int x = 0; x < g.order(); ++x)
      for (int z = 0; z < g.order(); ++z)
        if (g.mul(g.mul(x, s), z) != g.mul(x, g.mul(s, z)))
          return false;
  return true;
}

inline FiniteGroup FiniteGroup::from_table(const std::vector<std::vector<int>> &rows, std::vector<int> generators,
                                           std::size_t order_cap) {
  const int n = static_cast<int>(rows.size());
  if (n == 0)
    throw PreconditionError("multiplication table is empty");
  if (static_cast<std::size_t>(n) > order_cap)
    throw CapExceeded("group order " + std::to_string(n) + " exceeds cap " + std::to_string(order_cap));
  FiniteGroup g;
  g.order_ = n;
  g.table_.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  for (const auto &row : rows) {
    if (static_cast<int>(row.size()) != n)
      throw PreconditionError("multiplication table is not square");
    for (int x : row) {
      if (x < 0 || x >= n)
        throw PreconditionError("table entry " + std::to_string(x) + " out of range");
      g.table_.push_back(x);
    }
  }
  if (!is_latin_square(g))
    throw PreconditionError("multiplication table is not a Latin square");

  g.identity_ = -1;
  for (int e = 0; e < n && g.identity_ < 0; ++e) {
    bool ok = true;
    for (int a = 0; a < n && ok; ++a)
      ok = g.mul(e, a) == a && g.mul(a, e) == a;
    if (ok)
      g.identity_ = e;
  }
  if (g.identity_ < 0)
    throw PreconditionError("multiplication table has no identity element");

  if (generators.empty()) {
    std::vector<int> all;
    for (int a = 0; a < n; ++a)
      if (a != g.identity_)
        all.push_back(a);
    generators = irredundant_generators(g, all);
  } else {
    for (int s : generators)
      if (s < 0 || s >= n)
        throw PreconditionError("generator index out of range");
  }
  g.generators_ = std::move(generators);
  if (!generates_group(g, g.generators_))
    throw PreconditionError("generators do not generate the table's element set");
  if (!is_associative(g))
    throw PreconditionError("multiplication table is not associative");
  return g;
}

/// The permutation group generated by `gens`.
///
/// `degree` is only consulted when `gens` is empty (the trivial group);
/// otherwise all generators must share one degree. Generators are recorded
/// as given, including repeats and identity entries.
inline FiniteGroup closure_from_generators(const std::vector<Permutation> &gens, int degree = -1,
                                           std::size_t order_cap = Caps{}.group_order) {
  if (gens.empty() && degree < 0)
    throw PreconditionError("trivial group needs an explicit degree");
  if (!gens.empty())
    degree = gens.front().degree();
  for (const auto &s : gens)
    if (s.degree() != degree)
      throw PreconditionError("generators have different degrees");

  std::vector<Permutation> elems{Permutation::identity(degree)};
  std::map<Permutation, int> index{{elems.front(), 0}};
  const std::size_t k = gens.size();
  std::vector<int> right; // right[x * k + i] = x · gens[i]
  std::vector<int> parent{-1}, parent_gen{-1};

  for (std::size_t head = 0; head < elems.size(); ++head) {
    for (std::size_t i = 0; i < k; ++i) {
      Permutation y = compose(elems[head], gens[i]);
      auto [it, inserted] = index.emplace(y, static_cast<int>(elems.size()));
      if (inserted) {
        if (elems.size() >= order_cap)
          throw CapExceeded("group closure exceeds order cap " + std::to_string(order_cap));
        elems.push_back(std::move(y));
        parent.push_back(static_cast<int>(head));
        parent_gen.push_back(static_cast<int>(i));
      }
      right.push_back(it->second);
    }
  }

  const int n = static_cast<int>(elems.size());
  FiniteGroup g;
  g.order_ = n;
  g.identity_ = 0;
  g.table_.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0);
  // Column b is filled from its BFS parent: a·b = (a·parent(b))·s.
  for (int a = 0; a < n; ++a)
    g.table_[static_cast<std::size_t>(a) * static_cast<std::size_t>(n)] = a;
  for (int b = 1; b < n; ++b) {
    const int pb = parent[static_cast<std::size_t>(b)];
    const auto s = static_cast<std::size_t>(parent_gen[static_cast<std::size_t>(b)]);
    for (int a = 0; a < n; ++a) {
      int apb = g.table_[static_cast<std::size_t>(a) * static_cast<std::size_t>(n) + static_cast<std::size_t>(pb)];
      g.table_[static_cast<std::size_t>(a) * static_cast<std::size_t>(n) + static_cast<std::size_t>(b)] =
          right[static_cast<std::size_t>(apb) * k + s];
    }
  }
  for (const auto &s : gens)
    g.generators_.push_back(index.at(s));
  g.perms_ = std::move(elems);
  return g;
}

/// Result of an isomorphism test; `witness[a]` is the image of element a of
/// the first group.
struct GroupIsomorphism {
  bool isomorphic = false;
  std::vector<int> witness;
};

/// Decides whether two finite groups are isomorphic.
///
/// Candidate images are chosen for an irredundant generating set of `g1`,
/// pruned by element order and by excluding images already in the span of
/// earlier choices; each complete choice is extended along a breadth-first
/// word tree and checked for being a bijective homomorphism.
inline GroupIsomorphism groups_isomorphic(const FiniteGroup &g1, const FiniteGroup &g2,
                                          std::size_t order_cap = Caps{}.group_order) {
  if (static_cast<std::size_t>(g1.order()) > order_cap || static_cast<std::size_t>(g2.order()) > order_cap)
    throw CapExceeded("group order exceeds cap " + std::to_string(order_cap));
  if (g1.order() != g2.order())
    return {};
  const int n = g1.order();

  std::vector<int> ord1(static_cast<std::size_t>(n)), ord2(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) {
    ord1[static_cast<std::size_t>(a)] = g1.element_order(a);
    ord2[static_cast<std::size_t>(a)] = g2.element_order(a);
  }
  {
    auto s1 = ord1, s2 = ord2;
    std::sort(s1.begin(), s1.end());
    std::sort(s2.begin(), s2.end());
    if (s1 != s2)
      return {};
  }

  std::vector<int> gens = irredundant_generators(g1, g1.generators());
  if (!generates_group(g1, gens)) {
    std::vector<int> all;
    for (int a = 0; a < n; ++a)
      all.push_back(a);
    gens = irredundant_generators(g1, all);
  }

  // Breadth-first word tree of g1 over `gens`.
  std::vector<int> bfs{g1.identity()}, parent(static_cast<std::size_t>(n), -1), via(static_cast<std::size_t>(n), -1);
  {
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    seen[static_cast<std::size_t>(g1.identity())] = 1;
    for (std::size_t head = 0; head < bfs.size(); ++head)
      for (std::size_t i = 0; i < gens.size(); ++i) {
        int y = g1.mul(bfs[head], gens[i]);
        if (!seen[static_cast<std::size_t>(y)]) {
          seen[static_cast<std::size_t>(y)] = 1;
          parent[static_cast<std::size_t>(y)] = bfs[head];
          via[static_cast<std::size_t>(y)] = static_cast<int>(i);
          bfs.push_back(y);
        }
      }
  }

  std::vector<int> images(gens.size(), -1);
  std::vector<int> phi(static_cast<std::size_t>(n), -1);

  auto try_complete = [&]() -> bool {
    std::fill(phi.begin(), phi.end(), -1);
    std::vector<char> used(static_cast<std::size_t>(n), 0);
    phi[static_cast<std::size_t>(g1.identity())] = g2.identity();
    used[static_cast<std::size_t>(g2.identity())] = 1;
    for (std::size_t k = 1; k < bfs.size(); ++k) {
      int y = bfs[k];
      int img = g2.mul(phi[static_cast<std::size_t>(parent[static_cast<std::size_t>(y)])],
                       images[static_cast<std::size_t>(via[static_cast<std::size_t>(y)])]);
      if (used[static_cast<std::size_t>(img)])
        return false;
      used[static_cast<std::size_t>(img)] = 1;
      phi[static_cast<std::size_t>(y)] = img;
    }
    for (int a = 0; a < n; ++a)
      for (std::size_t i = 0; i < gens.size(); ++i)
        if (phi[static_cast<std::size_t>(g1.mul(a, gens[i]))] !=
            g2.mul(phi[static_cast<std::size_t>(a)], images[i]))
          return false;
    return true;
  };

  auto search = [&](auto &&self, std::size_t depth) -> bool {
    if (depth == gens.size())
      return try_complete();
    std::vector<int> chosen(images.begin(), images.begin() + static_cast<std::ptrdiff_t>(depth));
    auto span = detail::span_of(g2, chosen);
    const int want = ord1[static_cast<std::size_t>(gens[depth])];
    for (int c = 0; c < n; ++c) {
      if (ord2[static_cast<std::size_t>(c)] != want || span[static_cast<std::size_t>(c)])
        continue;
      images[depth] = c;
      if (self(self, depth + 1))
        return true;
    }
    return false;
  };

  if (!search(search, 0))
    return {};
  return {true, phi};
}

/// One arc (u, u·g_color) of a Cayley color digraph.
struct ColoredArc {
  int tail = 0;
  int head = 0;
  int color = 0;
  friend bool operator==(const ColoredArc &, const ColoredArc &) = default;
};

struct ColoredDigraph {
  int node_count = 0;
  std::vector<ColoredArc> arcs; // node-major, then generator index
};

inline ColoredDigraph cayley_color_digraph(const FiniteGroup &g) {
  if (g.generators().empty() && g.order() != 1)
    throw PreconditionError("non-trivial group needs at least one generator");
  for (int s : g.generators())
    if (s == g.identity())
      throw PreconditionError("identity element cannot be a Cayley generator");
  ColoredDigraph d;
  d.node_count = g.order();
  for (int u = 0; u < g.order(); ++u)
    for (std::size_t i = 0; i < g.generators().size(); ++i)
      d.arcs.push_back({u, g.mul(u, g.generators()[i]), static_cast<int>(i)});
  return d;
}

/// Reads a group description.
///
///     # comment lines and blank lines are ignored
///     perm [DEGREE]
///     (0 1)(2 3)          one generator per line, disjoint-cycle notation
///     (0 1 2)             "()" is the identity
///
/// or
///
///     table
///     0 1 2               one row per element: row a lists a·b for b = 0..n-1
///     1 2 0
///     2 0 1
///     generators 1        optional; otherwise chosen greedily
///
/// A `perm` file with no generator lines is the trivial group and requires
/// DEGREE.
inline FiniteGroup read_group(std::istream &in, const Caps &caps = {}) {
  std::string line;
  int lineno = 0;
  std::string header;
  while (header.empty() && std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos)
      line.erase(hash);
    std::istringstream ss(line);
    ss >> header;
    if (header.empty())
      continue;
    if (header == "perm") {
      int degree = -1;
      std::string extra;
      if (ss >> extra) {
        try {
          std::size_t used = 0;
          degree = std::stoi(extra, &used);
          if (used != extra.size() || degree < 1)
            throw std::invalid_argument(extra);
        } catch (const std::exception &) {
          throw ParseError(lineno, "perm header expects a positive degree, got '" + extra + "'");
        }
      }
      std::vector<Permutation> gens;
      while (std::getline(in, line)) {
        ++lineno;
        auto h = line.find('#');
        if (h != std::string::npos)
          line.erase(h);
        if (line.find_first_not_of(" \t\r") == std::string::npos)
          continue;
        try {
          gens.push_back(parse_cycles(line, degree));
        } catch (const ParseError &e) {
          throw ParseError(lineno, e.what());
        }
      }
      if (gens.empty() && degree < 0)
        throw ParseError(lineno, "trivial group (no generators) needs 'perm DEGREE'");
      if (degree < 0) {
        int d = 0;
        for (const auto &s : gens)
          d = std::max(d, s.degree());
        for (auto &s : gens)
          if (s.degree() < d) {
            std::vector<int> img(s.images().begin(), s.images().end());
            for (int x = s.degree(); x < d; ++x)
              img.push_back(x);
            s = Permutation(std::move(img));
          }
        degree = d;
      }
      return closure_from_generators(gens, degree, caps.group_order);
    }
    if (header == "table") {
      std::vector<std::vector<int>> rows;
      std::vector<int> gens;
      while (std::getline(in, line)) {
        ++lineno;
        auto h = line.find('#');
        if (h != std::string::npos)
          line.erase(h);
        std::istringstream row(line);
        std::string tok;
        std::vector<int> values;
        bool gen_line = false;
        while (row >> tok) {
          if (values.empty() && !gen_line && tok == "generators") {
            gen_line = true;
            continue;
          }
          try {
            std::size_t used = 0;
            int v = std::stoi(tok, &used);
            if (used != tok.size())
              throw std::invalid_argument(tok);
            values.push_back(v);
          } catch (const std::exception &) {
            throw ParseError(lineno, "expected integer, got '" + tok + "'");
          }
        }
        if (gen_line)
          gens = values;
        else if (!values.empty())
          rows.push_back(std::move(values));
      }
      if (rows.size() > caps.group_order)
        throw CapExceeded("group order " + std::to_string(rows.size()) + " exceeds cap " +
                          std::to_string(caps.group_order));
      try {
        return FiniteGroup::from_table(rows, gens, caps.group_order);
      } catch (const PreconditionError &e) {
        throw ParseError(e.what());
      }
    }
    throw ParseError(lineno, "expected 'perm' or 'table' header, got '" + header + "'");
  }
  throw ParseError("empty group description");
}

inline FiniteGroup parse_group(const std::string &text, const Caps &caps = {}) {
  std::istringstream in(text);
  return read_group(in, caps);
}

} // namespace qfg

#endif // QFG_FINITE_GROUP_HPP
