#ifndef QFG_PERMUTATION_HPP
#define QFG_PERMUTATION_HPP

#include <cctype>
#include <compare>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"

namespace qfg {

/// A bijection of {0, ..., n-1}, stored as its image array.
class Permutation {
public:
  Permutation() = default;

  explicit Permutation(std::vector<int> images) : images_(std::move(images)) {
    std::vector<char> seen(images_.size(), 0);
    for (int x : images_) {
      if (x < 0 || static_cast<std::size_t>(x) >= images_.size() || seen[x])
        throw PreconditionError("image array is not a bijection");
      seen[x] = 1;
    }
  }

  static Permutation identity(int degree) {
    std::vector<int> images(static_cast<std::size_t>(degree));
    std::iota(images.begin(), images.end(), 0);
    Permutation p;
    p.images_ = std::move(images);
    return p;
  }

  int degree() const noexcept { return static_cast<int>(images_.size()); }
  int operator[](int i) const { return images_[static_cast<std::size_t>(i)]; }
  std::span<const int> images() const noexcept { return images_; }

  bool is_identity() const noexcept {
    for (std::size_t i = 0; i < images_.size(); ++i)
      if (images_[i] != static_cast<int>(i))
        return false;
    return true;
  }

  Permutation inverse() const {
    std::vector<int> inv(images_.size());
    for (std::size_t i = 0; i < images_.size(); ++i)
      inv[static_cast<std::size_t>(images_[i])] = static_cast<int>(i);
    Permutation p;
    p.images_ = std::move(inv);
    return p;
  }

  /// Disjoint cycles of length >= 2, each starting at its smallest point.
  std::vector<std::vector<int>> cycles() const {
    std::vector<std::vector<int>> out;
    std::vector<char> done(images_.size(), 0);
    for (std::size_t start = 0; start < images_.size(); ++start) {
      if (done[start] || images_[start] == static_cast<int>(start))
        continue;
      std::vector<int> cycle;
      for (int x = static_cast<int>(start); !done[static_cast<std::size_t>(x)]; x = images_[static_cast<std::size_t>(x)]) {
        done[static_cast<std::size_t>(x)] = 1;
        cycle.push_back(x);
      }
      out.push_back(std::move(cycle));
    }
    return out;
  }

  /// Disjoint-cycle notation, e.g. "(0 1)(2 3 4)"; the identity prints as "()".
  std::string to_cycle_string() const {
    auto cs = cycles();
    if (cs.empty())
      return "()";
    std::string s;
    for (const auto &c : cs) {
      s += '(';
      for (std::size_t i = 0; i < c.size(); ++i) {
        if (i)
          s += ' ';
        s += std::to_string(c[i]);
      }
      s += ')';
    }
    return s;
  }

  friend bool operator==(const Permutation &, const Permutation &) = default;
  friend auto operator<=>(const Permutation &a, const Permutation &b) { return a.images_ <=> b.images_; }

private:
  std::vector<int> images_;
};

/// Returns p∘q: q is applied first, then p.
inline Permutation compose(const Permutation &p, const Permutation &q) {
  if (p.degree() != q.degree())
    throw PreconditionError("compose: degree mismatch (" + std::to_string(p.degree()) + " vs " +
                            std::to_string(q.degree()) + ")");
  std::vector<int> images(static_cast<std::size_t>(p.degree()));
  for (int i = 0; i < p.degree(); ++i)
    images[static_cast<std::size_t>(i)] = p[q[i]];
  return Permutation(std::move(images));
}

/// Parses disjoint-cycle notation on points 0..degree-1.
///
/// `degree < 0` means "smallest degree containing every listed point".
/// Cycles need not be disjoint; they are multiplied right to left.
inline Permutation parse_cycles(std::string_view text, int degree = -1) {
  std::vector<std::vector<int>> cycles;
  std::size_t i = 0;
  auto skip_ws = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i])))
      ++i;
  };
  int max_point = -1;
  skip_ws();
  while (i < text.size()) {
    if (text[i] != '(')
      throw ParseError("expected '(' in cycle notation: " + std::string(text));
    ++i;
    std::vector<int> cycle;
    for (;;) {
      skip_ws();
      if (i >= text.size())
        throw ParseError("unterminated cycle: " + std::string(text));
      if (text[i] == ')') {
        ++i;
        break;
      }
      if (text[i] == ',') {
        ++i;
        continue;
      }
      if (!std::isdigit(static_cast<unsigned char>(text[i])))
        throw ParseError("unexpected character '" + std::string(1, text[i]) + "' in cycle notation");
      int value = 0;
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])))
        value = value * 10 + (text[i++] - '0');
      for (int existing : cycle)
        if (existing == value)
          throw ParseError("point " + std::to_string(value) + " repeated within a cycle");
      cycle.push_back(value);
      max_point = std::max(max_point, value);
    }
    cycles.push_back(std::move(cycle));
    skip_ws();
  }
  if (degree < 0)
    degree = max_point + 1;
  else if (max_point >= degree)
    throw ParseError("point " + std::to_string(max_point) + " outside degree " + std::to_string(degree));

  Permutation result = Permutation::identity(degree);
  for (auto it = cycles.rbegin(); it != cycles.rend(); ++it) {
    std::vector<int> images(static_cast<std::size_t>(degree));
    std::iota(images.begin(), images.end(), 0);
    const auto &c = *it;
    for (std::size_t k = 0; k < c.size(); ++k)
      images[static_cast<std::size_t>(c[k])] = c[(k + 1) % c.size()];
    result = compose(Permutation(std::move(images)), result);
  }
  return result;
}

} // namespace qfg

#endif // QFG_PERMUTATION_HPP
