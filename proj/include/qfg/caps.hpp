#ifndef QFG_CAPS_HPP
#define QFG_CAPS_HPP

#include <cstddef>
#include <cstdlib>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

#include "error.hpp"

namespace qfg {

/// Size limits for the exhaustive algorithms.
struct Caps {
  std::size_t group_order = 20160;    // closure and abstract group size
  std::size_t automorphism_nodes = 1024; // node / line-graph node count for A(G), A*(G)
  std::size_t isomorphism_nodes = 16; // graphs_isomorphic
  std::size_t flip_search_edges = 16; // exhaustive orientation-flip exploration
};

/// Applies a QFG_CAP style override to `caps`.
///
/// Accepts either a single integer, which replaces every cap, or a comma
/// separated list of `key=value` pairs with keys `group`, `aut`, `iso`,
/// `flips`.
inline Caps apply_cap_override(Caps caps, std::string_view text) {
  auto parse_count = [](std::string_view s) -> std::size_t {
    std::size_t value = 0;
    if (s.empty())
      throw ParseError("QFG_CAP: empty value");
    for (char c : s) {
      if (c < '0' || c > '9')
        throw ParseError("QFG_CAP: not a non-negative integer: " + std::string(s));
      value = value * 10 + static_cast<std::size_t>(c - '0');
    }
    return value;
  };

  if (text.find('=') == std::string_view::npos) {
    std::size_t v = parse_count(text);
    caps.group_order = caps.automorphism_nodes = caps.isomorphism_nodes = caps.flip_search_edges = v;
    return caps;
  }

  std::string item;
  std::istringstream in{std::string(text)};
  while (std::getline(in, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos)
      throw ParseError("QFG_CAP: expected key=value, got " + item);
    std::string key = item.substr(0, eq);
    std::size_t v = parse_count(std::string_view(item).substr(eq + 1));
    if (key == "group")
      caps.group_order = v;
    else if (key == "aut")
      caps.automorphism_nodes = v;
    else if (key == "iso")
      caps.isomorphism_nodes = v;
    else if (key == "flips")
      caps.flip_search_edges = v;
    else
      throw ParseError("QFG_CAP: unknown key " + key);
  }
  return caps;
}

inline Caps caps_from_environment(Caps base = {}) {
  if (const char *env = std::getenv("QFG_CAP"); env != nullptr && *env != '\0')
    return apply_cap_override(base, env);
  return base;
}

} // namespace qfg

#endif // QFG_CAPS_HPP
