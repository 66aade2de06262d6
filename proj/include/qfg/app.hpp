#ifndef QFG_APP_HPP
#define QFG_APP_HPP

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "automorphism.hpp"
#include "caps.hpp"
#include "error.hpp"
#include "finite_group.hpp"
#include "frucht.hpp"
#include "graph.hpp"
#include "metric_fem.hpp"
#include "symmetry.hpp"

namespace qfg::app {

using Json = nlohmann::ordered_json;

enum class Format { Json, Text, Dot, Csv };

inline const char *to_string(Format f) {
  switch (f) {
  case Format::Json:
    return "json";
  case Format::Text:
    return "text";
  case Format::Dot:
    return "dot";
  case Format::Csv:
    return "csv";
  }
  return "?";
}

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int other = 1;
inline constexpr int parse_error = 2;
inline constexpr int cap_exceeded = 3;
inline constexpr int verification_failed = 4;
} // namespace exit_code

struct RunConfig {
  std::string subcommand; // build | aut | spectrum | verify | realize | counterexample
  std::vector<std::string> inputs;
  int mesh_n = 8;
  int modes = -1; // spectrum: 10 when unset; evolution: all
  double tol = 1e-10;
  double commutator_tol = 1e-10;
  double evolution_tol = 1e-8;
  std::uint64_t seed = 20240607;
  Format format = Format::Json;
  std::string out;       // empty: the output stream passed to run()
  std::string graph_out; // build: graph file
  bool explore_flips = false;
  Caps caps;
};

inline void validate(const RunConfig &c) {
  if (c.mesh_n < 2)
    throw PreconditionError("--mesh must be at least 2");
  if (!(c.tol > 0) || !(c.commutator_tol > 0) || !(c.evolution_tol > 0))
    throw PreconditionError("tolerances must be positive");
  if (c.modes < -1 || c.modes == 0)
    throw PreconditionError("--modes must be positive");
}

// ---- JSON building blocks -------------------------------------------------

inline std::string edge_label(int e) { return "e" + std::to_string(e + 1); }

/// Cycle notation on 1-based edge labels, e.g. "(e1 e4)".
inline std::string edge_cycles(const Permutation &p) {
  std::string s;
  for (const auto &c : p.cycles()) {
    s += '(';
    for (std::size_t k = 0; k < c.size(); ++k)
      s += (k ? " " : "") + edge_label(c[k]);
    s += ')';
  }
  return s.empty() ? "()" : s;
}

inline Json flipped_edges(const std::vector<bool> &flips) {
  Json out = Json::array();
  for (std::size_t e = 0; e < flips.size(); ++e)
    if (flips[e])
      out.push_back(edge_label(static_cast<int>(e)));
  return out;
}

inline Json graph_json(const SimpleGraph &g) {
  Json edges = Json::array();
  for (const auto &e : g.edges())
    edges.push_back({e.tail, e.head});
  return {{"nodes", g.node_count()}, {"edges", std::move(edges)}};
}

inline Json group_json(const FiniteGroup &g) {
  Json gens = Json::array();
  for (int s : g.generators()) {
    if (g.element_perms())
      gens.push_back((*g.element_perms())[static_cast<std::size_t>(s)].to_cycle_string());
    else
      gens.push_back(s);
  }
  return {{"order", g.order()}, {"generators", std::move(gens)}};
}

/// A small generating set of a permutation group given as its full element list.
inline std::vector<Permutation> group_generators(const std::vector<Permutation> &elements, const Caps &caps) {
  std::vector<Permutation> out;
  if (elements.size() <= 1)
    return out;
  const FiniteGroup g = group_from_permutations(elements, caps.group_order);
  for (int s : g.generators())
    out.push_back(elements[static_cast<std::size_t>(s)]);
  return out;
}

inline Json violation_json(const ContinuityViolation &v) {
  return {{"vertex", v.vertex},
          {"edges", {edge_label(v.edge_a), edge_label(v.edge_b)}},
          {"reads",
           {{{"edge", edge_label(v.source_edge_a)}, {"node", v.source_node_a}},
            {{"edge", edge_label(v.source_edge_b)}, {"node", v.source_node_b}}}}};
}

inline Json certificate_json(const SymmetryCertificate &c) {
  Json violations = Json::array();
  for (const auto &v : c.violations)
    violations.push_back(violation_json(v));
  Json j{{"verdict", c.verdict},
         {"domain_invariant", c.domain_invariant},
         {"form_preserved", c.form_preserved},
         {"domain_residual", c.domain_residual},
         {"form_residual", c.form_residual}};
  j["commutator_residual"] = c.commutator_residual ? Json(*c.commutator_residual) : Json(nullptr);
  j["evolution_residual"] = c.evolution_residual ? Json(*c.evolution_residual) : Json(nullptr);
  j["violations"] = std::move(violations);
  return j;
}

inline Json operator_json(const OperatorReport &r) {
  Json j{{"kind", to_string(r.kind)}};
  if (r.node_perm)
    j["node_perm"] = r.node_perm->to_cycle_string();
  if (r.edge_perm) {
    j["edge_perm"] = edge_cycles(*r.edge_perm);
    j["flipped_edges"] = flipped_edges(r.flips);
  }
  if (r.kind == OperatorKind::Phase)
    j["theta"] = r.theta;
  j["certificate"] = certificate_json(r.certificate);
  if (r.flips_explored)
    j["rescuing_flips"] = r.rescuing_flips ? flipped_edges(*r.rescuing_flips) : Json(nullptr);
  return j;
}

inline Json groups_json(const WhitneyReport &w) {
  return {{"node_aut_order", w.groups.node_aut_order()},
          {"edge_sym_order", w.groups.edge_sym_order()},
          {"induced_order", w.groups.induced_order()},
          {"whitney_status", to_string(w.status)},
          {"exceptional", w.exceptional ? Json(to_string(*w.exceptional)) : Json(nullptr)}};
}

inline CheckOptions check_options(const RunConfig &c) {
  CheckOptions o;
  o.tol = c.tol;
  o.commutator_tol = c.commutator_tol;
  o.evolution_tol = c.evolution_tol;
  o.seed = c.seed;
  o.modes = c.modes;
  return o;
}

inline Json symmetry_json(const SymmetryReport &rep, const CheckOptions &opts) {
  Json ops = Json::array();
  int induced = 0, induced_pass = 0, edge_syms = 0, edge_pass = 0;
  bool phases = true;
  for (const auto &r : rep.operators) {
    ops.push_back(operator_json(r));
    const bool ok = r.certificate.verdict && r.certificate.residuals_within(opts);
    switch (r.kind) {
    case OperatorKind::Induced:
      ++induced;
      induced_pass += ok;
      break;
    case OperatorKind::EdgeSymmetry:
      ++edge_syms;
      edge_pass += r.certificate.verdict;
      break;
    case OperatorKind::Phase:
      phases = phases && ok;
      break;
    }
  }
  Json check{{"tol", opts.tol},
             {"commutator_tol", opts.commutator_tol},
             {"evolution_tol", opts.evolution_tol},
             {"times", opts.times},
             {"states", opts.states},
             {"seed", opts.seed},
             {"modes", opts.modes}};
  Json summary{{"induced_operators", induced},
               {"induced_passing", induced_pass},
               {"all_induced_pass", rep.all_induced_pass},
               {"non_induced_edge_symmetries", edge_syms},
               {"non_induced_passing", edge_pass},
               {"phases_pass", phases},
               {"realized_symmetry_order",
                {{"relation", ">="},
                 {"lower_bound", rep.realized_order_lower_bound()},
                 {"node_aut_order", rep.groups.groups.node_aut_order()},
                 {"note", "finite part certified by permutation operators; global phases U(1) are extra symmetries"}}}};
  return {{"groups", groups_json(rep.groups)},
          {"mesh_n", rep.mesh_n},
          {"dof_count", rep.dof_count},
          {"domain_dimension", rep.domain_dimension},
          {"check", std::move(check)},
          {"operators", std::move(ops)},
          {"summary", std::move(summary)}};
}

// ---- Text rendering of the JSON structure ---------------------------------

namespace detail {

inline std::string scalar_text(const Json &j) {
  if (j.is_string())
    return j.get<std::string>();
  return j.dump();
}

inline bool is_flat(const Json &j) {
  return j.is_array() && std::all_of(j.begin(), j.end(), [](const Json &x) { return x.is_primitive(); });
}

inline void render_text(std::ostream &out, const Json &j, int indent) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  if (j.is_object()) {
    for (const auto &[key, value] : j.items()) {
      if (value.is_primitive()) {
        out << pad << key << ": " << scalar_text(value) << '\n';
      } else if (is_flat(value)) {
        out << pad << key << ":";
        for (const auto &x : value)
          out << ' ' << scalar_text(x);
        out << '\n';
      } else {
        out << pad << key << ":\n";
        render_text(out, value, indent + 2);
      }
    }
  } else if (j.is_array()) {
    for (const auto &x : j) {
      if (x.is_primitive() || is_flat(x)) {
        out << pad << "-";
        if (x.is_primitive())
          out << ' ' << scalar_text(x);
        else
          for (const auto &y : x)
            out << ' ' << scalar_text(y);
        out << '\n';
      } else {
        out << pad << "-\n";
        render_text(out, x, indent + 2);
      }
    }
  } else {
    out << pad << scalar_text(j) << '\n';
  }
}

} // namespace detail

inline std::string render(const Json &j, Format f) {
  std::ostringstream out;
  switch (f) {
  case Format::Json:
    out << j.dump(2) << '\n';
    break;
  case Format::Text:
    detail::render_text(out, j, 0);
    break;
  default:
    throw PreconditionError(std::string("format ") + to_string(f) + " is not available for this subcommand");
  }
  return out.str();
}

// ---- Subcommands ------------------------------------------------------------

namespace detail {

inline std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

template <typename Fn> auto parse_input(const std::string &path, Fn &&parse) {
  const std::string text = read_file(path);
  try {
    return parse(text);
  } catch (const ParseError &e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline FiniteGroup load_group(const RunConfig &c) {
  if (c.inputs.size() != 1)
    throw PreconditionError(c.subcommand + " expects one group file");
  return parse_input(c.inputs[0], [&](const std::string &t) { return parse_group(t, c.caps); });
}

inline SimpleGraph load_graph(const RunConfig &c) {
  if (c.inputs.size() != 1)
    throw PreconditionError(c.subcommand + " expects one graph file");
  return parse_input(c.inputs[0], [](const std::string &t) { return parse_graph(t); });
}

struct Outcome {
  std::string text;
  int status = exit_code::ok;
};

inline Outcome run_build(const RunConfig &c) {
  const FiniteGroup g = load_group(c);
  const FruchtGraph fg = frucht_graph(g);
  if (!c.graph_out.empty()) {
    std::ofstream f(c.graph_out, std::ios::binary);
    if (!f)
      throw Error("cannot write " + c.graph_out);
    write_graph(f, fg.graph);
  }
  if (c.format == Format::Dot) {
    std::ostringstream s;
    write_dot(s, fg.graph, fg.group_nodes);
    return {s.str()};
  }
  Json gadgets = Json::array();
  for (const auto &gd : fg.gadgets)
    gadgets.push_back({{"tail", gd.tail},
                       {"head", gd.head},
                       {"color", gd.color},
                       {"involution", gd.involution},
                       {"internal", gd.internal},
                       {"pendants", gd.pendants}});
  Json arcs = Json::object();
  for (int a = 0; a < g.order(); ++a)
    for (int i = 0; i < static_cast<int>(g.generators().size()); ++i)
      if (auto k = fg.gadget_of_arc(a, i))
        arcs[std::to_string(a) + ":" + std::to_string(i)] = *k;
  Json j{{"group", group_json(g)},
         {"graph", graph_json(fg.graph)},
         {"group_nodes", fg.group_nodes},
         {"gadget_of_arc", std::move(arcs)},
         {"gadgets", std::move(gadgets)}};
  return {render(j, c.format)};
}

inline Outcome run_aut(const RunConfig &c) {
  const SimpleGraph g = load_graph(c);
  if (c.format == Format::Dot) {
    std::ostringstream s;
    write_dot(s, g);
    return {s.str()};
  }
  const WhitneyReport w = whitney_status(g, c.caps);
  Json gens = Json::array(), edge_gens = Json::array(), non_induced = Json::array();
  for (const auto &p : group_generators(w.groups.node_auts, c.caps))
    gens.push_back(p.to_cycle_string());
  for (const auto &p : group_generators(w.groups.edge_syms, c.caps))
    edge_gens.push_back(edge_cycles(p));
  for (const auto &p : non_induced_edge_symmetries(w.groups))
    non_induced.push_back(edge_cycles(p));
  const GraphClassification cls = classify(g);
  Json j = groups_json(w);
  j["generators_in_cycle_notation"] = std::move(gens);
  j["edge_sym_generators"] = std::move(edge_gens);
  j["non_induced_edge_symmetries"] = std::move(non_induced);
  j["graph"] = graph_json(g);
  j["classification"] = {{"connected", cls.connected},
                         {"isolated_nodes", cls.isolated_nodes},
                         {"isolated_edges", cls.isolated_edges}};
  return {render(j, c.format)};
}

inline Outcome run_spectrum(const RunConfig &c) {
  const SimpleGraph g = load_graph(c);
  const Discretization d = discretize({g, c.mesh_n});
  const int k = std::min(c.modes < 0 ? 10 : c.modes, d.domain_dimension());
  const Spectrum s = spectrum(d, k);
  if (c.format == Format::Csv) {
    std::ostringstream out;
    out << std::setprecision(17) << "edge,tail,head,j,x";
    for (int m = 0; m < k; ++m)
      out << ",mode_" << m;
    out << '\n';
    for (int e = 0; e < d.edge_count(); ++e)
      for (int j = 0; j <= d.mesh_n(); ++j) {
        out << edge_label(e) << ',' << g.edge(e).tail << ',' << g.edge(e).head << ',' << j << ','
            << static_cast<double>(j) * d.h();
        for (int m = 0; m < k; ++m)
          out << ',' << s.eigenvectors(d.dof(e, j), m);
        out << '\n';
      }
    return {out.str()};
  }
  Json clusters = Json::array();
  for (const auto &cl : multiplicity_clusters(s.eigenvalues))
    clusters.push_back({{"value", cl.value}, {"first", cl.first}, {"multiplicity", cl.multiplicity}});
  std::vector<double> evals(s.eigenvalues.data(), s.eigenvalues.data() + s.eigenvalues.size());
  Json j{{"graph", graph_json(g)},
         {"mesh_n", d.mesh_n()},
         {"dof_count", d.dof_count()},
         {"domain_dimension", d.domain_dimension()},
         {"eigenvalues", evals},
         {"multiplicity_clusters", std::move(clusters)}};
  return {render(j, c.format)};
}

inline ReportOptions report_options(const RunConfig &c) {
  ReportOptions o;
  o.check = check_options(c);
  o.explore_flips = c.explore_flips;
  return o;
}

inline Outcome run_verify(const RunConfig &c) {
  const SimpleGraph g = load_graph(c);
  const ReportOptions opts = report_options(c);
  const SymmetryReport rep = symmetry_report({g, c.mesh_n}, opts, c.caps);
  Json j{{"graph", graph_json(g)}};
  j.update(symmetry_json(rep, opts.check));
  return {render(j, c.format), rep.all_induced_pass ? exit_code::ok : exit_code::verification_failed};
}

inline Outcome run_realize(const RunConfig &c) {
  const FiniteGroup g = load_group(c);
  const FruchtGraph fg = frucht_graph(g);
  const Realization real = verify_realization(g, fg.graph, c.caps);
  Json witness = Json::array();
  for (std::size_t a = 0; a < real.witness.size(); ++a) {
    Json w{{"element", a}};
    if (g.element_perms())
      w["element_perm"] = (*g.element_perms())[a].to_cycle_string();
    w["automorphism"] = real.automorphisms[static_cast<std::size_t>(real.witness[a])].to_cycle_string();
    witness.push_back(std::move(w));
  }
  Json j{{"group", group_json(g)},
         {"graph", graph_json(fg.graph)},
         {"realization",
          {{"realized", real.realized},
           {"automorphism_order", real.automorphisms.size()},
           {"group_order", g.order()},
           {"witness", std::move(witness)}}},
         {"symmetry", nullptr}};
  bool ok = real.realized;
  // An edgeless Frucht graph (trivial group) carries no metric graph.
  if (fg.graph.edge_count() == 0) {
    j["symmetry_note"] = "no edges: the quantum graph is empty and only the identity acts";
  } else {
    const ReportOptions opts = report_options(c);
    const SymmetryReport rep = symmetry_report({fg.graph, c.mesh_n}, opts, c.caps);
    j["symmetry"] = symmetry_json(rep, opts.check);
    ok = ok && rep.all_induced_pass;
  }
  return {render(j, c.format), ok ? exit_code::ok : exit_code::verification_failed};
}

/// Edges adjacent to both a and b, with the node each shares with a and with b.
inline Json shared_endpoint_mismatches(const SimpleGraph &g, int a, int b) {
  Json out = Json::array();
  auto shared = [&](int e, int f) -> int {
    const Edge &x = g.edge(e);
    if (g.edge(f).has_endpoint(x.tail))
      return x.tail;
    if (g.edge(f).has_endpoint(x.head))
      return x.head;
    return -1;
  };
  for (int f = 0; f < g.edge_count(); ++f) {
    if (f == a || f == b)
      continue;
    const int na = shared(f, a), nb = shared(f, b);
    if (na >= 0 && nb >= 0 && na != nb)
      out.push_back({{"edge", edge_label(f)},
                     {"node_shared_with_" + edge_label(a), na},
                     {"node_shared_with_" + edge_label(b), nb}});
  }
  return out;
}

inline Outcome run_counterexample(const RunConfig &c) {
  if (c.inputs.size() != 1 || c.inputs[0] != "paw")
    throw PreconditionError("counterexample: only 'paw' is available");
  const SimpleGraph g = graphs::paw();
  const Permutation sigma = parse_cycles("(0 3)", g.edge_count()); // (e1 e4)
  ReportOptions opts = report_options(c);
  opts.explore_flips = true;
  const SymmetryReport rep = symmetry_report({g, c.mesh_n}, opts, c.caps);
  const auto &groups = rep.groups.groups;

  const bool in_edge_syms = std::binary_search(groups.edge_syms.begin(), groups.edge_syms.end(), sigma);
  const bool induced = std::any_of(groups.induced.begin(), groups.induced.end(),
                                   [&](const InducedEdgeMap &m) { return m.edge_perm == sigma; });
  const OperatorReport *target = nullptr;
  for (const auto &r : rep.operators)
    if (r.kind == OperatorKind::EdgeSymmetry && r.edge_perm == sigma)
      target = &r;

  int center = 0;
  for (int v = 1; v < g.node_count(); ++v)
    if (g.degree(v) > g.degree(center))
      center = v;
  Json labels = Json::object();
  for (int e = 0; e < g.edge_count(); ++e)
    labels[edge_label(e)] = {g.edge(e).tail, g.edge(e).head};

  Json ce{{"edge_perm", edge_cycles(sigma)},
          {"in_edge_symmetries", in_edge_syms},
          {"induced", induced},
          {"center_vertex", center},
          {"shared_endpoint_mismatches", shared_endpoint_mismatches(g, 0, 3)}};
  bool reproduced = in_edge_syms && !induced && target != nullptr;
  if (target) {
    const auto &cert = target->certificate;
    reproduced = reproduced && !cert.domain_invariant && !target->rescuing_flips;
    Json at_center = Json::array();
    for (const auto &v : cert.violations)
      if (v.vertex == center)
        at_center.push_back(violation_json(v));
    ce["domain_invariant"] = cert.domain_invariant;
    ce["domain_residual"] = cert.domain_residual;
    ce["rescuing_flips"] = target->rescuing_flips ? flipped_edges(*target->rescuing_flips) : Json(nullptr);
    ce["violations_at_center"] = std::move(at_center);
    ce["violations"] = certificate_json(cert)["violations"];
  }
  ce["reproduced"] = reproduced;
  Json j{{"graph", graph_json(g)},
         {"edge_labels", std::move(labels)},
         {"groups", groups_json(rep.groups)},
         {"counterexample", std::move(ce)},
         {"report", symmetry_json(rep, opts.check)}};
  return {render(j, c.format), reproduced ? exit_code::ok : exit_code::verification_failed};
}

inline void require_format(const RunConfig &c, std::initializer_list<Format> allowed) {
  if (std::find(allowed.begin(), allowed.end(), c.format) == allowed.end())
    throw PreconditionError(std::string("format ") + to_string(c.format) + " is not available for " + c.subcommand);
}

} // namespace detail

/// Runs one subcommand; the artifact goes to `out` (or config.out),
/// diagnostics to `err`. Returns the process exit status.
inline int run(const RunConfig &config, std::ostream &out, std::ostream &err) {
  using enum Format;
  try {
    validate(config);
    detail::Outcome o;
    const std::string &sub = config.subcommand;
    if (sub == "build") {
      detail::require_format(config, {Json, Text, Dot});
      o = detail::run_build(config);
    } else if (sub == "aut") {
      detail::require_format(config, {Json, Text, Dot});
      o = detail::run_aut(config);
    } else if (sub == "spectrum") {
      detail::require_format(config, {Json, Text, Csv});
      o = detail::run_spectrum(config);
    } else if (sub == "verify") {
      detail::require_format(config, {Json, Text});
      o = detail::run_verify(config);
    } else if (sub == "realize") {
      detail::require_format(config, {Json, Text});
      o = detail::run_realize(config);
    } else if (sub == "counterexample") {
      detail::require_format(config, {Json, Text});
      o = detail::run_counterexample(config);
    } else {
      throw PreconditionError("unknown subcommand '" + sub + "'");
    }
    if (config.out.empty()) {
      out << o.text;
    } else {
      std::ofstream f(config.out, std::ios::binary);
      if (!f)
        throw Error("cannot write " + config.out);
      f << o.text;
    }
    if (o.status == exit_code::verification_failed)
      err << "qfg: verification failed\n";
    return o.status;
  } catch (const ParseError &e) {
    err << "qfg: parse error: " << e.what() << '\n';
    return exit_code::parse_error;
  } catch (const CapExceeded &e) {
    err << "qfg: cap exceeded: " << e.what() << " (raise with QFG_CAP)\n";
    return exit_code::cap_exceeded;
  } catch (const std::exception &e) {
    err << "qfg: error: " << e.what() << '\n';
    return exit_code::other;
  }
}

} // namespace qfg::app

#endif // QFG_APP_HPP
