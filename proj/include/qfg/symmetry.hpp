#ifndef QFG_SYMMETRY_HPP
#define QFG_SYMMETRY_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "automorphism.hpp"
#include "caps.hpp"
#include "error.hpp"
#include "metric_fem.hpp"

namespace qfg {

/// Unitary operator on the broken space of the form
/// (Πf)[k] = phase · f[source[k]].
///
/// For an edge map, block e of Πf is block edge_perm[e] of f, read backwards
/// where flips[e] is set; this is (Πf)_e = f_{π̃(e)} with the orientation of
/// each edge taken into account.
struct InducedOperator {
  std::vector<int> source;
  std::complex<double> phase{1.0, 0.0};
  std::optional<Permutation> edge_perm; // absent for pure phases
  std::vector<bool> flips;

  int dimension() const noexcept { return static_cast<int>(source.size()); }

  StateVector apply(const StateVector &f) const {
    StateVector out(f.size());
    for (std::size_t k = 0; k < source.size(); ++k)
      out[static_cast<Eigen::Index>(k)] = phase * f[source[k]];
    return out;
  }

  template <typename Derived>
  Eigen::MatrixXcd apply_rows(const Eigen::MatrixBase<Derived> &m) const {
    Eigen::MatrixXcd out(m.rows(), m.cols());
    for (std::size_t k = 0; k < source.size(); ++k)
      out.row(static_cast<Eigen::Index>(k)) = phase * m.row(source[k]).template cast<std::complex<double>>();
    return out;
  }

  Eigen::MatrixXcd matrix() const {
    Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(dimension(), dimension());
    for (std::size_t k = 0; k < source.size(); ++k)
      p(static_cast<Eigen::Index>(k), source[k]) = phase;
    return p;
  }

  /// Operator product (*this)·other.
  InducedOperator then_after(const InducedOperator &other) const {
    InducedOperator r;
    r.phase = phase * other.phase;
    r.source.resize(source.size());
    for (std::size_t k = 0; k < source.size(); ++k)
      r.source[k] = other.source[static_cast<std::size_t>(source[k])];
    if (edge_perm && other.edge_perm) {
      // (Π₁Π₂f)_e = (Π₂f)_{σ₁(e)} = f_{σ₂(σ₁(e))}
      r.edge_perm = compose(*other.edge_perm, *edge_perm);
      r.flips.resize(flips.size());
      for (std::size_t e = 0; e < flips.size(); ++e)
        r.flips[e] = flips[e] != other.flips[static_cast<std::size_t>((*edge_perm)[static_cast<int>(e)])];
    }
    return r;
  }

  friend bool operator==(const InducedOperator &a, const InducedOperator &b) {
    return a.source == b.source && a.phase == b.phase;
  }
};

inline InducedOperator induced_operator(const Permutation &edge_perm, const std::vector<bool> &flips,
                                        const Discretization &d) {
  if (edge_perm.degree() != d.edge_count() || static_cast<int>(flips.size()) != d.edge_count())
    throw PreconditionError("edge permutation size does not match the discretization");
  InducedOperator op;
  op.edge_perm = edge_perm;
  op.flips = flips;
  op.source.resize(static_cast<std::size_t>(d.dof_count()));
  const int n = d.mesh_n();
  for (int e = 0; e < d.edge_count(); ++e)
    for (int j = 0; j <= n; ++j)
      op.source[static_cast<std::size_t>(d.dof(e, j))] = d.dof(edge_perm[e], flips[static_cast<std::size_t>(e)] ? n - j : j);
  return op;
}

inline InducedOperator induced_operator(const Permutation &edge_perm, const Discretization &d) {
  return induced_operator(edge_perm, std::vector<bool>(static_cast<std::size_t>(edge_perm.degree()), false), d);
}

inline InducedOperator induced_operator(const InducedEdgeMap &map, const Discretization &d) {
  return induced_operator(map.edge_perm, map.flips, d);
}

/// e^{iθ}·I.
inline InducedOperator phase_operator(double theta, const Discretization &d) {
  InducedOperator op;
  op.phase = std::polar(1.0, theta);
  op.source.resize(static_cast<std::size_t>(d.dof_count()));
  for (int k = 0; k < d.dof_count(); ++k)
    op.source[static_cast<std::size_t>(k)] = k;
  return op;
}

/// A continuity equation ψ_a(v) = ψ_b(v) broken by an operator: after
/// applying Π, the two edge ends at `vertex` read ψ at different nodes.
struct ContinuityViolation {
  int vertex = 0;
  int edge_a = 0;
  int edge_b = 0;
  int source_edge_a = 0; // Πψ_a(v) is read from this edge ...
  int source_node_a = 0; // ... at this graph node
  int source_edge_b = 0;
  int source_node_b = 0;
};

/// Continuity equations of `d` that Π maps to inequivalent endpoint reads.
inline std::vector<ContinuityViolation> continuity_violations(const InducedOperator &op, const Discretization &d) {
  std::vector<ContinuityViolation> out;
  if (!op.edge_perm)
    return out;
  const auto &g = d.graph();
  auto read = [&](int e, bool at_head) {
    const int src_dof = op.source[static_cast<std::size_t>(d.endpoint_dof(e, at_head))];
    const int src_edge = src_dof / d.dofs_per_edge();
    const int local = src_dof % d.dofs_per_edge();
    const int node = local == 0 ? g.edge(src_edge).tail : g.edge(src_edge).head;
    return std::pair{src_edge, node};
  };
  for (const auto &eq : d.equations()) {
    auto [ea, na] = read(eq.edge_a, eq.at_head_a);
    auto [eb, nb] = read(eq.edge_b, eq.at_head_b);
    if (na != nb)
      out.push_back({eq.vertex, eq.edge_a, eq.edge_b, ea, na, eb, nb});
  }
  return out;
}

struct CheckOptions {
  double tol = 1e-10;           // domain invariance and form preservation
  double commutator_tol = 1e-10;
  double evolution_tol = 1e-8;
  std::vector<double> times{0.1, 1.0, 3.7};
  int states = 5;
  std::uint64_t seed = 20240607;
  int modes = -1; // all
};

struct SymmetryCertificate {
  bool domain_invariant = false;
  bool form_preserved = false;
  double domain_residual = 0.0; // max |C Π B|
  double form_residual = 0.0;   // ‖Bᵀ(Π*AΠ − A)B‖_F / ‖Ā‖_F
  std::optional<double> commutator_residual; // ‖ĀΠ̄ − Π̄Ā‖_F / ‖Ā‖_F
  std::optional<double> evolution_residual;  // max ‖Π U(t)ψ − U(t)Πψ‖_M over test times and states
  std::vector<ContinuityViolation> violations;
  bool verdict = false;

  bool residuals_within(const CheckOptions &o) const {
    return (!commutator_residual || *commutator_residual <= o.commutator_tol) &&
           (!evolution_residual || *evolution_residual <= o.evolution_tol);
  }
};

/// Decides whether candidate unitaries are symmetries of the discretized
/// quantum graph: Π must map the form domain into itself and preserve the
/// form there. Commutation with the restricted operator and with the modal
/// evolution is reported alongside.
class SymmetryChecker {
public:
  explicit SymmetryChecker(const Discretization &d, CheckOptions options = {})
      : SymmetryChecker(d, detail::full_restricted_spectrum(d), std::move(options)) {}

  SymmetryChecker(const Discretization &d, const Spectrum &full, CheckOptions options)
      : d_(&d), options_(std::move(options)), propagator_(d, full, options_.modes) {
    eigenvalues_ = full.eigenvalues;
    modes_ = full.eigenvectors;
    mass_modes_ = d.mass() * modes_;
    restricted_norm_ = std::max(d.restricted_stiffness().norm(), 1e-300);
    std::mt19937_64 rng(options_.seed);
    std::normal_distribution<double> normal;
    for (int s = 0; s < options_.states; ++s) {
      Eigen::VectorXcd coeff(d.domain_dimension());
      for (Eigen::Index k = 0; k < coeff.size(); ++k) {
        const double re = normal(rng);
        const double im = normal(rng);
        coeff[k] = {re, im};
      }
      StateVector psi = d.domain_basis().cast<std::complex<double>>() * coeff;
      psi /= d.norm(psi);
      states_.push_back(std::move(psi));
    }
  }

  const Discretization &discretization() const noexcept { return *d_; }
  const CheckOptions &options() const noexcept { return options_; }
  const ModalPropagator &propagator() const noexcept { return propagator_; }

  SymmetryCertificate check(const InducedOperator &op) const {
    const Discretization &d = *d_;
    if (op.dimension() != d.dof_count())
      throw PreconditionError("operator dimension does not match the discretization");
    SymmetryCertificate cert;
    const double modulus = std::abs(op.phase);

    // Π = phase · P with P the real 0/1 matrix of `source`.
    Eigen::SparseMatrix<double> p(d.dof_count(), d.dof_count());
    {
      std::vector<Eigen::Triplet<double>> t;
      for (std::size_t k = 0; k < op.source.size(); ++k)
        t.emplace_back(static_cast<int>(k), op.source[k], 1.0);
      p.setFromTriplets(t.begin(), t.end());
    }

    if (d.constraints().rows() > 0) {
      const Eigen::SparseMatrix<double> cp = d.constraints() * p;
      cert.domain_residual = modulus * (cp * d.domain_basis()).cwiseAbs().maxCoeff();
    }
    cert.domain_invariant = cert.domain_residual <= options_.tol;

    // (ΠB)ᴴA(ΠB) − Ā = Bᵀ(|phase|² PᵀAP − A)B; the sparse middle factor
    // vanishes identically for cell permutations that respect the form.
    Eigen::SparseMatrix<double> diff =
        Eigen::SparseMatrix<double>(modulus * modulus * (p.transpose() * d.stiffness() * p)) - d.stiffness();
    diff.prune(0.0);
    if (diff.nonZeros() > 0) {
      std::vector<int> rows;
      for (int k = 0; k < diff.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(diff, k); it; ++it)
          rows.push_back(static_cast<int>(it.row()));
      std::sort(rows.begin(), rows.end());
      rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
      const Eigen::MatrixXd db = diff * d.domain_basis();
      const Eigen::MatrixXd pulled = d.domain_basis()(rows, Eigen::all).transpose() * db(rows, Eigen::all);
      cert.form_residual = pulled.norm() / restricted_norm_;
    }
    cert.form_preserved = cert.form_residual <= options_.tol;
    cert.verdict = cert.domain_invariant && cert.form_preserved;
    cert.violations = continuity_violations(op, d);

    if (cert.domain_invariant) {
      // In the eigenbasis Φ of Ā: Π̄ becomes X = (MΦ)ᵀΠΦ and
      // ‖ĀΠ̄ − Π̄Ā‖_F = ‖(λ_i − λ_j) X_ij‖_F.
      const Eigen::MatrixXd pphi = p * modes_;
      const Eigen::MatrixXd x = mass_modes_.transpose() * pphi;
      double sum = 0.0;
      for (Eigen::Index j = 0; j < x.cols(); ++j)
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
          const double v = (eigenvalues_[i] - eigenvalues_[j]) * x(i, j);
          sum += v * v;
        }
      cert.commutator_residual = modulus * std::sqrt(sum) / restricted_norm_;

      double worst = 0.0;
      for (const auto &psi : states_)
        for (double t : options_.times) {
          const StateVector lhs = op.apply(propagator_.evolve(psi, t));
          const StateVector rhs = propagator_.evolve(op.apply(psi), t);
          worst = std::max(worst, d.norm(lhs - rhs));
        }
      cert.evolution_residual = worst;
    }
    return cert;
  }

private:
  const Discretization *d_;
  CheckOptions options_;
  ModalPropagator propagator_;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd modes_, mass_modes_;
  double restricted_norm_ = 1.0;
  std::vector<StateVector> states_;
};

inline SymmetryCertificate check_symmetry(const InducedOperator &op, const Discretization &d,
                                          const CheckOptions &options = {}) {
  return SymmetryChecker(d, options).check(op);
}

/// Orthogonal projection of H×H onto Graph(Σ) = {(x, Σx)}:
///
///     P = [ L    Σ*R ]     L = (I + Σ*Σ)^{-1}
///         [ ΣL   I−R ]     R = (I + ΣΣ*)^{-1}
struct GraphProjection {
  Eigen::MatrixXcd L, R;
  Eigen::MatrixXcd upper_left, upper_right, lower_left, lower_right;

  Eigen::MatrixXcd full() const {
    const Eigen::Index n = L.rows();
    Eigen::MatrixXcd p(2 * n, 2 * n);
    p << upper_left, upper_right, lower_left, lower_right;
    return p;
  }
};

inline GraphProjection vonneumann_projection(const Eigen::MatrixXcd &sigma) {
  if (sigma.rows() != sigma.cols())
    throw PreconditionError("vonneumann_projection: matrix must be square");
  const Eigen::Index n = sigma.rows();
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
  const Eigen::MatrixXcd ss = sigma.adjoint() * sigma;
  const Eigen::MatrixXcd tt = sigma * sigma.adjoint();
  GraphProjection p;
  p.L = (id + ss).llt().solve(id);
  p.R = (id + tt).llt().solve(id);
  p.upper_left = p.L;
  p.upper_right = sigma.adjoint() * p.R;
  p.lower_left = sigma * p.L;
  p.lower_right = id - p.R;
  return p;
}

struct OuhabazResult {
  bool invariant = false;          // Graph(Σ) invariant under the semigroup of a⊕a
  double form_residual = 0.0;      // ‖(I−P)* 𝐀 P‖ / scale, i.e. (a⊕a)(Pf, g−Pg) over all f, g
  double commutator_residual = 0.0; // ‖ΣA − AΣ‖ / scale
  bool agrees_with_commutator = false;
};

/// Finite-dimensional invariance test for Graph(Σ) under the semigroup
/// generated by the form with matrix `a` (everywhere defined, so only the
/// algebraic condition (a⊕a)(Pf, f − Pf) = 0 is active).
inline OuhabazResult ouhabaz_check(const Eigen::MatrixXcd &sigma, const Eigen::MatrixXcd &a, double tol = 1e-10) {
  if (a.rows() != a.cols() || a.rows() != sigma.rows() || sigma.rows() != sigma.cols())
    throw PreconditionError("ouhabaz_check: dimension mismatch");
  const double scale = std::max(1.0, a.norm() * std::max(1.0, sigma.norm()));
  if ((a - a.adjoint()).norm() > tol * std::max(1.0, a.norm()))
    throw PreconditionError("ouhabaz_check: form matrix is not symmetric");

  const Eigen::Index n = a.rows();
  Eigen::MatrixXcd doubled = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  doubled.topLeftCorner(n, n) = a;
  doubled.bottomRightCorner(n, n) = a;
  const Eigen::MatrixXcd p = vonneumann_projection(sigma).full();
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(2 * n, 2 * n);

  OuhabazResult r;
  // (a⊕a)(Pf, g − Pg) = gᴴ (I−P)ᴴ 𝐀 P f for all f, g.
  r.form_residual = ((id - p).adjoint() * doubled * p).norm() / scale;
  r.commutator_residual = (sigma * a - a * sigma).norm() / scale;
  r.invariant = r.form_residual <= tol;
  r.agrees_with_commutator = r.invariant == (r.commutator_residual <= tol);
  return r;
}

enum class OperatorKind { Induced, EdgeSymmetry, Phase };

inline const char *to_string(OperatorKind k) {
  switch (k) {
  case OperatorKind::Induced:
    return "induced";
  case OperatorKind::EdgeSymmetry:
    return "edge_symmetry";
  case OperatorKind::Phase:
    return "phase";
  }
  return "?";
}

struct OperatorReport {
  OperatorKind kind = OperatorKind::Induced;
  std::optional<Permutation> node_perm; // Induced only
  std::optional<Permutation> edge_perm;
  std::vector<bool> flips;
  double theta = 0.0; // Phase only
  SymmetryCertificate certificate;
  // EdgeSymmetry only, when flip exploration ran: a flip assignment that
  // makes Π preserve the form domain, if any exists.
  std::optional<bool> flips_explored;
  std::optional<std::vector<bool>> rescuing_flips;
};

struct ReportOptions {
  CheckOptions check;
  bool explore_flips = false;
  std::vector<double> phases{std::numbers::pi / 3.0, std::numbers::pi / 2.0};
};

struct SymmetryReport {
  WhitneyReport groups;
  int mesh_n = 0;
  int dof_count = 0;
  int domain_dimension = 0;
  std::vector<OperatorReport> operators;
  int distinct_passing_permutation_operators = 0;
  bool all_induced_pass = false;

  /// Lower bound for the order of the finite part certified here; the
  /// full symmetry group also contains the phases U(1).
  std::size_t realized_order_lower_bound() const noexcept {
    return static_cast<std::size_t>(distinct_passing_permutation_operators);
  }
};

/// Searches flip assignments for an edge permutation that keep every
/// continuity equation intact.
inline std::optional<std::vector<bool>> rescuing_flip_assignment(const Permutation &edge_perm, const Discretization &d,
                                                                 std::size_t edge_cap) {
  const int m = d.edge_count();
  if (static_cast<std::size_t>(m) > edge_cap)
    throw CapExceeded("flip exploration: " + std::to_string(m) + " edges exceeds cap " + std::to_string(edge_cap));
  std::vector<bool> flips(static_cast<std::size_t>(m));
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    for (int e = 0; e < m; ++e)
      flips[static_cast<std::size_t>(e)] = ((mask >> e) & 1U) != 0;
    if (continuity_violations(induced_operator(edge_perm, flips, d), d).empty())
      return flips;
  }
  return std::nullopt;
}

/// Certifies every induced operator of A(G), every non-induced edge
/// symmetry (with no flips) and a sample of global phases.
inline SymmetryReport symmetry_report(const QuantumGraphSpec &spec, const ReportOptions &options = {},
                                      const Caps &caps = {}) {
  SymmetryReport rep;
  rep.groups = whitney_status(spec.graph, caps);
  const Discretization d = discretize(spec);
  rep.mesh_n = d.mesh_n();
  rep.dof_count = d.dof_count();
  rep.domain_dimension = d.domain_dimension();
  const SymmetryChecker checker(d, options.check);

  std::vector<InducedOperator> passing;
  auto record_pass = [&](const InducedOperator &op) {
    if (std::find(passing.begin(), passing.end(), op) == passing.end())
      passing.push_back(op);
  };

  rep.all_induced_pass = true;
  for (const auto &pi : rep.groups.groups.node_auts) {
    const InducedEdgeMap map = induce_edge_map(pi, spec.graph);
    const InducedOperator op = induced_operator(map, d);
    OperatorReport r{OperatorKind::Induced, pi, map.edge_perm, map.flips, 0.0, checker.check(op), {}, {}};
    const bool ok = r.certificate.verdict && r.certificate.residuals_within(options.check);
    rep.all_induced_pass = rep.all_induced_pass && ok;
    if (r.certificate.verdict)
      record_pass(op);
    rep.operators.push_back(std::move(r));
  }

  for (const auto &sigma : non_induced_edge_symmetries(rep.groups.groups)) {
    const std::vector<bool> none(static_cast<std::size_t>(sigma.degree()), false);
    const InducedOperator op = induced_operator(sigma, none, d);
    OperatorReport r{OperatorKind::EdgeSymmetry, std::nullopt, sigma, none, 0.0, checker.check(op), {}, {}};
    if (r.certificate.verdict)
      record_pass(op);
    if (options.explore_flips) {
      r.flips_explored = true;
      r.rescuing_flips = rescuing_flip_assignment(sigma, d, caps.flip_search_edges);
    }
    rep.operators.push_back(std::move(r));
  }

  for (double theta : options.phases) {
    const InducedOperator op = phase_operator(theta, d);
    rep.operators.push_back({OperatorKind::Phase, std::nullopt, std::nullopt, {}, theta, checker.check(op), {}, {}});
  }
  rep.distinct_passing_permutation_operators = static_cast<int>(passing.size());
  return rep;
}

} // namespace qfg

#endif // QFG_SYMMETRY_HPP
