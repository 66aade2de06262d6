#ifndef QFG_METRIC_FEM_HPP
#define QFG_METRIC_FEM_HPP

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "error.hpp"
#include "graph.hpp"

namespace qfg {

using StateVector = Eigen::VectorXcd;

/// A metric graph with every edge identified with [0, 1] and meshed into
/// `mesh_n` uniform P1 cells.
struct QuantumGraphSpec {
  SimpleGraph graph;
  int mesh_n = 8;
};

/// One continuity equation ψ_a(v) = ψ_b(v): the endpoint of edge `edge_a`
/// (at_head_a selects the stored head) equals the endpoint of `edge_b`.
struct ContinuityEquation {
  int vertex = 0;
  int edge_a = 0;
  bool at_head_a = false;
  int edge_b = 0;
  bool at_head_b = false;
};

/// Broken P1 space: each edge owns mesh_n + 1 nodal values, endpoints
/// included, so vertex values are duplicated across incident edges and glued
/// by the constraint matrix.
class Discretization {
public:
  int mesh_n() const noexcept { return mesh_n_; }
  double h() const noexcept { return 1.0 / mesh_n_; }
  int edge_count() const noexcept { return graph_.edge_count(); }
  int dofs_per_edge() const noexcept { return mesh_n_ + 1; }
  int dof_count() const noexcept { return edge_count() * dofs_per_edge(); }
  const SimpleGraph &graph() const noexcept { return graph_; }

  int edge_dof_offset(int e) const noexcept { return e * dofs_per_edge(); }
  /// DOF of edge e at local node j (j = 0 is the stored tail).
  int dof(int e, int j) const noexcept { return edge_dof_offset(e) + j; }
  int endpoint_dof(int e, bool at_head) const noexcept { return dof(e, at_head ? mesh_n_ : 0); }

  const Eigen::SparseMatrix<double> &stiffness() const noexcept { return stiffness_; }
  const Eigen::SparseMatrix<double> &mass() const noexcept { return mass_; }
  /// One row per continuity equation; its kernel is the discrete form domain.
  const Eigen::SparseMatrix<double> &constraints() const noexcept { return constraints_; }
  const std::vector<ContinuityEquation> &equations() const noexcept { return equations_; }
  /// Continuous P1 functions: one column per interior node and per vertex of positive degree.
  const Eigen::SparseMatrix<double> &gather() const noexcept { return gather_; }
  /// Mass-orthonormal basis of ker C.
  const Eigen::MatrixXd &domain_basis() const noexcept { return basis_; }
  /// Bᵀ·stiffness·B for B = domain_basis().
  const Eigen::MatrixXd &restricted_stiffness() const noexcept { return restricted_stiffness_; }
  int domain_dimension() const noexcept { return static_cast<int>(basis_.cols()); }

  double constraint_residual(const StateVector &psi) const {
    if (psi.size() != dof_count())
      throw PreconditionError("state has " + std::to_string(psi.size()) + " coefficients, expected " +
                              std::to_string(dof_count()));
    if (constraints_.rows() == 0)
      return 0.0;
    return (constraints_.cast<std::complex<double>>() * psi).cwiseAbs().maxCoeff();
  }

  bool in_form_domain(const StateVector &psi, double tol = 1e-10) const { return constraint_residual(psi) <= tol; }

  /// Mass inner product (φ, ψ)_M = φᴴ M ψ.
  std::complex<double> inner(const StateVector &phi, const StateVector &psi) const {
    return phi.dot(mass_.cast<std::complex<double>>() * psi);
  }
  double norm(const StateVector &psi) const { return std::sqrt(std::max(0.0, inner(psi, psi).real())); }

  friend Discretization discretize(const QuantumGraphSpec &spec);

private:
  SimpleGraph graph_;
  int mesh_n_ = 0;
  Eigen::SparseMatrix<double> stiffness_, mass_, constraints_, gather_;
  std::vector<ContinuityEquation> equations_;
  Eigen::MatrixXd basis_;
  Eigen::MatrixXd restricted_stiffness_;
};

inline Discretization discretize(const QuantumGraphSpec &spec) {
  if (spec.mesh_n < 2)
    throw PreconditionError("mesh_n must be at least 2");
  const SimpleGraph &g = spec.graph;
  if (g.edge_count() == 0)
    throw PreconditionError("quantum graph needs at least one edge");
  if (!classify(g).connected)
    throw PreconditionError("quantum graph must be connected");

  Discretization d;
  d.graph_ = g;
  d.mesh_n_ = spec.mesh_n;
  const int n = d.mesh_n_;
  const int dofs = d.dof_count();
  const double h = d.h();

  using Triplet = Eigen::Triplet<double>;
  std::vector<Triplet> a, m;
  for (int e = 0; e < g.edge_count(); ++e)
    for (int cell = 0; cell < n; ++cell) {
      const int i = d.dof(e, cell), j = i + 1;
      a.insert(a.end(), {{i, i, 1.0 / h}, {j, j, 1.0 / h}, {i, j, -1.0 / h}, {j, i, -1.0 / h}});
      m.insert(m.end(), {{i, i, h / 3.0}, {j, j, h / 3.0}, {i, j, h / 6.0}, {j, i, h / 6.0}});
    }
  d.stiffness_.resize(dofs, dofs);
  d.stiffness_.setFromTriplets(a.begin(), a.end());
  d.mass_.resize(dofs, dofs);
  d.mass_.setFromTriplets(m.begin(), m.end());

  // Vertex v with incident edge ends d_1..d_k contributes rows d_1 - d_j.
  std::vector<Triplet> c, gather;
  int row = 0, col = 0;
  for (int v = 0; v < g.node_count(); ++v) {
    const auto &inc = g.incident_edges(v);
    if (inc.empty())
      continue;
    const int first = inc.front();
    const bool first_head = g.edge(first).head == v;
    for (std::size_t k = 1; k < inc.size(); ++k) {
      const bool head = g.edge(inc[k]).head == v;
      c.emplace_back(row, d.endpoint_dof(first, first_head), 1.0);
      c.emplace_back(row, d.endpoint_dof(inc[k], head), -1.0);
      d.equations_.push_back({v, first, first_head, inc[k], head});
      ++row;
    }
    for (int e : inc)
      gather.emplace_back(d.endpoint_dof(e, g.edge(e).head == v), col, 1.0);
    ++col;
  }
  for (int e = 0; e < g.edge_count(); ++e)
    for (int j = 1; j < n; ++j)
      gather.emplace_back(d.dof(e, j), col++, 1.0);
  d.constraints_.resize(row, dofs);
  d.constraints_.setFromTriplets(c.begin(), c.end());
  d.gather_.resize(dofs, col);
  d.gather_.setFromTriplets(gather.begin(), gather.end());

  // B = G L^{-T} with Gᵀ M G = L Lᵀ, so Bᵀ M B = I.
  const Eigen::SparseMatrix<double> gram_sparse = d.gather_.transpose() * d.mass_ * d.gather_;
  const Eigen::MatrixXd gram(gram_sparse);
  const Eigen::MatrixXd gather_dense(d.gather_);
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success)
    throw Error("restricted mass matrix is not positive definite");
  const Eigen::MatrixXd lower = llt.matrixL();
  d.basis_ = lower.triangularView<Eigen::Lower>().solve(gather_dense.transpose()).transpose();
  const Eigen::MatrixXd ab = d.stiffness_ * d.basis_;
  d.restricted_stiffness_ = d.basis_.transpose() * ab;
  d.restricted_stiffness_ = 0.5 * (d.restricted_stiffness_ + d.restricted_stiffness_.transpose()).eval();
  return d;
}

/// a(ψ, ψ) = ψᴴ·stiffness·ψ on the broken space.
inline double quadratic_form(const Discretization &d, const StateVector &psi) {
  if (psi.size() != d.dof_count())
    throw PreconditionError("quadratic_form: dimension mismatch");
  return std::max(0.0, psi.dot(d.stiffness().cast<std::complex<double>>() * psi).real());
}

struct Spectrum {
  Eigen::VectorXd eigenvalues;  // ascending
  Eigen::MatrixXd eigenvectors; // broken-space coefficients, mass-orthonormal, one per column
};

namespace detail {

inline Spectrum full_restricted_spectrum(const Discretization &d) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(d.restricted_stiffness());
  if (solver.info() != Eigen::Success)
    throw Error("eigensolver did not converge");
  Spectrum s;
  s.eigenvalues = solver.eigenvalues().cwiseMax(0.0);
  s.eigenvectors = d.domain_basis() * solver.eigenvectors();
  // Fix signs: the largest-magnitude coefficient of each mode is positive.
  for (Eigen::Index k = 0; k < s.eigenvectors.cols(); ++k) {
    Eigen::Index arg = 0;
    s.eigenvectors.col(k).cwiseAbs().maxCoeff(&arg);
    if (s.eigenvectors(arg, k) < 0)
      s.eigenvectors.col(k) *= -1.0;
  }
  return s;
}

} // namespace detail

/// Lowest k eigenpairs of the Laplacian on the discrete form domain.
inline Spectrum spectrum(const Discretization &d, int k) {
  if (k < 0 || k > d.domain_dimension())
    throw PreconditionError("requested " + std::to_string(k) + " modes, form domain has dimension " +
                            std::to_string(d.domain_dimension()));
  Spectrum full = detail::full_restricted_spectrum(d);
  return {full.eigenvalues.head(k), full.eigenvectors.leftCols(k)};
}

struct EigenCluster {
  double value = 0.0; // mean eigenvalue
  int first = 0;      // index of the first eigenvalue in the cluster
  int multiplicity = 0;
};

/// Groups ascending eigenvalues whose consecutive gaps are ≤ tol·max(1, λ).
inline std::vector<EigenCluster> multiplicity_clusters(const Eigen::VectorXd &eigenvalues, double tol = 1e-6) {
  std::vector<EigenCluster> out;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    const double lambda = eigenvalues[i];
    if (!out.empty()) {
      const double prev = eigenvalues[i - 1];
      if (lambda - prev <= tol * std::max(1.0, std::abs(prev))) {
        auto &c = out.back();
        c.value = (c.value * c.multiplicity + lambda) / (c.multiplicity + 1);
        ++c.multiplicity;
        continue;
      }
    }
    out.push_back({lambda, static_cast<int>(i), 1});
  }
  return out;
}

/// Modal Schrödinger propagator ψ(t) = Σ_k e^{-iλ_k t} φ_k (φ_k, ψ0)_M.
///
/// A cutoff that would split a cluster of (numerically) equal eigenvalues is
/// extended to the end of that cluster.
class ModalPropagator {
public:
  explicit ModalPropagator(const Discretization &d, int modes = -1, double cluster_tol = 1e-6)
      : ModalPropagator(d, detail::full_restricted_spectrum(d), modes, cluster_tol) {}

  /// `full` must be the complete spectrum of `d`.
  ModalPropagator(const Discretization &d, const Spectrum &full, int modes, double cluster_tol = 1e-6) : d_(&d) {
    int k = modes < 0 ? static_cast<int>(full.eigenvalues.size()) : modes;
    if (k > full.eigenvalues.size())
      throw PreconditionError("requested " + std::to_string(k) + " modes, form domain has dimension " +
                              std::to_string(full.eigenvalues.size()));
    if (k > 0)
      for (const auto &c : multiplicity_clusters(full.eigenvalues, cluster_tol))
        if (c.first < k && c.first + c.multiplicity > k)
          k = c.first + c.multiplicity;
    modes_ = {full.eigenvalues.head(k), full.eigenvectors.leftCols(k)};
    mass_modes_ = (d.mass() * modes_.eigenvectors).transpose();
  }

  const Spectrum &modes() const noexcept { return modes_; }
  int mode_count() const noexcept { return static_cast<int>(modes_.eigenvalues.size()); }

  StateVector evolve(const StateVector &psi0, double t, double membership_tol = 1e-10) const {
    if (d_->constraint_residual(psi0) > membership_tol)
      throw PreconditionError("initial state is outside the discrete form domain");
    const Eigen::VectorXcd coeff = mass_modes_.cast<std::complex<double>>() * psi0;
    Eigen::VectorXcd phased(coeff.size());
    for (Eigen::Index k = 0; k < coeff.size(); ++k)
      phased[k] = std::polar(1.0, -modes_.eigenvalues[k] * t) * coeff[k];
    return modes_.eigenvectors.cast<std::complex<double>>() * phased;
  }

private:
  const Discretization *d_;
  Spectrum modes_;
  Eigen::MatrixXd mass_modes_; // Φᵀ M
};

inline StateVector evolve(const Discretization &d, const StateVector &psi0, double t, int modes = -1) {
  return ModalPropagator(d, modes).evolve(psi0, t);
}

} // namespace qfg

#endif // QFG_METRIC_FEM_HPP
