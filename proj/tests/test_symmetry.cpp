#include <gtest/gtest.h>

#include <algorithm>
#include <numbers>
#include <random>
#include <set>

#include <Eigen/LU>

#include <qfg/frucht.hpp>
#include <qfg/symmetry.hpp>

#include "corpus.hpp"

using qfg::discretize;
using qfg::Permutation;
namespace graphs = qfg::graphs;

namespace {

std::vector<Permutation> all_permutations(int m) {
  std::vector<int> p(m);
  std::iota(p.begin(), p.end(), 0);
  std::vector<Permutation> out;
  do
    out.emplace_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

std::vector<bool> mask_flips(unsigned mask, int m) {
  std::vector<bool> f(m);
  for (int e = 0; e < m; ++e)
    f[e] = (mask >> e & 1U) != 0;
  return f;
}

Eigen::MatrixXcd random_complex(std::mt19937 &rng, int n) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXcd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double re = normal(rng), im = normal(rng);
      m(i, j) = {re, im};
    }
  return m;
}

Eigen::MatrixXcd random_unitary(std::mt19937 &rng, int n) {
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(random_complex(rng, n));
  return qr.householderQ() * Eigen::MatrixXcd::Identity(n, n);
}

} // namespace

TEST(InducedOperatorCheck, IdentityPasses) {
  auto d = discretize({graphs::paw(), 8});
  auto cert = qfg::check_symmetry(qfg::induced_operator(Permutation::identity(4), d), d);
  EXPECT_TRUE(cert.verdict);
  EXPECT_LT(cert.form_residual, 1e-14);
  ASSERT_TRUE(cert.commutator_residual && cert.evolution_residual);
  EXPECT_LT(*cert.commutator_residual, 1e-12);
  EXPECT_LT(*cert.evolution_residual, 1e-12);
  EXPECT_TRUE(cert.violations.empty());
}

TEST(InducedOperatorCheck, StarLeafSwapPasses) {
  auto g = graphs::star(3);
  auto d = discretize({g, 8});
  auto map = qfg::induce_edge_map(qfg::parse_cycles("(1 2)", 4), g);
  auto cert = qfg::check_symmetry(qfg::induced_operator(map, d), d);
  EXPECT_TRUE(cert.domain_invariant);
  EXPECT_TRUE(cert.form_preserved);
  EXPECT_LT(*cert.commutator_residual, 1e-10);
  EXPECT_LT(*cert.evolution_residual, 1e-8);
}

TEST(InducedOperatorCheck, PawE1E4SwapBreaksContinuity) {
  auto d = discretize({graphs::paw(), 8});
  auto op = qfg::induced_operator(qfg::parse_cycles("(0 3)", 4), d);
  auto cert = qfg::check_symmetry(op, d);
  EXPECT_FALSE(cert.domain_invariant);
  EXPECT_FALSE(cert.verdict);
  EXPECT_GT(cert.domain_residual, 0.1);
  EXPECT_FALSE(cert.commutator_residual.has_value());
  std::set<int> vertices;
  for (const auto &v : cert.violations)
    vertices.insert(v.vertex);
  EXPECT_EQ(vertices, (std::set<int>{0, 1, 2}));

  // A concrete continuous state whose image jumps at the centre node 2.
  qfg::StateVector psi = qfg::StateVector::Zero(d.dof_count());
  for (int e = 0; e < 4; ++e)
    for (int j = 0; j <= 8; ++j) {
      const auto &edge = d.graph().edge(e);
      const double x = j / 8.0;
      psi[d.dof(e, j)] = (1 - x) * edge.tail + x * edge.head; // node label, interpolated
    }
  ASSERT_TRUE(d.in_form_domain(psi));
  EXPECT_FALSE(d.in_form_domain(op.apply(psi)));
}

TEST(InducedOperatorCheck, NoFlipAssignmentRescuesPawE1E4) {
  auto d = discretize({graphs::paw(), 4});
  const auto sigma = qfg::parse_cycles("(0 3)", 4);
  EXPECT_FALSE(qfg::rescuing_flip_assignment(sigma, d, 16).has_value());
  qfg::SymmetryChecker checker(d);
  for (unsigned mask = 0; mask < 16; ++mask)
    EXPECT_FALSE(checker.check(qfg::induced_operator(sigma, mask_flips(mask, 4), d)).domain_invariant) << mask;
  EXPECT_THROW(qfg::rescuing_flip_assignment(sigma, d, 3), qfg::CapExceeded);
}

TEST(InducedOperatorCheck, PassingEdgeMapsAreExactlyTheInducedOnes) {
  // Connected graphs with ≤ 5 edges: (σ, flips) keeps continuity iff it is induced by a node automorphism.
  std::vector<qfg::SimpleGraph> gs{graphs::path(2), graphs::path(3), graphs::path(5), graphs::star(3),
                                   graphs::star(4), graphs::complete(3), graphs::paw(), graphs::diamond(),
                                   graphs::cycle(4), graphs::cycle(5),
                                   qfg::SimpleGraph(5, {{0, 1}, {1, 2}, {2, 0}, {2, 3}, {3, 4}})};
  for (const auto &g : gs) {
    const int m = g.edge_count();
    auto d = discretize({g, 3});
    std::set<std::pair<Permutation, std::vector<bool>>> induced, passing;
    for (const auto &pi : qfg::node_automorphisms(g)) {
      auto map = qfg::induce_edge_map(pi, g);
      induced.insert({map.edge_perm, map.flips});
    }
    for (const auto &sigma : all_permutations(m))
      for (unsigned mask = 0; mask < (1U << m); ++mask) {
        auto flips = mask_flips(mask, m);
        if (qfg::continuity_violations(qfg::induced_operator(sigma, flips, d), d).empty())
          passing.insert({sigma, flips});
      }
    EXPECT_EQ(passing, induced) << qfg::to_graph_text(g);
  }
}

TEST(InducedOperatorCheck, ViolationsAgreeWithDomainResidual) {
  std::mt19937 rng(3);
  for (const auto &g : {graphs::paw(), graphs::diamond(), graphs::star(3), graphs::complete(4)}) {
    const int m = g.edge_count();
    auto d = discretize({g, 4});
    qfg::SymmetryChecker checker(d);
    auto perms = all_permutations(m);
    std::uniform_int_distribution<std::size_t> pick(0, perms.size() - 1);
    for (int trial = 0; trial < 40; ++trial) {
      auto op = qfg::induced_operator(perms[pick(rng)], mask_flips(rng() & ((1U << m) - 1), m), d);
      auto cert = checker.check(op);
      EXPECT_EQ(cert.domain_invariant, cert.violations.empty());
      // Cell permutations always preserve the broken-space form, so
      // domain invariance alone decides.
      if (cert.domain_invariant) {
        EXPECT_TRUE(cert.form_preserved);
        EXPECT_TRUE(cert.residuals_within(checker.options()));
      }
    }
  }
}

TEST(InducedOperatorCheck, OperatorCompositionIsContravariant) {
  for (const auto &g : {graphs::star(3), graphs::complete(4), graphs::diamond()}) {
    auto d = discretize({g, 3});
    auto auts = qfg::node_automorphisms(g);
    for (const auto &p : auts)
      for (const auto &q : auts) {
        auto pq = qfg::induced_operator(qfg::induce_edge_map(p, g), d)
                      .then_after(qfg::induced_operator(qfg::induce_edge_map(q, g), d));
        EXPECT_EQ(pq, qfg::induced_operator(qfg::induce_edge_map(qfg::compose(q, p), g), d));
        EXPECT_LT((pq.matrix() - qfg::induced_operator(qfg::induce_edge_map(p, g), d).matrix() *
                                     qfg::induced_operator(qfg::induce_edge_map(q, g), d).matrix())
                      .norm(),
                  1e-15);
      }
  }
}

TEST(InducedOperatorCheck, PassingOperatorsAreClosedUnderComposition) {
  auto g = qfg::frucht_graph(corpus::cyclic(3)).graph;
  auto d = discretize({g, 3});
  qfg::SymmetryChecker checker(d);
  std::vector<qfg::InducedOperator> ops;
  for (const auto &pi : qfg::node_automorphisms(g))
    ops.push_back(qfg::induced_operator(qfg::induce_edge_map(pi, g), d));
  for (const auto &a : ops)
    for (const auto &b : ops) {
      auto ab = a.then_after(b);
      EXPECT_NE(std::find(ops.begin(), ops.end(), ab), ops.end());
      EXPECT_TRUE(checker.check(ab).verdict);
    }
}

TEST(InducedOperatorCheck, GlobalPhasesPass) {
  auto d = discretize({graphs::paw(), 6});
  qfg::SymmetryChecker checker(d);
  for (double theta : {0.0, 0.3, std::numbers::pi / 3, std::numbers::pi, 5.0}) {
    auto ph = qfg::phase_operator(theta, d);
    auto cert = checker.check(ph);
    EXPECT_TRUE(cert.verdict);
    EXPECT_TRUE(cert.residuals_within(checker.options()));
    // Phase times an induced symmetry is still a symmetry.
    auto swap = qfg::induced_operator(qfg::induce_edge_map(qfg::parse_cycles("(0 1)", 4), graphs::paw()), d);
    EXPECT_TRUE(checker.check(ph.then_after(swap)).verdict);
  }
}

TEST(InducedOperatorCheck, StarDegeneracyComesFromNonAbelianAction) {
  // S3 acts on the (π/2)² eigenspace of K1,3 without a common eigenvector, forcing multiplicity 2.
  auto g = graphs::star(3);
  auto d = discretize({g, 16});
  auto s = qfg::spectrum(d, d.domain_dimension());
  auto clusters = qfg::multiplicity_clusters(s.eigenvalues);
  ASSERT_EQ(clusters[1].multiplicity, 2);
  const Eigen::MatrixXcd phi = s.eigenvectors.middleCols(clusters[1].first, 2).cast<std::complex<double>>();
  const Eigen::MatrixXcd m = Eigen::MatrixXd(d.mass()).cast<std::complex<double>>();
  std::vector<Eigen::MatrixXcd> reps;
  for (const auto &pi : qfg::node_automorphisms(g)) {
    auto op = qfg::induced_operator(qfg::induce_edge_map(pi, g), d);
    const Eigen::MatrixXcd image = op.apply_rows(phi);
    const Eigen::MatrixXcd rep = phi.adjoint() * m * image;
    EXPECT_LT((image - phi * rep).norm(), 1e-10); // eigenspace is invariant
    reps.push_back(rep);
  }
  bool commute = true;
  for (const auto &a : reps)
    for (const auto &b : reps)
      commute = commute && (a * b - b * a).norm() < 1e-8;
  EXPECT_FALSE(commute);
}

TEST(VonNeumann, IdentityAndZero) {
  const int n = 4;
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n), zero = Eigen::MatrixXcd::Zero(n, n);
  auto p = qfg::vonneumann_projection(id);
  Eigen::MatrixXcd half(2 * n, 2 * n);
  half << id, id, id, id;
  EXPECT_LT((p.full() - 0.5 * half).norm(), 1e-12);
  auto z = qfg::vonneumann_projection(zero);
  Eigen::MatrixXcd first(2 * n, 2 * n);
  first << id, zero, zero, zero;
  EXPECT_LT((z.full() - first).norm(), 1e-12);
  EXPECT_THROW(qfg::vonneumann_projection(Eigen::MatrixXcd::Zero(2, 3)), qfg::PreconditionError);
}

TEST(VonNeumann, RandomMatricesGiveTheGraphProjection) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 7;
    Eigen::MatrixXcd sigma = random_complex(rng, n);
    if (trial % 5 == 0)
      sigma.col(0).setZero(); // singular Σ
    const Eigen::MatrixXcd p = qfg::vonneumann_projection(sigma).full();
    EXPECT_LT((p * p - p).norm(), 1e-12 * std::max(1.0, sigma.squaredNorm()));
    EXPECT_LT((p - p.adjoint()).norm(), 1e-12 * std::max(1.0, sigma.squaredNorm()));
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(p);
    lu.setThreshold(1e-9);
    EXPECT_EQ(lu.rank(), n);
    const Eigen::MatrixXcd x = random_complex(rng, n);
    Eigen::MatrixXcd graph(2 * n, n), perp(2 * n, n);
    graph << x, sigma * x;
    perp << -sigma.adjoint() * x, x;
    EXPECT_LT((p * graph - graph).norm(), 1e-10 * std::max(1.0, graph.norm()));
    EXPECT_LT((p * perp).norm(), 1e-10 * std::max(1.0, perp.norm()));
  }
}

TEST(Ouhabaz, Examples) {
  Eigen::MatrixXcd a(2, 2), swap(2, 2), diag(2, 2);
  a << 2, -1, -1, 2;
  swap << 0, 1, 1, 0;
  diag << 1, 0, 0, 3;
  auto r = qfg::ouhabaz_check(swap, a);
  EXPECT_TRUE(r.invariant);
  EXPECT_TRUE(r.agrees_with_commutator);
  auto s = qfg::ouhabaz_check(diag, a);
  EXPECT_FALSE(s.invariant);
  EXPECT_GT(s.form_residual, 0.01);
  EXPECT_TRUE(s.agrees_with_commutator);
  Eigen::MatrixXcd asym(2, 2);
  asym << 1, 2, 0, 1;
  EXPECT_THROW(qfg::ouhabaz_check(swap, asym), qfg::PreconditionError);
}

TEST(Ouhabaz, InvarianceMatchesCommutation) {
  std::mt19937 rng(7);
  int commuting = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 5;
    const Eigen::MatrixXcd q = random_unitary(rng, n);
    std::uniform_real_distribution<double> uni(0.0, 4.0);
    Eigen::VectorXd lam(n);
    for (int i = 0; i < n; ++i)
      lam[i] = uni(rng);
    if (trial % 3 == 1)
      lam.head(2).setConstant(lam[0]); // degenerate eigenspace
    const Eigen::MatrixXcd a = q * lam.cast<std::complex<double>>().asDiagonal() * q.adjoint();
    Eigen::MatrixXcd sigma;
    switch (trial % 3) {
    case 0: { // function of A
      Eigen::VectorXcd f(n);
      for (int i = 0; i < n; ++i)
        f[i] = {std::cos(lam[i]), lam[i] * lam[i]};
      sigma = q * f.asDiagonal() * q.adjoint();
      break;
    }
    case 1: { // arbitrary block on the degenerate eigenspace
      Eigen::MatrixXcd core = Eigen::MatrixXcd::Zero(n, n);
      core.topLeftCorner(2, 2) = random_complex(rng, 2);
      sigma = q * core * q.adjoint();
      break;
    }
    default:
      sigma = random_complex(rng, n);
    }
    const Eigen::MatrixXcd a_sym = 0.5 * (a + a.adjoint());
    auto r = qfg::ouhabaz_check(sigma, a_sym, 1e-9);
    EXPECT_TRUE(r.agrees_with_commutator) << trial << " form " << r.form_residual << " comm " << r.commutator_residual;
    if (trial % 3 != 2) {
      EXPECT_TRUE(r.invariant) << trial;
    } else {
      EXPECT_FALSE(r.invariant) << trial;
    }
    commuting += r.invariant;
  }
  EXPECT_EQ(commuting, 67);
}

TEST(SymmetryReport, StarAllSixPass) {
  auto rep = qfg::symmetry_report({graphs::star(3), 8});
  EXPECT_TRUE(rep.all_induced_pass);
  EXPECT_EQ(rep.distinct_passing_permutation_operators, 6);
  EXPECT_EQ(rep.realized_order_lower_bound(), 6u);
  int phases = 0, edge_only = 0;
  for (const auto &op : rep.operators) {
    phases += op.kind == qfg::OperatorKind::Phase && op.certificate.verdict;
    edge_only += op.kind == qfg::OperatorKind::EdgeSymmetry;
  }
  EXPECT_EQ(phases, 2);
  EXPECT_EQ(edge_only, 0);
}

TEST(SymmetryReport, PawNonInducedFail) {
  qfg::ReportOptions opts;
  opts.explore_flips = true;
  auto rep = qfg::symmetry_report({graphs::paw(), 8}, opts);
  EXPECT_TRUE(rep.all_induced_pass);
  EXPECT_EQ(rep.distinct_passing_permutation_operators, 2);
  int failing = 0;
  for (const auto &op : rep.operators)
    if (op.kind == qfg::OperatorKind::EdgeSymmetry) {
      EXPECT_FALSE(op.certificate.verdict);
      EXPECT_FALSE(op.certificate.violations.empty());
      ASSERT_TRUE(op.flips_explored.has_value());
      EXPECT_FALSE(op.rescuing_flips.has_value());
      ++failing;
    }
  EXPECT_EQ(failing, 2);
}

TEST(SymmetryReport, FruchtC3RealizesThree) {
  auto fg = qfg::frucht_graph(corpus::cyclic(3));
  auto rep = qfg::symmetry_report({fg.graph, 4});
  EXPECT_TRUE(rep.all_induced_pass);
  EXPECT_EQ(rep.distinct_passing_permutation_operators, 3);
  for (const auto &op : rep.operators) {
    EXPECT_TRUE(op.certificate.verdict);
    ASSERT_TRUE(op.certificate.evolution_residual.has_value());
    EXPECT_LT(*op.certificate.evolution_residual, 1e-8);
  }
}

TEST(SymmetryReport, SingleEdgeReflectionIsDistinct) {
  // Both automorphisms of K2 act on one edge; the swap reverses it.
  auto rep = qfg::symmetry_report({graphs::path(2), 6});
  EXPECT_EQ(rep.distinct_passing_permutation_operators, 2);
}

TEST(InducedOperatorCheck, ResidualsMatchDenseFormulas) {
  std::mt19937 rng(29);
  for (const auto &g : {graphs::paw(), graphs::star(3), graphs::diamond(), qfg::frucht_graph(corpus::cyclic(2)).graph}) {
    const int m = g.edge_count();
    auto d = discretize({g, 3});
    qfg::SymmetryChecker checker(d);
    const Eigen::MatrixXcd b = d.domain_basis().cast<std::complex<double>>();
    const Eigen::MatrixXcd a = Eigen::MatrixXd(d.stiffness()).cast<std::complex<double>>();
    const Eigen::MatrixXcd mb = (Eigen::MatrixXd(d.mass()) * d.domain_basis()).cast<std::complex<double>>();
    const Eigen::MatrixXcd abar = d.restricted_stiffness().cast<std::complex<double>>();
    std::vector<qfg::InducedOperator> ops;
    for (const auto &pi : qfg::node_automorphisms(g))
      ops.push_back(qfg::induced_operator(qfg::induce_edge_map(pi, g), d));
    std::uniform_int_distribution<int> edge(0, m - 1);
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<int> img(m);
      std::iota(img.begin(), img.end(), 0);
      std::swap(img[edge(rng)], img[edge(rng)]);
      ops.push_back(qfg::induced_operator(Permutation(img), mask_flips(rng(), m), d));
    }
    std::uniform_real_distribution<double> angle(0.0, 6.3);
    for (auto op : ops) {
      op.phase = std::polar(1.0, angle(rng));
      const auto cert = checker.check(op);
      const Eigen::MatrixXcd pb = op.matrix() * b;
      const double form = (pb.adjoint() * a * pb - abar).norm() / abar.norm();
      EXPECT_NEAR(cert.form_residual, form, 1e-12 * std::max(1.0, form));
      const double domain = (Eigen::MatrixXd(d.constraints()).cast<std::complex<double>>() * pb).cwiseAbs().maxCoeff();
      EXPECT_NEAR(cert.domain_residual, domain, 1e-12 * std::max(1.0, domain));
      if (cert.domain_invariant) {
        const Eigen::MatrixXcd pbar = mb.adjoint() * pb;
        const double comm = (abar * pbar - pbar * abar).norm() / abar.norm();
        ASSERT_TRUE(cert.commutator_residual.has_value());
        EXPECT_NEAR(*cert.commutator_residual, comm, 1e-11);
      }
    }
  }
}
