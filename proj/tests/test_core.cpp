#include <gtest/gtest.h>

#include <unsupported/Eigen/MatrixFunctions>
#include <sstream>

#include "fracgraph/generators.hpp"
#include "fracgraph/graph.hpp"
#include "fracgraph/io.hpp"
#include "fracgraph/matfun.hpp"
#include "fracgraph/walks.hpp"

using namespace fracgraph;
using Eigen::MatrixXd;

namespace {

Graph parse(const std::string& text, EdgeListOptions opt = {}) {
  std::istringstream in(text);
  return parse_edge_list(in, opt);
}

// The 3-node digraph with arcs 0->1, 1->2, 2->0, 2->1.
Graph skew_example() { return Graph(3, true, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 0, 1.0}, {2, 1, 1.0}}); }

Graph triangle() { return gen::complete(3); }

double max_offdiag(const MatrixXd& m) {
  double v = -1e300;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (i != j) v = std::max(v, m(i, j));
  return v;
}

}  // namespace

// ---------------------------------------------------------------- graph

TEST(EdgeList, SymmetricClosure) {
  auto g = parse("0 1\n1 2\n", {false, true});
  EXPECT_EQ(g.n(), 3u);
  EXPECT_FALSE(g.directed());
  EXPECT_EQ(g.arcs().size(), 4u);
  for (const auto& a : g.arcs()) EXPECT_EQ(a.weight, 1.0);
}

TEST(EdgeList, CommentAndOneBased) {
  auto g = parse("# c\n1 2 0.5", {true, false});
  ASSERT_EQ(g.arcs().size(), 1u);
  EXPECT_EQ(g.arcs()[0].src, 0u);
  EXPECT_EQ(g.arcs()[0].dst, 1u);
  EXPECT_EQ(g.arcs()[0].weight, 0.5);
}

TEST(EdgeList, Rejections) {
  EXPECT_THROW(parse("0 0 1.0"), InputError);
  EXPECT_THROW(parse("0 1 -2"), InputError);
  EXPECT_THROW(parse("0 1\n0 1\n"), InputError);
  EXPECT_THROW(parse("0 x\n"), InputError);
  EXPECT_THROW(parse("0 1 2 3\n"), InputError);
  EXPECT_THROW(parse("0 1 1\n1 0 2\n", {false, true}), InputError);
  try {
    parse("0 1\n\n2 2\n");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find(":3:"), std::string::npos);
  }
}

TEST(EdgeList, RemapsSparseIds) {
  auto g = parse("10 40\n40 7\n");
  EXPECT_EQ(g.n(), 3u);
  EXPECT_EQ(g.original_ids(), (std::vector<std::int64_t>{7, 10, 40}));
}

TEST(Components, TwoTrianglesAndIsolated) {
  // equal sizes: the component holding the smallest original id wins
  Graph g = Graph::undirected(7, {{3, 4, 1}, {4, 5, 1}, {3, 5, 1}, {0, 1, 1}, {1, 2, 1}, {0, 2, 1}});
  auto c = largest_connected_component(g);
  EXPECT_EQ(c.n(), 3u);
  EXPECT_EQ(c.original_ids(), (std::vector<std::int64_t>{0, 1, 2}));
}

TEST(Components, DirectedTieBreak) {
  Graph g(5, true, {{0, 1, 1}, {2, 3, 1}});
  auto c = largest_connected_component(g, Connectivity::Weak);
  EXPECT_EQ(c.original_ids(), (std::vector<std::int64_t>{0, 1}));
}

TEST(Components, StrongVsWeak) {
  Graph g(4, true, {{0, 1, 1}, {1, 0, 1}, {1, 2, 1}, {2, 3, 1}, {3, 2, 1}, {3, 1, 1}});
  EXPECT_EQ(largest_connected_component(g, Connectivity::Strong).n(), 4u);
  Graph h(4, true, {{0, 1, 1}, {1, 0, 1}, {1, 2, 1}, {2, 3, 1}});
  EXPECT_EQ(largest_connected_component(h, Connectivity::Strong).n(), 2u);
  EXPECT_EQ(largest_connected_component(h, Connectivity::Weak).n(), 4u);
}

TEST(Components, ConnectedGraphUnchanged) {
  auto g = gen::grid(3, 4);
  auto c = largest_connected_component(g);
  EXPECT_EQ(c.n(), g.n());
  EXPECT_TRUE(c.weight_matrix().isApprox(g.weight_matrix()));
}

TEST(Degrees, Examples) {
  auto dt = degree_vectors(triangle());
  EXPECT_TRUE(dt.d.isApprox(Eigen::Vector3d(2, 2, 2)));
  auto de = degree_vectors(skew_example());
  EXPECT_TRUE(de.d_out.isApprox(Eigen::Vector3d(1, 1, 2)));
  EXPECT_TRUE(de.d_in.isApprox(Eigen::Vector3d(1, 2, 1)));
  auto dw = degree_vectors(Graph(2, true, {{0, 1, 0.5}}));
  EXPECT_EQ(dw.d_out, Eigen::Vector2d(0.5, 0));
  EXPECT_EQ(dw.d_in, Eigen::Vector2d(0, 0.5));
}

TEST(Laplacian, Examples) {
  MatrixXd lt(3, 3);
  lt << 2, -1, -1, -1, 2, -1, -1, -1, 2;
  EXPECT_EQ(build_laplacian(triangle(), LaplacianKind::UndirectedCombinatorial).entries, lt);
  MatrixXd le(3, 3);
  le << 1, -1, 0, 0, 1, -1, -1, -1, 2;
  EXPECT_EQ(build_laplacian(skew_example(), LaplacianKind::DirectedOut).entries, le);
  MatrixXd lp = MatrixXd::Zero(4, 4);
  for (int i = 0; i < 3; ++i) lp(i, i) = 1, lp(i, i + 1) = -1;
  EXPECT_EQ(build_laplacian(gen::path(4, true), LaplacianKind::DirectedOut).entries, lp);
}

TEST(Laplacian, ZeroDegreeNeedsFixup) {
  auto g = gen::path(4, true);
  EXPECT_THROW(build_laplacian(g, LaplacianKind::DirectedOutNormalized), InputError);
  auto l = build_laplacian(g, LaplacianKind::DirectedOutNormalized, {true});
  EXPECT_LE(l.entries.rowwise().sum().cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_THROW(build_laplacian(g, LaplacianKind::UndirectedCombinatorial), InputError);
}

TEST(Laplacian, FixupSpreadsDanglingRow) {
  auto g = gen::path(5, true);  // node 4 has no out-arcs, node 0 no in-arcs
  auto lo = build_laplacian(g, LaplacianKind::DirectedOut, {true});
  for (int j = 0; j < 4; ++j) EXPECT_DOUBLE_EQ(lo(4, j), -0.2);
  EXPECT_DOUBLE_EQ(lo(4, 4), 0.8);
  auto li = build_laplacian(g, LaplacianKind::DirectedIn, {true});
  for (int i = 1; i < 5; ++i) EXPECT_DOUBLE_EQ(li(i, 0), -0.2);
  EXPECT_LE(li.entries.colwise().sum().cwiseAbs().maxCoeff(), 1e-15);
  auto ln = build_laplacian(g, LaplacianKind::DirectedOutNormalized, {true});
  MatrixXd p = MatrixXd::Identity(5, 5) - ln.entries;
  EXPECT_LE((p.rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-15);
}

// Property: zero row sums, sign pattern, L = B B^T.
class LaplacianProperty : public ::testing::TestWithParam<int> {};

TEST_P(LaplacianProperty, Holds) {
  const int s = GetParam();
  gen::RandomGraphOptions ro;
  ro.weighted = s % 2 == 1;
  auto g = gen::random_connected(10 + 7 * s, 100 + s, ro);
  auto l = build_laplacian(g, LaplacianKind::UndirectedCombinatorial);
  double scale = max_abs(l.entries);
  EXPECT_LE(l.entries.rowwise().sum().cwiseAbs().maxCoeff(), 1e-12 * scale);
  EXPECT_LE(max_offdiag(l.entries), 0.0);
  EXPECT_GE(l.entries.diagonal().minCoeff(), 0.0);
  auto b = build_incidence(g);
  EXPECT_LE(max_abs(b.entries * b.entries.transpose() - l.entries), 1e-12 * scale);
  auto rw = build_laplacian(g, LaplacianKind::UndirectedRandomWalk);
  MatrixXd p = MatrixXd::Identity(g.n(), g.n()) - rw.entries;  // D^{-1} W
  EXPECT_LE((p.rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-12);
  auto dg = gen::random_digraph(10 + 7 * s, 200 + s, ro);
  auto lo = build_laplacian(dg, LaplacianKind::DirectedOut, {true});
  EXPECT_LE(lo.entries.rowwise().sum().cwiseAbs().maxCoeff(), 1e-12 * max_abs(lo.entries));
  auto li = build_laplacian(dg, LaplacianKind::DirectedIn, {true});
  EXPECT_LE(li.entries.colwise().sum().cwiseAbs().maxCoeff(), 1e-12 * max_abs(li.entries));
}

INSTANTIATE_TEST_SUITE_P(Seeds, LaplacianProperty, ::testing::Range(0, 8));

TEST(Incidence, Examples) {
  auto b = build_incidence(Graph(2, true, {{0, 1, 4.0}}));
  EXPECT_EQ(b.entries, (MatrixXd(2, 1) << 2, -2).finished());
  auto be = build_incidence(skew_example());
  EXPECT_EQ(be.entries.rows(), 3);
  EXPECT_EQ(be.entries.cols(), 4);
  MatrixXd bbt = be.entries * be.entries.transpose();
  EXPECT_TRUE(bbt.isApprox(bbt.transpose()));
}

// ---------------------------------------------------------------- io

TEST(Io, CsvRoundTripAndDigits) {
  MatrixXd m(2, 2);
  m << 1.0 / 3.0, -2e-300, 1e300, 0.1;
  std::stringstream ss;
  io::write_csv(ss, m);
  EXPECT_NE(ss.str().find("3.3333333333333331e-01"), std::string::npos);
  EXPECT_EQ(io::read_csv(ss), m);
}

TEST(Io, MatrixMarket) {
  MatrixXd m = MatrixXd::Zero(2, 3);
  m(1, 2) = 2.5;
  std::stringstream ss;
  io::write_matrix_market(ss, m);
  EXPECT_EQ(ss.str(), "%%MatrixMarket matrix coordinate real general\n2 3 1\n2 3 2.5000000000000000e+00\n");
}

TEST(Io, Fnv1aKnownValue) {
  // reference values of 64-bit FNV-1a
  EXPECT_EQ(io::fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(io::fnv1a("a"), 0xaf63dc4c8601ec8cULL);
}

// ---------------------------------------------------------------- special and fft

TEST(Special, BinomialsAndGammaRatio) {
  EXPECT_DOUBLE_EQ(special::binomial(0.5, 1), 0.5);
  EXPECT_DOUBLE_EQ(special::binomial(0.5, 2), -0.125);
  EXPECT_DOUBLE_EQ(special::binomial(0.5, 3), 0.0625);
  // Gamma(4.5) / (5! Gamma(-0.5))
  double ref = std::tgamma(4.5) / (120.0 * std::tgamma(-0.5));
  EXPECT_NEAR(special::gamma_ratio(5, 0.5), ref, 1e-15);
  // large arguments stay finite through log-gamma
  EXPECT_TRUE(std::isfinite(special::gamma_ratio(100000, 0.3)));
  int sign = 0;
  EXPECT_NEAR(special::log_abs_gamma(-0.5, &sign), std::log(2.0 * std::sqrt(std::numbers::pi)), 1e-14);
  EXPECT_EQ(sign, -1);
}

TEST(Fft, MatchesNaiveDft) {
  for (std::size_t n : {1u, 2u, 7u, 16u, 30u, 97u}) {
    std::vector<std::complex<double>> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = {std::sin(1.0 + i), std::cos(3.0 * i)};
    for (int sign : {-1, +1}) {
      auto y = fft::dft(x, sign);
      for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> s = 0;
        for (std::size_t j = 0; j < n; ++j)
          s += x[j] * std::polar(1.0, sign * 2.0 * std::numbers::pi * double(j * k) / double(n));
        EXPECT_LT(std::abs(s - y[k]), 1e-11 * double(n)) << n << " " << k;
      }
    }
  }
}

// ---------------------------------------------------------------- matfun

TEST(FractionalSymmetric, TwoNodePath) {
  auto l = build_laplacian(gen::path(2), LaplacianKind::UndirectedCombinatorial);
  for (double a : {0.2, 0.5, 0.9}) {
    auto r = fractional_power_symmetric(l, a);
    EXPECT_LE(max_abs(r.op.entries - std::pow(2.0, a - 1.0) * l.entries), 1e-14);
    EXPECT_EQ(r.method, "symmetric-eig");
    EXPECT_EQ(r.zero_cluster.size(), 1u);
  }
}

TEST(FractionalSymmetric, TriangleAndIdentity) {
  auto l = build_laplacian(triangle(), LaplacianKind::UndirectedCombinatorial);
  EXPECT_LE(max_abs(fractional_power_symmetric(l, 0.5).op.entries - l.entries / std::sqrt(3.0)), 1e-14);
  auto g = gen::random_connected(30, 3);
  auto lg = build_laplacian(g, LaplacianKind::UndirectedCombinatorial);
  EXPECT_LE(max_abs(fractional_power_symmetric(lg, 1.0).op.entries - lg.entries), 1e-10);
}

TEST(FractionalSymmetric, Errors) {
  MatrixXd ns(2, 2);
  ns << 1, -1, 0, 0;
  EXPECT_THROW(fractional_power_symmetric(DenseOperator(ns), 0.5), InputError);
  MatrixXd neg(2, 2);
  neg << -1, 0, 0, 1;
  EXPECT_THROW(fractional_power_symmetric(DenseOperator(neg), 0.5), InputError);
  auto l = build_laplacian(gen::path(3), LaplacianKind::UndirectedCombinatorial);
  EXPECT_THROW(fractional_power_symmetric(l, 0.0), InputError);
  EXPECT_THROW(fractional_power_symmetric(l, 1.5), InputError);
}

TEST(FractionalGeneral, DirectedPathEntries) {
  auto l = build_laplacian(gen::path(4, true), LaplacianKind::DirectedOut);
  auto r = fractional_power_general(l, 0.5);
  EXPECT_NEAR(r.op(0, 1), -0.5, 1e-12);
  EXPECT_NEAR(r.op(0, 2), -0.125, 1e-12);
  EXPECT_EQ(r.method, "schur-parlett");
}

TEST(FractionalGeneral, IdentityOnExample) {
  auto l = build_laplacian(skew_example(), LaplacianKind::DirectedOut);
  EXPECT_LE(max_abs(fractional_power_general(l, 1.0).op.entries - l.entries), 1e-10);
}

TEST(FractionalGeneral, CycleMatchesFft) {
  auto l8 = build_laplacian(gen::cycle(8, true), LaplacianKind::DirectedOut);
  EXPECT_LE(max_abs(fractional_power_general(l8, 0.7).op.entries - cycle_fractional_entries(8, 0.7).entries), 1e-10);
}

TEST(FractionalGeneral, OutsideDomainRejected) {
  MatrixXd m(2, 2);
  m << -1, 0, 0, 1;
  EXPECT_THROW(fractional_power_general(DenseOperator(m), 0.5), InputError);
}

// Independent oracle: Eigen's MatrixPower on L + I is compared through the
// identity (L + I)^a computed by both engines on a shifted, nonsingular input.
class GeneralVsOracle : public ::testing::TestWithParam<int> {};

TEST_P(GeneralVsOracle, ShiftedLaplacian) {
  const int s = GetParam();
  auto g = gen::random_digraph(25 + 5 * s, 900 + s);
  auto l = build_laplacian(g, LaplacianKind::DirectedOut, {true});
  MatrixXd shifted = l.entries + MatrixXd::Identity(l.n(), l.n());
  for (double a : {0.3, 0.5, 0.8}) {
    MatrixXd ours = fractional_power_general(DenseOperator(shifted), a).op.entries;
    MatrixXd ref = Eigen::MatrixPower<MatrixXd>(shifted)(a);
    EXPECT_LE(max_abs(ours - ref), 1e-11 * std::max(1.0, max_abs(ref))) << a;
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, GeneralVsOracle, ::testing::Range(0, 4));

// Properties of L^a for both engines.
class PowerProperty : public ::testing::TestWithParam<int> {};

TEST_P(PowerProperty, MMatrixAndKernel) {
  const int s = GetParam();
  gen::RandomGraphOptions ro;
  ro.weighted = s % 2 == 0;
  auto gu = gen::random_connected(20 + 6 * s, 40 + s, ro);
  auto lu = build_laplacian(gu, LaplacianKind::UndirectedCombinatorial);
  auto gd = gen::random_digraph(20 + 6 * s, 60 + s, ro);
  auto ld = build_laplacian(gd, LaplacianKind::DirectedOut, {true});
  for (double a : {0.25, 0.5, 0.75, 1.0}) {
    auto su = fractional_power_symmetric(lu, a);
    auto gu_ = fractional_power_general(lu, a);
    EXPECT_LE(max_abs(su.op.entries - gu_.op.entries), 1e-9);
    auto pd = fractional_power_general(ld, a);
    for (const auto* r : {&su, &pd}) {
      double scale = max_abs(r->op.entries);
      EXPECT_LE(r->op.entries.rowwise().sum().cwiseAbs().maxCoeff(), 1e-10 * scale);
      EXPECT_LE(max_offdiag(r->op.entries), 1e-10);
      EXPECT_GT(r->op.entries.diagonal().minCoeff(), 0.0);
      EXPECT_LE(r->imag_residue, 1e-10);
      EXPECT_TRUE(verify_m_matrix(r->op, 1e-10).passed());
    }
  }
  // semigroup: L^a L^b = L^{a+b}
  auto sd = symmetric_spectrum(lu);
  MatrixXd prod = fractional_power_symmetric(sd, 0.3).op.entries * fractional_power_symmetric(sd, 0.45).op.entries;
  EXPECT_LE(max_abs(prod - fractional_power_symmetric(sd, 0.75).op.entries), 1e-8);
}

INSTANTIATE_TEST_SUITE_P(Seeds, PowerProperty, ::testing::Range(0, 6));

TEST(Spectrum, OrthonormalEigenvectors) {
  auto l = build_laplacian(gen::random_connected(40, 8), LaplacianKind::UndirectedCombinatorial);
  auto sd = symmetric_spectrum(l);
  EXPECT_LE(max_abs(sd.vectors.transpose() * sd.vectors - MatrixXd::Identity(40, 40)), 1e-10);
  auto sc = schur_spectrum(build_laplacian(gen::cycle(12, true), LaplacianKind::DirectedOut));
  Eigen::MatrixXcd q = sc.basis;
  EXPECT_LE((q.adjoint() * q - Eigen::MatrixXcd::Identity(12, 12)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE(sc.triangular.triangularView<Eigen::StrictlyLower>().toDenseMatrix().cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SeriesOracle, Examples) {
  auto l2 = build_laplacian(gen::path(2), LaplacianKind::UndirectedCombinatorial);
  auto s200 = fractional_power_series_oracle(l2, 0.5, 200);
  EXPECT_LE(max_abs(s200.partial_sum.entries - l2.entries / std::sqrt(2.0)), 2e-2);
  auto s0 = fractional_power_series_oracle(l2, 0.5, 0);
  EXPECT_LE(max_abs(s0.partial_sum.entries - MatrixXd::Identity(2, 2)), 1e-15);  // rho = 1
  auto lt = build_laplacian(triangle(), LaplacianKind::UndirectedCombinatorial);
  auto st = fractional_power_series_oracle(lt, 0.5, 10000);
  EXPECT_LE(max_abs(st.partial_sum.entries - fractional_power_symmetric(lt, 0.5).op.entries), st.remainder_estimate);
  MatrixXd bad(2, 2);
  bad << 1, 1, 1, 1;
  EXPECT_THROW(fractional_power_series_oracle(DenseOperator(bad), 0.5, 10), InputError);
}

TEST(MatrixExponential, Examples) {
  MatrixXd d = MatrixXd::Zero(2, 2);
  d(0, 0) = 1, d(1, 1) = 2;
  EXPECT_EQ(matrix_exponential(DenseOperator(d), 0.0).entries, MatrixXd::Identity(2, 2));
  auto e = matrix_exponential(DenseOperator(d), 1.0).entries;
  EXPECT_NEAR(e(0, 0), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(e(1, 1), std::exp(-2.0), 1e-15);
  auto lt = build_laplacian(triangle(), LaplacianKind::UndirectedCombinatorial);
  auto k = transition_kernel(fractional_power_symmetric(lt, 0.5));
  MatrixXd lbar = MatrixXd::Identity(3, 3) - k.P;
  auto et = matrix_exponential(DenseOperator(lbar), 1.0).entries;
  EXPECT_LE((et.rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-12);
  // oracle: Eigen's unsupported matrix exponential
  auto g = gen::random_digraph(30, 17);
  auto l = build_laplacian(g, LaplacianKind::DirectedOut, {true});
  for (double t : {0.01, 1.0, 25.0}) {
    MatrixXd ref = (-t * l.entries).exp();
    EXPECT_LE(max_abs(matrix_exponential(l, t).entries - ref), 1e-12 * std::max(1.0, max_abs(ref))) << t;
  }
  EXPECT_THROW(matrix_exponential(l, -1.0), InputError);
  EXPECT_THROW(matrix_exponential(DenseOperator(MatrixXd::Constant(2, 2, -1e300)), 1e10), NumericalError);
}

TEST(MMatrix, Examples) {
  auto le = build_laplacian(skew_example(), LaplacianKind::DirectedOut);
  EXPECT_TRUE(verify_m_matrix(le, 1e-12).is_sign_pattern);
  auto lp = build_laplacian(gen::path(6), LaplacianKind::UndirectedCombinatorial);
  EXPECT_TRUE(verify_m_matrix(fractional_power_general(lp, 0.3).op, 1e-10).passed());
  MatrixXd m(2, 2);
  m << 1, 0.5, 0, 1;
  auto r = verify_m_matrix(DenseOperator(m), 1e-12);
  EXPECT_FALSE(r.is_sign_pattern);
  EXPECT_FALSE(r.passed());
}
