#include <gtest/gtest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "fracgraph/decay.hpp"
#include "fracgraph/generators.hpp"
#include "fracgraph/walks.hpp"

using namespace fracgraph;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

TransitionKernel kernel_of(const Graph& g, double alpha, LaplacianOptions lo = {}) {
  auto kind = g.directed() ? LaplacianKind::DirectedOut : LaplacianKind::UndirectedCombinatorial;
  return transition_kernel(fractional_power(build_laplacian(g, kind, lo), alpha));
}

}  // namespace

// ---------------------------------------------------------------- kernel

TEST(Kernel, AlphaOneIsSimpleWalk) {
  auto g = gen::random_connected(25, 11, {0.1, true});
  auto k = kernel_of(g, 1.0);
  auto dv = degree_vectors(g);
  MatrixXd ref = dv.d.cwiseInverse().asDiagonal() * g.weight_matrix();
  EXPECT_LE(max_abs(k.P - ref), 1e-10);
}

TEST(Kernel, DirectedPathHalf) {
  auto k = kernel_of(gen::path(6, true), 0.5);
  EXPECT_NEAR(k.P(0, 1), 0.5, 1e-12);
  EXPECT_NEAR(k.P(0, 2), 0.125, 1e-12);
  ASSERT_EQ(k.absorbing.size(), 1u);
  EXPECT_EQ(k.absorbing[0], 5);
  EXPECT_EQ(k.P(5, 5), 1.0);
}

class KernelProperty : public ::testing::TestWithParam<int> {};

TEST_P(KernelProperty, RowStochastic) {
  const int s = GetParam();
  auto gu = gen::random_connected(15 + 5 * s, 300 + s);
  auto gd = gen::random_digraph(15 + 5 * s, 400 + s);
  for (double a : {0.3, 0.6, 0.9}) {
    for (const auto& k : {kernel_of(gu, a), kernel_of(gd, a, {true})}) {
      EXPECT_GE(k.P.minCoeff(), 0.0);
      EXPECT_LE((k.P.rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-12);
      for (Eigen::Index i = 0; i < k.P.rows(); ++i) {
        if (std::find(k.absorbing.begin(), k.absorbing.end(), i) == k.absorbing.end()) {
          EXPECT_EQ(k.P(i, i), 0.0);
        }
      }
    }
    // fractional kernels reach beyond the neighbourhood: the path becomes dense
    auto kp = kernel_of(gen::path(8), a);
    if (a < 1.0) {
      EXPECT_GT(kp.P(0, 7), 0.0);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, KernelProperty, ::testing::Range(0, 5));

TEST(Stationary, CycleAndStar) {
  auto kc = kernel_of(gen::cycle(9), 0.4);
  auto sc = stationary_distribution(kc);
  EXPECT_LE((sc.pi.array() - 1.0 / 9.0).abs().maxCoeff(), 1e-14);
  auto g = gen::star(5);
  auto ks = kernel_of(g, 0.7);
  auto ss = stationary_distribution(ks);
  EXPECT_LE(ss.residual, 1e-12);
  EXPECT_NEAR(ss.pi.sum(), 1.0, 1e-14);
  EXPECT_GT(ss.pi[0], ss.pi[1]);
  EXPECT_THROW(stationary_distribution(kernel_of(gen::cycle(5, true), 0.5)), InputError);
}

TEST(Stationary, RandomGraphs) {
  for (int s = 0; s < 4; ++s) {
    auto k = kernel_of(gen::random_connected(30, 70 + s, {0.1, true}), 0.55);
    auto r = stationary_distribution(k);
    EXPECT_LE((k.P.transpose() * r.pi - r.pi).cwiseAbs().maxCoeff(), 1e-12);
  }
}

// ---------------------------------------------------------------- walks

TEST(Discrete, DeterministicPath) {
  auto k = kernel_of(gen::path(5, true), 1.0);
  auto tr = simulate_discrete(k, 0, 6, 1);
  EXPECT_EQ(tr.nodes, (std::vector<Eigen::Index>{0, 1, 2, 3, 4, 4, 4}));
}

TEST(Discrete, SeedReproducible) {
  auto k = kernel_of(gen::random_connected(40, 5), 0.5);
  auto a = simulate_discrete(k, 3, 500, 99);
  auto b = simulate_discrete(k, 3, 500, 99);
  auto c = simulate_discrete(k, 3, 500, 100);
  EXPECT_EQ(a.nodes, b.nodes);
  EXPECT_NE(a.nodes, c.nodes);
  for (std::size_t s = 1; s < a.nodes.size(); ++s) EXPECT_GT(k.P(a.nodes[s - 1], a.nodes[s]), 0.0);
  EXPECT_THROW(simulate_discrete(k, 40, 1, 1), InputError);
}

TEST(Discrete, EmpiricalFrequencies) {
  // one-step empirical distribution against the row of P
  auto k = kernel_of(gen::path(6), 0.5);
  WalkSampler ws(k);
  Rng rng(2024);
  const int runs = 200000;
  VectorXd hist = VectorXd::Zero(6);
  for (int r = 0; r < runs; ++r) hist[ws.step(2, rng)] += 1.0;
  hist /= runs;
  for (int j = 0; j < 6; ++j) EXPECT_NEAR(hist[j], k.P(2, j), 5.0 * std::sqrt(0.25 / runs)) << j;
}

TEST(Evolve, TriangleBecomesUniform) {
  auto k = kernel_of(gen::complete(3), 0.5);
  auto tr = evolve_continuous(k, VectorXd::Unit(3, 0), {0.0, 1.0, 50.0});
  EXPECT_EQ(tr.states[0], VectorXd::Unit(3, 0));
  EXPECT_LE((tr.states[2].array() - 1.0 / 3.0).abs().maxCoeff(), 1e-12);
  EXPECT_LE(tr.conservation_drift, 1e-12);
}

TEST(Evolve, MatchesOracleAndConservesMass) {
  auto k = kernel_of(gen::random_digraph(20, 4), 0.6, {true});
  VectorXd u0 = VectorXd::Constant(20, 0.05);
  auto tr = evolve_continuous(k, u0, {0.5, 3.0});
  MatrixXd lbarT = (MatrixXd::Identity(20, 20) - k.P).transpose();
  for (std::size_t s = 0; s < 2; ++s) {
    VectorXd ref = (-tr.times[s] * lbarT).exp() * u0;
    EXPECT_LE((tr.states[s] - ref).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(tr.states[s].sum(), 1.0, 1e-12);
    EXPECT_GE(tr.states[s].minCoeff(), 0.0);
  }
  EXPECT_THROW(evolve_continuous(k, VectorXd::Constant(20, 1.0), {1.0}), InputError);
}

// ---------------------------------------------------------------- closed forms

TEST(ClosedForm, PathEntries) {
  auto m = path_fractional_entries(6, 0.5);
  EXPECT_NEAR(m(1, 3), -0.125, 1e-15);
  EXPECT_LE(m.entries.rowwise().sum().cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(m.entries.row(5).cwiseAbs().maxCoeff(), 0.0);
  auto l = build_laplacian(gen::path(6, true), LaplacianKind::DirectedOut);
  for (double a : {0.2, 0.5, 0.8})
    EXPECT_LE(max_abs(path_fractional_entries(6, a).entries - fractional_power_general(l, a).op.entries),
              1e-11);
}

TEST(ClosedForm, CycleEntryLimit) {
  double im = 1.0;
  auto m = cycle_fractional_entries(512, 0.5, &im);
  EXPECT_LE(im, 1e-10);
  EXPECT_NEAR(m(0, 5), cycle_entry_limit(5, 0.5), 1e-3);
  // limit values equal (-1)^d binom(a, d)
  EXPECT_NEAR(cycle_entry_limit(5, 0.5), -special::binomial(0.5, 5), 1e-15);
}

TEST(Absorption, ClosedForms) {
  for (std::size_t n : {2u, 5u, 30u}) {
    auto r = expected_absorption_steps(n, 1.0);
    EXPECT_NEAR(r.expectation, double(n - 1), 1e-12);
    EXPECT_EQ(r.n_step, (long long)(n - 1));
  }
  EXPECT_LE(expected_absorption_steps(20, 0.25).n_step, 5);
  EXPECT_EQ(expected_absorption_steps(20, 0.5).n_step, 5);
  EXPECT_EQ(expected_absorption_steps(10, 0.5).n_step, 4);
  // the expectation grows with alpha at fixed n
  double prev = 0;
  for (double a : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    double e = expected_absorption_steps(40, a).expectation;
    EXPECT_GT(e, prev);
    prev = e;
  }
}

TEST(Absorption, MonteCarloAgrees) {
  for (std::size_t n : {10u, 20u})
    for (double a : {0.25, 0.5, 0.75}) {
      auto k = transition_kernel(fractional_power_general(
          build_laplacian(gen::path(n, true), LaplacianKind::DirectedOut), a));
      auto mc = monte_carlo_absorption(k, 0, 20000, 77);
      double ex = expected_absorption_steps(n, a).expectation;
      EXPECT_LE(std::abs(mc.mean - ex), 4.5 * mc.stderr_) << n << " " << a;
    }
}

TEST(PathTransition, Asymptotics) {
  EXPECT_NEAR(path_transition_asymptotic(0.5, 100), 2.8209e-4, 1e-8);
  double r = path_transition_exact(0.5, 1000) / path_transition_asymptotic(0.5, 1000);
  EXPECT_NEAR(r, 1.0, 0.02);
  auto k = kernel_of(gen::path(30, true), 0.5);
  for (std::size_t gap = 1; gap < 28; ++gap) EXPECT_NEAR(k.P(0, gap), path_transition_exact(0.5, gap), 1e-12);
}

TEST(ReturnProbability, UndirectedMonotoneToUniform) {
  auto g = gen::random_connected(30, 12);
  auto k = kernel_of(g, 0.5);
  DenseOperator lbar(MatrixXd::Identity(30, 30) - k.P);
  std::vector<double> ts;
  for (int i = 0; i <= 40; ++i) ts.push_back(std::pow(10.0, -2.0 + 0.15 * i));
  auto c = return_probability(lbar, ts);
  EXPECT_EQ(c.zero_multiplicity, 1u);
  for (std::size_t i = 1; i < c.values.size(); ++i) EXPECT_LE(c.values[i], c.values[i - 1] + 1e-14);
  EXPECT_NEAR(c.values.back(), 1.0 / 30.0, 1e-10);
  EXPECT_LE(c.max_imag_residue, 1e-10);
  // oracle: trace of the matrix exponential
  for (double t : {0.1, 2.0}) EXPECT_NEAR(return_probability(lbar, {t}).values[0], (-t * lbar.entries).exp().trace() / 30.0, 1e-12);
}

TEST(ReturnProbability, DirectedCycleIsReal) {
  auto k = kernel_of(gen::cycle(16, true), 0.5);
  DenseOperator lbar(MatrixXd::Identity(16, 16) - k.P);
  auto c = return_probability(lbar, {0.0, 1.0, 10.0});
  EXPECT_EQ(c.values[0], 1.0);
  EXPECT_LE(c.max_imag_residue, 1e-12);
  EXPECT_FALSE(c.defective_suspected);
}

// ---------------------------------------------------------------- decay

TEST(Distances, Examples) {
  auto dp = graph_distances(gen::path(5), 0);
  EXPECT_EQ(dp, (std::vector<std::size_t>{0, 1, 2, 3, 4}));
  auto ds = graph_distances(gen::star(4), 2);
  EXPECT_EQ(ds, (std::vector<std::size_t>{1, 2, 0, 2, 2}));
  Graph ex(3, true, {{0, 1, 1}, {1, 2, 1}, {2, 0, 1}, {2, 1, 1}});
  EXPECT_EQ(graph_distances(ex, 0), (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(graph_distances(ex, 1), (std::vector<std::size_t>{2, 0, 1}));
  EXPECT_EQ(graph_distances(ex, 1, DistanceMode::Undirected), (std::vector<std::size_t>{1, 0, 1}));
  Graph disc(3, true, {{0, 1, 1}});
  EXPECT_EQ(graph_distances(disc, 0)[2], kUnreachable);
}

TEST(Decay, CycleSlope) {
  auto l = build_laplacian(gen::cycle(64), LaplacianKind::UndirectedCombinatorial);
  auto m = fractional_power_symmetric(l, 0.5).op.entries;
  auto fit = decay_slope(max_entry_by_distance(m, l.entries));
  EXPECT_LE(fit.slope, -0.5 + 0.1);
}

class DecayProperty : public ::testing::TestWithParam<int> {};

TEST_P(DecayProperty, BoundsHold) {
  const int s = GetParam();
  Graph g = s == 0 ? gen::cycle(64) : gen::random_connected(40 + 20 * s, 500 + s, {0.03, s % 2 == 0});
  auto l = build_laplacian(g, LaplacianKind::UndirectedCombinatorial);
  auto spec = symmetric_spectrum(l);
  for (double a : {0.25, 0.5, 0.75}) {
    auto rp = verify_decay_bounds(l, spec, a, DecayMode::power());
    EXPECT_TRUE(rp.all_satisfied()) << a;
    EXPECT_GT(rp.pairs_checked, 0u);
    for (double t : {0.5, 5.0}) {
      auto re = verify_decay_bounds(l, spec, a, DecayMode::exponential(t));
      EXPECT_TRUE(re.all_satisfied()) << a << " " << t;
    }
    auto k = transition_kernel(fractional_power_symmetric(spec, a));
    auto rk = verify_p_alpha_bound(k, l, a);
    EXPECT_TRUE(rk.all_satisfied()) << a;
    EXPECT_GE(rk.min_diagonal_margin, -1e-10);
  }
}

INSTANTIATE_TEST_SUITE_P(Graphs, DecayProperty, ::testing::Range(0, 4));

TEST(Decay, SamplingIsSeeded) {
  auto l = build_laplacian(gen::random_connected(200, 9), LaplacianKind::UndirectedCombinatorial);
  DecayOptions o{true, 500, 31};
  auto a = verify_decay_bounds(l, 0.5, DecayMode::power(), o);
  auto b = verify_decay_bounds(l, 0.5, DecayMode::power(), o);
  ASSERT_EQ(a.records.size(), b.records.size());
  EXPECT_LE(a.pairs_checked, 500u);
  for (std::size_t i = 0; i < a.records.size(); ++i) EXPECT_EQ(a.records[i].observed, b.records[i].observed);
  EXPECT_EQ(a.violations, 0u);
}

TEST(Decay, RejectsDirected) {
  auto l = build_laplacian(gen::cycle(8, true), LaplacianKind::DirectedOut);
  EXPECT_THROW(verify_decay_bounds(l, 0.5, DecayMode::power()), InputError);
}

TEST(NumericalRange, NormalMatrixHull) {
  // L^a of the directed cycle is normal, so W is the hull of its eigenvalues
  auto m = cycle_fractional_entries(24, 0.5);
  auto nr = numerical_range_profile(m, 64);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m.entries.cast<std::complex<double>>());
  auto lam = es.eigenvalues();
  for (int k = 0; k < 64; ++k) {
    std::complex<double> e = std::polar(1.0, 2.0 * std::numbers::pi * k / 64);
    double mu = -1e300;
    for (Eigen::Index i = 0; i < lam.size(); ++i) mu = std::max(mu, (e * lam[i]).real());
    EXPECT_NEAR(nr.support[k], mu, 1e-8);
    EXPECT_NEAR((e * nr.boundary[k]).real(), mu, 1e-8);
  }
  EXPECT_GE(nr.min_real, -1e-10);
  EXPECT_THROW(numerical_range_profile(m, 4), InputError);
}
