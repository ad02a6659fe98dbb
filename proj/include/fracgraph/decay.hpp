#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <queue>
#include <vector>

#include "fracgraph/error.hpp"
#include "fracgraph/graph.hpp"
#include "fracgraph/matfun.hpp"
#include "fracgraph/rng.hpp"
#include "fracgraph/walks.hpp"

namespace fracgraph {

constexpr std::size_t kUnreachable = std::numeric_limits<std::size_t>::max();

// Jackson constant.
constexpr double kJacksonC = 1.0 + std::numbers::pi * std::numbers::pi / 2.0;

enum class DistanceMode { Directed, Undirected };

// Hop distances along arcs (or ignoring orientation).
inline std::vector<std::size_t> graph_distances(const Graph& g, std::size_t source,
                                                DistanceMode mode = DistanceMode::Directed) {
  if (source >= g.n()) throw InputError("source node out of range");
  std::vector<std::size_t> dist(g.n(), kUnreachable);
  std::queue<std::size_t> q;
  dist[source] = 0;
  q.push(source);
  const auto &oo = g.out_offsets(), &ot = g.out_targets();
  const auto &io = g.in_offsets(), &is = g.in_sources();
  while (!q.empty()) {
    auto v = q.front();
    q.pop();
    auto visit = [&](std::size_t w) {
      if (dist[w] == kUnreachable) dist[w] = dist[v] + 1, q.push(w);
    };
    for (auto k = oo[v]; k < oo[v + 1]; ++k) visit(ot[k]);
    if (mode == DistanceMode::Undirected || !g.directed())
      for (auto k = io[v]; k < io[v + 1]; ++k) visit(is[k]);
  }
  return dist;
}

// Graph induced by the offdiagonal sparsity pattern of M (arc i -> j when M_ij != 0).
inline Graph pattern_graph(const Eigen::MatrixXd& m) {
  std::vector<Edge> arcs;
  bool sym = true;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (i != j && m(i, j) != 0.0) {
        arcs.push_back({std::size_t(i), std::size_t(j), 1.0});
        sym = sym && m(j, i) != 0.0;
      }
  return Graph(m.rows(), !sym, std::move(arcs));
}

// All-pairs hop distances of the pattern graph, row i = BFS from i.
inline std::vector<std::vector<std::size_t>> all_pair_distances(const Graph& g) {
  std::vector<std::vector<std::size_t>> d;
  d.reserve(g.n());
  for (std::size_t s = 0; s < g.n(); ++s) d.push_back(graph_distances(g, s));
  return d;
}

struct DecayRecord {
  std::size_t i = 0, j = 0, d = 0;
  double observed = 0.0;
  double bound = 0.0;
  double bound_linear = 0.0;  // exponential mode: the weaker c t rho^a 2^-a (d-1)^-a
  bool ok = true;
};

struct DecayReport {
  std::vector<DecayRecord> records;  // empty unless requested
  double c = kJacksonC;
  double rho = 0.0;
  double alpha = 0.0;
  std::optional<double> t;
  std::size_t pairs_checked = 0;
  std::size_t violations = 0;
  std::size_t ordering_violations = 0;  // exponential mode: bound > bound_linear
  double max_ratio = 0.0;               // max observed / bound
  // diagonal check (P^(a) reports only)
  bool diagonal_bound_ok = true;
  double min_diagonal_margin = std::numeric_limits<double>::infinity();

  bool all_satisfied() const { return violations == 0 && ordering_violations == 0 && diagonal_bound_ok; }
};

struct DecayMode {
  std::optional<double> t;  // unset: bound on L^a itself; set: exp(-t L^a)
  static DecayMode power() { return {}; }
  static DecayMode exponential(double t) { return {t}; }
};

struct DecayOptions {
  bool keep_records = false;
  std::size_t sample_pairs = 0;  // 0 = all pairs
  std::uint64_t seed = 0;
};

namespace detail {

template <class Bound>
DecayReport check_pairs(const Eigen::MatrixXd& observed,
                        const std::vector<std::vector<std::size_t>>& dist, Bound&& bound,
                        const DecayOptions& opt) {
  DecayReport rep;
  const std::size_t n = dist.size();
  auto visit = [&](std::size_t i, std::size_t j) {
    std::size_t d = dist[i][j];
    if (i == j || d == kUnreachable || d < 2) return;
    DecayRecord r{i, j, d, std::abs(observed(i, j)), 0.0, 0.0, true};
    bound(r);
    r.ok = r.observed <= r.bound * (1.0 + 1e-12) + 1e-15;
    ++rep.pairs_checked;
    if (!r.ok) ++rep.violations;
    if (r.bound_linear > 0.0 && r.bound > r.bound_linear * (1.0 + 1e-12)) ++rep.ordering_violations;
    rep.max_ratio = std::max(rep.max_ratio, r.observed / r.bound);
    if (opt.keep_records) rep.records.push_back(r);
  };
  if (opt.sample_pairs == 0) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) visit(i, j);
  } else {
    Rng rng(opt.seed);
    std::vector<std::pair<std::size_t, std::size_t>> pick;
    for (std::size_t k = 0; k < opt.sample_pairs; ++k)
      pick.push_back({std::size_t(uniform01(rng) * n), std::size_t(uniform01(rng) * n)});
    std::sort(pick.begin(), pick.end());
    pick.erase(std::unique(pick.begin(), pick.end()), pick.end());
    for (auto [i, j] : pick) visit(i, j);
  }
  return rep;
}

inline void require_undirected(const Eigen::MatrixXd& l) {
  if (!is_symmetric(l, 1e-12)) throw InputError("decay bounds are proved for undirected graphs only");
}

}  // namespace detail

// Checks |f(L)_ij| against the Jackson-type bounds, f(x) = x^a or exp(-t x^a).
// `spec` is the symmetric spectrum of L, reused across alpha and t.
inline DecayReport verify_decay_bounds(const DenseOperator& l, const SpectralData& spec,
                                       double alpha, DecayMode mode, const DecayOptions& opt = {}) {
  detail::require_undirected(l.entries);
  const double rho = spec.spectral_radius;
  Eigen::MatrixXd observed;
  if (mode.t) {
    double t = *mode.t;
    double ztol = spec.zero_tol;
    observed = symmetric_function(
        spec, [&](double x) { return std::exp(-t * (x <= ztol ? 0.0 : std::pow(x, alpha))); });
  } else {
    observed = fractional_power_symmetric(spec, alpha).op.entries;
  }
  auto dist = all_pair_distances(pattern_graph(l.entries));
  const double scale = kJacksonC * std::pow(rho, alpha) / std::pow(2.0, alpha);
  auto rep = detail::check_pairs(
      observed, dist,
      [&](DecayRecord& r) {
        double x = std::pow(double(r.d - 1), -alpha);
        if (mode.t) {
          double s = std::pow(rho, alpha) / std::pow(2.0, alpha) * x;
          r.bound = kJacksonC * (1.0 - std::exp(-*mode.t * s));
          r.bound_linear = kJacksonC * *mode.t * s;
        } else {
          r.bound = scale * x;
        }
      },
      opt);
  rep.rho = rho;
  rep.alpha = alpha;
  rep.t = mode.t;
  return rep;
}

inline DecayReport verify_decay_bounds(const DenseOperator& l, double alpha, DecayMode mode,
                                       const DecayOptions& opt = {}) {
  return verify_decay_bounds(l, symmetric_spectrum(l), alpha, mode, opt);
}

// Offdiagonal P^(a) bound plus the diagonal inequality (L^a)_ii >= rho^{a-1} L_ii.
inline DecayReport verify_p_alpha_bound(const TransitionKernel& k, const DenseOperator& l,
                                        double alpha, const DecayOptions& opt = {}) {
  detail::require_undirected(l.entries);
  auto spec = symmetric_spectrum(l);
  const double rho = spec.spectral_radius;
  auto dist = all_pair_distances(pattern_graph(l.entries));
  auto rep = detail::check_pairs(
      k.P, dist,
      [&](DecayRecord& r) {
        r.bound = kJacksonC * rho / (std::pow(2.0, alpha) * std::abs(l.entries(r.i, r.i))) *
                  std::pow(double(r.d - 1), -alpha);
      },
      opt);
  rep.rho = rho;
  rep.alpha = alpha;
  for (Eigen::Index i = 0; i < l.n(); ++i) {
    double margin = k.d_alpha[i] - std::pow(rho, alpha - 1.0) * l.entries(i, i);
    rep.min_diagonal_margin = std::min(rep.min_diagonal_margin, margin);
    if (margin < -1e-10) rep.diagonal_bound_ok = false;
  }
  return rep;
}

// max |M_ij| over pairs at each hop distance d >= 2 of the pattern graph of L.
inline std::map<std::size_t, double> max_entry_by_distance(const Eigen::MatrixXd& m,
                                                           const Eigen::MatrixXd& l) {
  auto dist = all_pair_distances(pattern_graph(l));
  std::map<std::size_t, double> out;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      auto d = dist[i][j];
      if (i == j || d == kUnreachable || d < 2) continue;
      auto& v = out[d];
      v = std::max(v, std::abs(m(i, j)));
    }
  return out;
}

struct LineFit {
  double slope = 0.0, intercept = 0.0, r2 = 0.0;
};

inline LineFit least_squares_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = double(x.size());
  if (x.size() < 2) throw InputError("line fit needs at least two points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= n, my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 1.0;
  return f;
}

// Slope of log max|entry| against log(d - 1), over distances d >= 2.
inline LineFit decay_slope(const std::map<std::size_t, double>& profile) {
  std::vector<double> x, y;
  for (auto [d, v] : profile)
    if (v > 0) x.push_back(std::log(double(d - 1))), y.push_back(std::log(v));
  return least_squares_line(x, y);
}

struct NumericalRange {
  std::vector<std::complex<double>> boundary;
  double min_real = 0.0;
  std::vector<double> support;  // mu(theta) per angle
};

// Boundary of W(M): for each angle, the top eigenvector of the Hermitian part of
// e^{i theta} M gives a supporting point x^* M x.
inline NumericalRange numerical_range_profile(const DenseOperator& mop, int angles) {
  require_square(mop.entries, "numerical range");
  if (angles < 8) throw InputError("numerical range needs at least 8 angles");
  Eigen::MatrixXcd m = mop.entries.cast<std::complex<double>>();
  NumericalRange nr;
  for (int k = 0; k < angles; ++k) {
    double th = 2.0 * std::numbers::pi * k / angles;
    std::complex<double> e = std::polar(1.0, th);
    Eigen::MatrixXcd h = 0.5 * (e * m + std::conj(e) * m.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    Eigen::Index top = h.rows() - 1;
    Eigen::VectorXcd x = es.eigenvectors().col(top);
    nr.boundary.push_back(x.dot(m * x));  // x^* M x
    nr.support.push_back(es.eigenvalues()[top]);
  }
  // Leftmost point: smallest eigenvalue of the symmetric part (theta = pi).
  Eigen::MatrixXd s = 0.5 * (mop.entries + mop.entries.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
  nr.min_real = es.eigenvalues()[0];
  return nr;
}

}  // namespace fracgraph
