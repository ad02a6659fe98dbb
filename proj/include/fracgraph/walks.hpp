#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "fracgraph/error.hpp"
#include "fracgraph/fft.hpp"
#include "fracgraph/io.hpp"
#include "fracgraph/matfun.hpp"
#include "fracgraph/operator.hpp"
#include "fracgraph/rng.hpp"
#include "fracgraph/special.hpp"

namespace fracgraph {

struct TransitionKernel {
  Eigen::MatrixXd P;
  Eigen::VectorXd d_alpha;
  double alpha = 1.0;
  LaplacianKind source = LaplacianKind::Other;
  std::vector<Eigen::Index> absorbing;  // rows that are e_i
};

// P = I - diag(L^a)^{-1} L^a. A zero row of L^a (an absorbing node such as the
// end of a directed path) becomes the row e_i.
inline TransitionKernel transition_kernel(const FractionalPowerResult& fp) {
  const auto& m = fp.op.entries;
  require_square(m, "transition kernel");
  const Eigen::Index n = m.rows();
  const double scale = std::max(max_abs(m), 1e-300);
  TransitionKernel k;
  k.alpha = fp.alpha;
  k.source = fp.op.meta.kind;
  k.d_alpha = m.diagonal();
  k.P.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double dii = m(i, i);
    if (m.row(i).cwiseAbs().maxCoeff() <= 1e-12 * scale) {
      k.P.row(i).setZero();
      k.P(i, i) = 1.0;
      k.absorbing.push_back(i);
      continue;
    }
    if (!(dii > 0.0)) throw InputError("nonpositive diagonal of L^alpha at node " + std::to_string(i));
    k.P.row(i) = (-m.row(i) / dii).array() + 0.0;  // no signed zeros
    k.P(i, i) = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      double& p = k.P(i, j);
      if (p >= 0.0) continue;
      if (p < -1e-12) {
        std::ostringstream os;
        os << "transition probability " << p << " at (" << i << "," << j
           << ") is negative beyond the clamping tolerance";
        throw NumericalError(os.str());
      }
      p = 0.0;
    }
    double s = k.P.row(i).sum();
    if (std::abs(s - 1.0) > 1e-8)
      throw NumericalError("row " + std::to_string(i) + " of P sums to " + io::fmt(s));
    k.P.row(i) /= s;
  }
  return k;
}

struct StationaryResult {
  Eigen::VectorXd pi;
  double residual = 0.0;  // ||pi^T P - pi^T||_inf
};

// pi = d_a / (1^T d_a). Proven for undirected sources only.
inline StationaryResult stationary_distribution(const TransitionKernel& k) {
  if (k.source != LaplacianKind::UndirectedCombinatorial && k.source != LaplacianKind::Other)
    throw InputError("stationary distribution formula needs an undirected kernel");
  StationaryResult r;
  r.pi = k.d_alpha / k.d_alpha.sum();
  r.residual = (k.P.transpose() * r.pi - r.pi).cwiseAbs().maxCoeff();
  if (r.residual > 1e-10)
    throw NumericalError("stationarity residual " + io::fmt(r.residual) +
                         " (directed or absorbing kernel?)");
  return r;
}

enum class TrajectoryKind { Probability, NodeSequence };

struct TrajectoryResult {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  TrajectoryKind kind = TrajectoryKind::Probability;
  double conservation_drift = 0.0;
  std::vector<Eigen::Index> nodes;  // node-sequence trajectories
};

namespace detail {
inline std::vector<double> cumulative_row(const Eigen::MatrixXd& p, Eigen::Index i) {
  std::vector<double> c(p.cols());
  double s = 0;
  for (Eigen::Index j = 0; j < p.cols(); ++j) c[j] = (s += p(i, j));
  return c;
}
}  // namespace detail

// Inverse-CDF sampling of a Markov chain; absorbing rows hold the chain in place.
class WalkSampler {
 public:
  explicit WalkSampler(const TransitionKernel& k) : n_(k.P.rows()) {
    cdf_.reserve(n_);
    for (Eigen::Index i = 0; i < n_; ++i) cdf_.push_back(detail::cumulative_row(k.P, i));
    absorbing_.assign(n_, false);
    for (auto a : k.absorbing) absorbing_[a] = true;
  }
  bool absorbing(Eigen::Index i) const { return absorbing_[i]; }
  Eigen::Index step(Eigen::Index i, Rng& rng) const {
    if (absorbing_[i]) return i;
    const auto& c = cdf_[i];
    double u = uniform01(rng) * c.back();
    auto it = std::upper_bound(c.begin(), c.end(), u);
    auto j = static_cast<Eigen::Index>(it - c.begin());
    if (j >= n_) j = n_ - 1;
    while (j > 0 && c[j] == c[j - 1]) --j;  // never land on a zero-probability entry
    return j;
  }

 private:
  Eigen::Index n_;
  std::vector<std::vector<double>> cdf_;
  std::vector<bool> absorbing_;
};

inline TrajectoryResult simulate_discrete(const TransitionKernel& k, Eigen::Index start,
                                          std::size_t steps, std::uint64_t seed) {
  if (start < 0 || start >= k.P.rows()) throw InputError("start node out of range");
  WalkSampler ws(k);
  Rng rng(seed);
  TrajectoryResult tr;
  tr.kind = TrajectoryKind::NodeSequence;
  tr.nodes.reserve(steps + 1);
  tr.nodes.push_back(start);
  tr.times.push_back(0);
  for (std::size_t s = 0; s < steps; ++s) {
    tr.nodes.push_back(ws.step(tr.nodes.back(), rng));
    tr.times.push_back(double(s + 1));
  }
  return tr;
}

struct MonteCarloAbsorption {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t runs = 0;
};

// Steps until the chain first sits in an absorbing node; replica r uses split_seed(seed, r).
inline MonteCarloAbsorption monte_carlo_absorption(const TransitionKernel& k, Eigen::Index start,
                                                   std::size_t runs, std::uint64_t seed,
                                                   std::size_t max_steps = 1000000) {
  if (k.absorbing.empty()) throw InputError("kernel has no absorbing node");
  WalkSampler ws(k);
  double sum = 0, sumsq = 0;
  for (std::size_t r = 0; r < runs; ++r) {
    Rng rng(split_seed(seed, r));
    Eigen::Index v = start;
    std::size_t steps = 0;
    while (!ws.absorbing(v)) {
      v = ws.step(v, rng);
      if (++steps > max_steps) throw NumericalError("walk did not absorb within the step cap");
    }
    sum += double(steps);
    sumsq += double(steps) * double(steps);
  }
  MonteCarloAbsorption out;
  out.runs = runs;
  out.mean = sum / double(runs);
  double var = runs > 1 ? (sumsq - sum * out.mean) / double(runs - 1) : 0.0;
  out.stderr_ = std::sqrt(std::max(var, 0.0) / double(runs));
  return out;
}

struct EvolveOptions {
  // true: u(t) = exp(-t Lbar^T) u0, which conserves probability for any kernel.
  // false: the literal exp(-t Lbar) u0, mass-conserving only when Lbar^T 1 = 0.
  bool transpose_convention = true;
};

// Continuous-time walk driven by Lbar = diag(d_a)^{-1} L^a = I - P.
inline TrajectoryResult evolve_continuous(const TransitionKernel& k, const Eigen::VectorXd& u0,
                                          const std::vector<double>& times,
                                          EvolveOptions opt = {}) {
  const Eigen::Index n = k.P.rows();
  if (u0.size() != n) throw InputError("u0 has wrong length");
  if ((u0.array() < 0).any() || std::abs(u0.sum() - 1.0) > 1e-12)
    throw InputError("u0 must be a probability vector");
  Eigen::MatrixXd lbar = Eigen::MatrixXd::Identity(n, n) - k.P;
  DenseOperator gen(opt.transpose_convention ? Eigen::MatrixXd(lbar.transpose()) : lbar);
  TrajectoryResult tr;
  tr.kind = TrajectoryKind::Probability;
  for (double t : times) {
    Eigen::VectorXd u = matrix_exponential(gen, t).entries * u0;
    double drift = std::abs(1.0 - u.sum());
    if (opt.transpose_convention) {
      if (drift > 1e-8)
        throw NumericalError("probability drift " + io::fmt(drift) + " at t=" + io::fmt(t));
      u = u.cwiseMax(0.0);
    }
    tr.conservation_drift = std::max(tr.conservation_drift, drift);
    tr.times.push_back(t);
    tr.states.push_back(std::move(u));
  }
  return tr;
}

// Closed-form L_out^a of the directed path 0 -> 1 -> ... -> n-1 (0-based).
// Row h < n-1: entry (h, k) = (-1)^{k-h} binom(a, k-h) for k < n-1; the last
// column closes the zero row sum. Row n-1 is zero.
inline DenseOperator path_fractional_entries(std::size_t n, double alpha) {
  if (n < 2) throw InputError("path needs n >= 2");
  detail::check_alpha(alpha);
  auto c = special::binomial_sequence(alpha, n);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t h = 0; h + 1 < n; ++h) {
    double s = 0;
    for (std::size_t k = h; k + 1 < n; ++k) {
      double v = ((k - h) % 2 ? -1.0 : 1.0) * c[k - h];
      m(h, k) = v;
      s += v;
    }
    m(h, n - 1) = -s;
  }
  return DenseOperator(m, {LaplacianKind::DirectedOut, false, alpha, "closed-form-path"});
}

// First row of f(C) for the circulant C with C_{ij} = c_{(j-i) mod n}.
inline std::vector<std::complex<double>> circulant_function_row(
    const std::vector<double>& first_row,
    const std::function<std::complex<double>(std::complex<double>)>& f) {
  const std::size_t n = first_row.size();
  std::vector<std::complex<double>> c(first_row.begin(), first_row.end());
  auto lam = fft::dft(c, +1);  // lambda_l = sum_m c_m e^{2 pi i l m / n}
  for (auto& z : lam) z = f(z);
  auto r = fft::dft(lam, -1);
  for (auto& z : r) z /= double(n);
  return r;
}

// L_out^a of the directed cycle i -> i+1 via FFT diagonalization.
inline DenseOperator cycle_fractional_entries(std::size_t n, double alpha,
                                              double* imag_residue = nullptr) {
  if (n < 3) throw InputError("cycle needs n >= 3");
  detail::check_alpha(alpha);
  std::vector<double> c(n, 0.0);
  c[0] = 1.0;
  c[1] = -1.0;
  const double tiny = 64.0 * kEps;
  auto row = circulant_function_row(c, [&](std::complex<double> z) {
    return std::abs(z) <= tiny ? std::complex<double>(0.0) : detail::principal_pow(z, alpha);
  });
  double im = 0, re = 0;
  for (auto& z : row) im = std::max(im, std::abs(z.imag())), re = std::max(re, std::abs(z.real()));
  if (imag_residue) *imag_residue = im / re;
  if (im > 1e-10 * re) throw NumericalError("circulant realification residue too large");
  Eigen::MatrixXd m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = row[(j + n - i) % n].real();
  return DenseOperator(m, {LaplacianKind::DirectedOut, false, alpha, "fft-circulant"});
}

// n -> infinity limit of the cycle entry at d = (k - h) mod n.
inline double cycle_entry_limit(std::size_t d, double alpha) { return special::gamma_ratio(d, alpha); }

struct AbsorptionResult {
  double expectation = 0.0;
  double closed_form = 0.0;   // (n-1) t_n / a
  double fundamental = 0.0;   // from the Toeplitz (I - Q)^{-1}
  long long n_step = 0;
};

// Expected steps from node 0 to the sink of the directed path.
inline AbsorptionResult expected_absorption_steps(std::size_t n, double alpha) {
  if (n < 2) throw InputError("path needs n >= 2");
  detail::check_alpha(alpha);
  // t_l = (-1)^{l-1} binom(-a, l-1), t_1 = 1, t_{l+1} = t_l (l - 1 + a) / l
  std::vector<double> tl(n + 1);
  tl[1] = 1.0;
  for (std::size_t l = 1; l < n; ++l) tl[l + 1] = tl[l] * (double(l) - 1.0 + alpha) / double(l);
  AbsorptionResult r;
  for (std::size_t l = 1; l + 1 <= n; ++l) r.expectation += tl[l];
  r.closed_form = (double(n) - 1.0) * tl[n] / alpha;

  // Transient block Q of P (nodes 0..n-2) is upper triangular Toeplitz with
  // zero diagonal; N = (I - Q)^{-1} is Toeplitz as well, solved by recurrence.
  auto lp = path_fractional_entries(n, alpha);
  const std::size_t m = n - 1;
  std::vector<double> q(m, 0.0);  // q[j] = P(0, j)
  for (std::size_t j = 1; j < m; ++j) q[j] = -lp.entries(0, j) / lp.entries(0, 0);
  std::vector<double> nn(m, 0.0);  // first row of N: N (I - Q) = I
  nn[0] = 1.0;
  for (std::size_t j = 1; j < m; ++j) {
    double s = 0;
    for (std::size_t k = 0; k < j; ++k) s += nn[k] * q[j - k];
    nn[j] = s;
  }
  for (double v : nn) r.fundamental += v;
  double tol = 1e-10 * std::max(1.0, r.expectation);
  if (std::abs(r.fundamental - r.expectation) > tol || std::abs(r.closed_form - r.expectation) > tol)
    throw NumericalError("absorption cross-check failed");
  r.n_step = static_cast<long long>(std::ceil(r.expectation - 1e-12 * r.expectation));
  return r;
}

// Large-gap asymptotic of the path transition probability 0 -> gap.
inline double path_transition_asymptotic(double alpha, std::size_t gap) {
  if (gap < 1) throw InputError("gap must be >= 1");
  return std::tgamma(alpha + 1.0) * std::sin(std::numbers::pi * alpha) / std::numbers::pi *
         std::pow(double(gap), -alpha - 1.0);
}

// Exact path transition probability 0 -> gap (gap < n-1): -Gamma(gap-a)/(Gamma(-a) gap!).
inline double path_transition_exact(double alpha, std::size_t gap) {
  return -special::gamma_ratio(gap, alpha);
}

struct ReturnProbabilityCurve {
  std::vector<double> times;
  std::vector<double> values;
  double max_imag_residue = 0.0;
  double relative_spectral_gap = 0.0;
  std::size_t zero_multiplicity = 0;
  double eigenvector_condition = 1.0;  // estimate; large values hint at a defective Lbar
  bool defective_suspected = false;
  Eigen::VectorXcd eigenvalues;
};

// p0(t) = (1/n) sum_i exp(-lambda_i t) over the eigenvalues of Lbar.
inline ReturnProbabilityCurve return_probability(const DenseOperator& lbar,
                                                 const std::vector<double>& times,
                                                 bool estimate_condition = true) {
  require_square(lbar.entries, "return probability");
  const Eigen::Index n = lbar.n();
  ReturnProbabilityCurve c;
  Eigen::EigenSolver<Eigen::MatrixXd> es(lbar.entries, estimate_condition);
  if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed");
  c.eigenvalues = es.eigenvalues();
  double rho = c.eigenvalues.cwiseAbs().maxCoeff();
  double ztol = std::max(double(n) * kEps * rho * 10.0, 1e-300);
  double smallest = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    double a = std::abs(c.eigenvalues[i]);
    if (a <= ztol)
      ++c.zero_multiplicity;
    else
      smallest = std::min(smallest, a);
  }
  c.relative_spectral_gap = std::isfinite(smallest) ? rho / smallest : 0.0;
  if (estimate_condition) {
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(es.eigenvectors());
    auto sv = svd.singularValues();
    c.eigenvector_condition = sv[0] / std::max(sv[sv.size() - 1], 1e-300);
    c.defective_suspected = c.eigenvector_condition > 1e10;
  }
  for (double t : times) {
    std::complex<double> s = 0;
    for (Eigen::Index i = 0; i < n; ++i) s += std::exp(-t * c.eigenvalues[i]);
    s /= double(n);
    c.max_imag_residue = std::max(c.max_imag_residue, std::abs(s.imag()));
    if (std::abs(s.imag()) > 1e-10) throw NumericalError("return probability has an imaginary part");
    c.times.push_back(t);
    c.values.push_back(t == 0.0 ? 1.0 : s.real());
  }
  return c;
}

}  // namespace fracgraph
