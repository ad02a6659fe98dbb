#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "fracgraph/error.hpp"
#include "fracgraph/operator.hpp"
#include "fracgraph/special.hpp"

namespace fracgraph {

using cdouble = std::complex<double>;
constexpr double kEps = std::numeric_limits<double>::epsilon();

struct PowerOptions {
  double zero_tol_factor = 1.0;  // zero cluster: |lambda| <= factor * n * eps * rho
  double cluster_delta = 0.1;    // cluster separation: delta * max(1, |lambda|)
};

struct SpectralData {
  bool symmetric = false;
  Eigen::VectorXcd eigenvalues;  // symmetric: ascending; Schur: diagonal order after reordering
  Eigen::MatrixXd vectors;       // symmetric only: orthonormal eigenvectors
  Eigen::MatrixXcd basis;        // Schur only: unitary Q with M = Q T Q^*
  Eigen::MatrixXcd triangular;   // Schur only: T
  std::vector<Eigen::Index> block_start;  // Schur only: cluster blocks on the diagonal of T
  std::vector<bool> block_is_zero;
  double spectral_radius = 0.0;
  double zero_tol = 0.0;
  std::vector<Eigen::Index> zero_cluster;  // positions in `eigenvalues`

  Eigen::Index n() const { return eigenvalues.size(); }
  Eigen::VectorXd real_eigenvalues() const { return eigenvalues.real(); }
};

struct FractionalPowerResult {
  DenseOperator op;
  double alpha = 1.0;
  std::vector<Eigen::Index> zero_cluster;
  std::string method;
  double imag_residue = 0.0;  // max |Im| before realification, relative to max |entry|
};

namespace detail {

inline cdouble principal_pow(cdouble z, double a) {
  if (z == cdouble(0.0)) return 0.0;
  return std::exp(a * std::log(z));
}

inline double zero_tolerance(Eigen::Index n, double rho, const PowerOptions& opt) {
  return opt.zero_tol_factor * double(n) * kEps * std::max(rho, 1e-300);
}

// Swap diagonal entries k, k+1 of the complex Schur form with one Givens rotation.
inline void swap_schur(Eigen::MatrixXcd& t, Eigen::MatrixXcd& q, Eigen::Index k) {
  const Eigen::Index n = t.rows();
  cdouble a = t(k, k), b = t(k + 1, k + 1), c = t(k, k + 1);
  cdouble x = c, y = b - a;  // eigenvector of [[a, c], [0, b]] for b
  double r = std::hypot(std::abs(x), std::abs(y));
  if (r == 0.0) return;
  cdouble g11 = x / r, g21 = y / r;
  // G = [[g11, -conj(g21)], [g21, conj(g11)]]
  for (Eigen::Index j = 0; j < n; ++j) {
    cdouble u = t(k, j), v = t(k + 1, j);
    t(k, j) = std::conj(g11) * u + std::conj(g21) * v;
    t(k + 1, j) = -g21 * u + g11 * v;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    cdouble u = t(i, k), v = t(i, k + 1);
    t(i, k) = u * g11 + v * g21;
    t(i, k + 1) = -u * std::conj(g21) + v * std::conj(g11);
    u = q(i, k), v = q(i, k + 1);
    q(i, k) = u * g11 + v * g21;
    q(i, k + 1) = -u * std::conj(g21) + v * std::conj(g11);
  }
  t(k + 1, k) = 0.0;
  t(k, k) = b;
  t(k + 1, k + 1) = a;
}

// Solves A X - X B = C for upper triangular A (p x p) and B (q x q).
inline Eigen::MatrixXcd solve_triangular_sylvester(const Eigen::MatrixXcd& a,
                                                   const Eigen::MatrixXcd& b,
                                                   const Eigen::MatrixXcd& c) {
  const Eigen::Index p = a.rows(), qn = b.rows();
  Eigen::MatrixXcd x(p, qn);
  for (Eigen::Index col = 0; col < qn; ++col) {
    Eigen::VectorXcd rhs = c.col(col);
    for (Eigen::Index r = 0; r < col; ++r) rhs += x.col(r) * b(r, col);
    Eigen::MatrixXcd shifted = a;
    shifted.diagonal().array() -= b(col, col);
    x.col(col) = shifted.triangularView<Eigen::Upper>().solve(rhs);
  }
  return x;
}

// Principal square root of an upper triangular matrix with no eigenvalues on the
// closed negative real axis.
inline Eigen::MatrixXcd sqrtm_triangular(const Eigen::MatrixXcd& t) {
  const Eigen::Index n = t.rows();
  Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    r(j, j) = std::sqrt(t(j, j));
    for (Eigen::Index i = j - 1; i >= 0; --i) {
      cdouble s = t(i, j);
      for (Eigen::Index k = i + 1; k < j; ++k) s -= r(i, k) * r(k, j);
      r(i, j) = s / (r(i, i) + r(j, j));
    }
  }
  return r;
}

inline double norm1(const Eigen::MatrixXcd& m) {
  return m.cwiseAbs().colwise().sum().maxCoeff();
}

// T^a for a triangular block by inverse scaling and squaring: take square roots
// until T is near I, sum the binomial series of (I - Y)^a, then square back,
// resetting the diagonal to exact values at every level.
inline Eigen::MatrixXcd power_iss(const Eigen::MatrixXcd& t, double a) {
  const Eigen::Index m = t.rows();
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(m, m);
  Eigen::MatrixXcd x = t;
  int s = 0;
  while (norm1(x - id) > 0.25) {
    if (++s > 60) throw NumericalError("inverse scaling: square roots did not approach I");
    x = sqrtm_triangular(x);
  }
  Eigen::MatrixXcd y = id - x;
  Eigen::MatrixXcd term = id, r = id;
  int quiet = 0;
  for (int k = 1; k < 200 && quiet < 2; ++k) {
    term = (term * y).eval() * cdouble(-(a - k + 1.0) / k);
    r += term;
    quiet = norm1(term) <= kEps * norm1(r) ? quiet + 1 : 0;
  }
  if (quiet < 2) throw NumericalError("inverse scaling: binomial series did not converge");
  auto set_diag = [&](int level) {
    double e = a / std::ldexp(1.0, level);
    for (Eigen::Index i = 0; i < m; ++i) r(i, i) = principal_pow(t(i, i), e);
  };
  set_diag(s);
  for (int j = s; j >= 1; --j) {
    r = (r.triangularView<Eigen::Upper>() * r).eval();
    r.triangularView<Eigen::StrictlyLower>().setZero();
    set_diag(j - 1);
  }
  return r;
}

// Taylor expansion of x^a about the block mean; for tight clusters.
inline Eigen::MatrixXcd power_taylor(const Eigen::MatrixXcd& t, double a) {
  const Eigen::Index m = t.rows();
  cdouble sigma = t.diagonal().mean();
  Eigen::MatrixXcd nmat = t;
  nmat.diagonal().array() -= sigma;
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Identity(m, m);
  Eigen::MatrixXcd f = p * principal_pow(sigma, a);
  cdouble coef = principal_pow(sigma, a);
  int quiet = 0;
  for (int k = 1; k < 1000; ++k) {
    p = (p * nmat).eval();
    coef *= (a - k + 1.0) / (double(k) * sigma);
    Eigen::MatrixXcd term = coef * p;
    f += term;
    quiet = (k > m && norm1(term) <= kEps * norm1(f)) ? quiet + 1 : 0;
    if (quiet >= 2) return f;
  }
  throw NumericalError("Taylor series on eigenvalue cluster did not converge");
}

inline Eigen::MatrixXcd atomic_power(const Eigen::MatrixXcd& t, double a) {
  if (t.rows() == 1) return Eigen::MatrixXcd::Constant(1, 1, principal_pow(t(0, 0), a));
  cdouble sigma = t.diagonal().mean();
  double spread = (t.diagonal().array() - sigma).abs().maxCoeff();
  if (spread <= 0.5 * std::abs(sigma)) return power_taylor(t, a);
  return power_iss(t, a);
}

}  // namespace detail

inline SpectralData symmetric_spectrum(const DenseOperator& l, const PowerOptions& opt = {}) {
  require_square(l.entries, "symmetric spectrum");
  if (!is_symmetric(l.entries, 1e-12)) throw InputError("symmetric path: input is not symmetric");
  Eigen::MatrixXd sym = 0.5 * (l.entries + l.entries.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  if (es.info() != Eigen::Success) throw NumericalError("symmetric eigensolver failed");
  SpectralData sd;
  sd.symmetric = true;
  sd.eigenvalues = es.eigenvalues().cast<cdouble>();
  sd.vectors = es.eigenvectors();
  sd.spectral_radius = es.eigenvalues().cwiseAbs().maxCoeff();
  sd.zero_tol = detail::zero_tolerance(l.n(), sd.spectral_radius, opt);
  for (Eigen::Index i = 0; i < sd.n(); ++i)
    if (std::abs(es.eigenvalues()[i]) <= sd.zero_tol) sd.zero_cluster.push_back(i);
  return sd;
}

// Complex Schur form, reordered so that eigenvalue clusters are contiguous.
inline SpectralData schur_spectrum(const DenseOperator& m, const PowerOptions& opt = {}) {
  require_square(m.entries, "Schur spectrum");
  const Eigen::Index n = m.n();
  Eigen::ComplexSchur<Eigen::MatrixXcd> cs(m.entries.cast<cdouble>());
  if (cs.info() != Eigen::Success) throw NumericalError("complex Schur decomposition failed");
  Eigen::MatrixXcd t = cs.matrixT(), q = cs.matrixU();
  t.triangularView<Eigen::StrictlyLower>().setZero();

  SpectralData sd;
  sd.spectral_radius = t.diagonal().cwiseAbs().maxCoeff();
  sd.zero_tol = detail::zero_tolerance(n, sd.spectral_radius, opt);
  const double neg_tol = 10.0 * double(n) * kEps * std::max(sd.spectral_radius, 1e-300);

  Eigen::VectorXcd d = t.diagonal();
  std::vector<int> cl(n);
  std::iota(cl.begin(), cl.end(), 0);
  std::function<int(int)> find = [&](int i) { return cl[i] == i ? i : cl[i] = find(cl[i]); };
  std::vector<bool> is_zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    is_zero[i] = std::abs(d[i]) <= sd.zero_tol;
    if (!is_zero[i] && d[i].real() < -neg_tol) {
      std::ostringstream os;
      os << "eigenvalue " << d[i] << " lies outside the domain of the principal branch";
      throw InputError(os.str());
    }
  }
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      bool join;
      if (is_zero[i] || is_zero[j])
        join = is_zero[i] && is_zero[j];
      else
        join = std::abs(d[i] - d[j]) <=
               opt.cluster_delta * std::max(1.0, std::min(std::abs(d[i]), std::abs(d[j])));
      if (join) cl[find(int(i))] = find(int(j));
    }
  // Key each position by the first diagonal position of its cluster.
  std::vector<Eigen::Index> first(n, n);
  for (Eigen::Index i = 0; i < n; ++i) first[find(int(i))] = std::min(first[find(int(i))], i);
  std::vector<Eigen::Index> key(n);
  for (Eigen::Index i = 0; i < n; ++i) key[i] = first[find(int(i))];
  std::vector<bool> zero_at(is_zero);

  // Near-zero eigenvalues kept outside the zero cluster make the coupling
  // equations ill-conditioned; refuse rather than return garbage.
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (is_zero[i] && !is_zero[j] && std::abs(d[j]) <= 100.0 * sd.zero_tol) {
        std::ostringstream os;
        os << "Parlett breakdown: eigenvalue " << d[j] << " too close to the zero cluster ("
           << d[i] << ")";
        throw NumericalError(os.str());
      }

  for (bool swapped = true; swapped;) {
    swapped = false;
    for (Eigen::Index k = 0; k + 1 < n; ++k)
      if (key[k] > key[k + 1]) {
        detail::swap_schur(t, q, k);
        std::swap(key[k], key[k + 1]);
        std::vector<bool>::swap(zero_at[k], zero_at[k + 1]);
        swapped = true;
      }
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    if (k == 0 || key[k] != key[k - 1]) {
      sd.block_start.push_back(k);
      sd.block_is_zero.push_back(zero_at[k]);
    }
    if (zero_at[k]) sd.zero_cluster.push_back(k);
  }
  sd.block_start.push_back(n);
  sd.eigenvalues = t.diagonal();
  sd.basis = std::move(q);
  sd.triangular = std::move(t);
  return sd;
}

namespace detail {

inline void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InputError("alpha must lie in (0, 1]");
}

}  // namespace detail

inline FractionalPowerResult fractional_power_symmetric(const SpectralData& sd, double alpha,
                                                        OperatorMeta meta = {}) {
  detail::check_alpha(alpha);
  if (!sd.symmetric) throw InputError("symmetric path needs symmetric spectral data");
  const Eigen::Index n = sd.n();
  const double neg_tol = 10.0 * double(n) * kEps * std::max(sd.spectral_radius, 1e-300);
  Eigen::VectorXd lam = sd.real_eigenvalues();
  Eigen::VectorXd f(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (lam[i] < -neg_tol) {
      std::ostringstream os;
      os << "eigenvalue " << lam[i] << " is negative: input is not positive semidefinite";
      throw InputError(os.str());
    }
    f[i] = (lam[i] <= sd.zero_tol) ? 0.0 : std::pow(lam[i], alpha);
  }
  Eigen::MatrixXd r = sd.vectors * f.asDiagonal() * sd.vectors.transpose();
  r = 0.5 * (r + r.transpose());
  meta.alpha = alpha;
  meta.method = "symmetric-eig";
  return {DenseOperator(r, meta), alpha, sd.zero_cluster, "symmetric-eig", 0.0};
}

inline FractionalPowerResult fractional_power_symmetric(const DenseOperator& l, double alpha,
                                                        const PowerOptions& opt = {}) {
  detail::check_alpha(alpha);
  return fractional_power_symmetric(symmetric_spectrum(l, opt), alpha, l.meta);
}

inline FractionalPowerResult fractional_power_general(const SpectralData& sd, double alpha,
                                                      OperatorMeta meta = {}) {
  detail::check_alpha(alpha);
  if (sd.symmetric) throw InputError("general path needs Schur spectral data");
  const auto& t = sd.triangular;
  const Eigen::Index n = t.rows();
  const std::size_t nb = sd.block_start.size() - 1;
  auto start = [&](std::size_t b) { return sd.block_start[b]; };
  auto len = [&](std::size_t b) { return sd.block_start[b + 1] - sd.block_start[b]; };

  Eigen::MatrixXcd f = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t b = 0; b < nb; ++b) {
    if (sd.block_is_zero[b]) continue;  // f(0) = 0 on a semisimple zero eigenvalue
    Eigen::MatrixXcd tb = t.block(start(b), start(b), len(b), len(b));
    f.block(start(b), start(b), len(b), len(b)) = detail::atomic_power(tb, alpha);
  }
  // Block Parlett recurrence, column of blocks by column.
  for (std::size_t j = 1; j < nb; ++j) {
    for (std::size_t ii = j; ii-- > 0;) {
      auto bi = start(ii), li = len(ii), bj = start(j), lj = len(j);
      Eigen::MatrixXcd rhs = f.block(bi, bi, li, li) * t.block(bi, bj, li, lj) -
                             t.block(bi, bj, li, lj) * f.block(bj, bj, lj, lj);
      for (std::size_t k = ii + 1; k < j; ++k) {
        auto bk = start(k), lk = len(k);
        rhs += f.block(bi, bk, li, lk) * t.block(bk, bj, lk, lj) -
               t.block(bi, bk, li, lk) * f.block(bk, bj, lk, lj);
      }
      f.block(bi, bj, li, lj) = detail::solve_triangular_sylvester(
          t.block(bi, bi, li, li), t.block(bj, bj, lj, lj), rhs);
    }
  }
  Eigen::MatrixXcd full = sd.basis * f * sd.basis.adjoint();
  if (!full.allFinite()) throw NumericalError("Schur-Parlett produced non-finite entries");
  double scale = std::max(full.real().cwiseAbs().maxCoeff(), 1e-300);
  double resid = full.imag().cwiseAbs().maxCoeff() / scale;
  if (resid > 1e-10) {
    std::ostringstream os;
    os << "realification failed: relative imaginary residue " << resid;
    throw NumericalError(os.str());
  }
  meta.alpha = alpha;
  meta.method = "schur-parlett";
  return {DenseOperator(full.real(), meta), alpha, sd.zero_cluster, "schur-parlett", resid};
}

inline FractionalPowerResult fractional_power_general(const DenseOperator& m, double alpha,
                                                      const PowerOptions& opt = {}) {
  detail::check_alpha(alpha);
  return fractional_power_general(schur_spectrum(m, opt), alpha, m.meta);
}

// Symmetric inputs go through the eigendecomposition, everything else through Schur.
inline FractionalPowerResult fractional_power(const DenseOperator& m, double alpha,
                                              const PowerOptions& opt = {}) {
  if (is_symmetric(m.entries, 1e-12)) return fractional_power_symmetric(m, alpha, opt);
  return fractional_power_general(m, alpha, opt);
}

// f applied through a symmetric eigendecomposition: U f(Lambda) U^T.
inline Eigen::MatrixXd symmetric_function(const SpectralData& sd,
                                          const std::function<double(double)>& fn) {
  if (!sd.symmetric) throw InputError("symmetric_function needs symmetric spectral data");
  Eigen::VectorXd lam = sd.real_eigenvalues();
  Eigen::VectorXd f = lam.unaryExpr(fn);
  return sd.vectors * f.asDiagonal() * sd.vectors.transpose();
}

struct SeriesResult {
  DenseOperator partial_sum;
  double remainder_estimate = 0.0;  // |sum_{k>K} binom(a,k)(-1)^k| rho^a
  double rho = 0.0;
  std::size_t terms = 0;
};

// rho^a sum_{k=0}^{K} binom(a,k) (-1)^k (B/rho)^k with rho = max degree, B = rho I - L.
inline SeriesResult fractional_power_series_oracle(const DenseOperator& l, double alpha,
                                                   std::size_t terms) {
  detail::check_alpha(alpha);
  require_square(l.entries, "series oracle");
  const auto& m = l.entries;
  const Eigen::Index n = m.rows();
  double scale = std::max(max_abs(m), 1e-300);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(m.row(i).sum()) > 1e-12 * scale * n)
      throw InputError("series oracle: row sums of L must vanish");
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j && m(i, j) > 1e-14 * scale) throw InputError("series oracle: positive offdiagonal");
  }
  double rho = m.diagonal().maxCoeff();
  if (!(rho > 0)) throw InputError("series oracle: zero Laplacian");
  Eigen::MatrixXd c = Eigen::MatrixXd::Identity(n, n) - m / rho;  // B / rho
  Eigen::MatrixXd p = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd s = p;
  double coef = 1.0;  // binom(a, k) (-1)^k
  double partial = 1.0;
  for (std::size_t k = 1; k <= terms; ++k) {
    p = (p * c).eval();
    coef *= -(alpha - double(k) + 1.0) / double(k);
    s += coef * p;
    partial += coef;
  }
  // sum_{k>=0} binom(a,k)(-1)^k = 0^a = 0 for a > 0, so the tail equals -partial.
  double remainder = std::abs(partial) * std::pow(rho, alpha);
  OperatorMeta meta = l.meta;
  meta.alpha = alpha;
  meta.method = "series-oracle";
  return {DenseOperator(std::pow(rho, alpha) * s, meta), remainder, rho, terms};
}

// exp(-t M) by scaling and squaring with a diagonal Pade approximant (degree
// 3..13 chosen from the 1-norm so the backward error stays below unit roundoff).
inline DenseOperator matrix_exponential(const DenseOperator& mop, double t) {
  require_square(mop.entries, "matrix exponential");
  if (!(t >= 0.0) || !std::isfinite(t)) throw InputError("matrix exponential: t must be >= 0");
  const Eigen::Index n = mop.n();
  OperatorMeta meta = mop.meta;
  meta.method = "expm-pade";
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  if (t == 0.0) return DenseOperator(id, meta);
  Eigen::MatrixXd a = -t * mop.entries;
  double norm = a.cwiseAbs().colwise().sum().maxCoeff();
  if (!std::isfinite(norm) || norm > 1e200)
    throw NumericalError("matrix exponential: ||tM|| too large, result would overflow");

  static constexpr double theta[] = {1.495585217958292e-2, 2.539398330063230e-1,
                                     9.504178996162932e-1, 2.097847961257068e0,
                                     5.371920351148152e0};
  static constexpr int degree[] = {3, 5, 7, 9, 13};
  static constexpr double b3[] = {120, 60, 12, 1};
  static constexpr double b5[] = {30240, 15120, 3360, 420, 30, 1};
  static constexpr double b7[] = {17297280, 8648640, 1995840, 277200, 25200, 1512, 56, 1};
  static constexpr double b9[] = {17643225600., 8821612800., 2075673600., 302702400., 30270240.,
                                  2162160.,     110880.,     3960.,       90.,        1.};
  static constexpr double b13[] = {64764752532480000., 32382376266240000., 7771770303897600.,
                                   1187353796428800.,  129060195264000.,   10559470521600.,
                                   670442572800.,      33522128640.,       1323241920.,
                                   40840800.,          960960.,            16380.,
                                   182.,               1.};

  auto pade = [&](const Eigen::MatrixXd& x, int m) {
    Eigen::MatrixXd u, v;
    Eigen::MatrixXd x2 = x * x;
    if (m == 13) {
      const double* b = b13;
      Eigen::MatrixXd x4 = x2 * x2, x6 = x4 * x2;
      u = x * (x6 * (b[13] * x6 + b[11] * x4 + b[9] * x2) + b[7] * x6 + b[5] * x4 + b[3] * x2 +
               b[1] * id);
      v = x6 * (b[12] * x6 + b[10] * x4 + b[8] * x2) + b[6] * x6 + b[4] * x4 + b[2] * x2 +
          b[0] * id;
    } else {
      const double* b = m == 3 ? b3 : m == 5 ? b5 : m == 7 ? b7 : b9;
      Eigen::MatrixXd pw = id;
      Eigen::MatrixXd uo = b[1] * id;
      v = b[0] * id;
      for (int k = 2; k <= m; k += 2) {
        pw = pw * x2;
        v += b[k] * pw;
        uo += b[k + 1] * pw;
      }
      u = x * uo;
    }
    return Eigen::MatrixXd((v - u).partialPivLu().solve(v + u));
  };

  Eigen::MatrixXd r;
  int s = 0;
  bool done = false;
  for (int i = 0; i < 4; ++i)
    if (norm <= theta[i]) {
      r = pade(a, degree[i]);
      done = true;
      break;
    }
  if (!done) {
    s = std::max(0, int(std::ceil(std::log2(norm / theta[4]))));
    if (s > 1000) throw NumericalError("matrix exponential: scaling exponent too large");
    r = pade(a / std::ldexp(1.0, s), 13);
    for (int k = 0; k < s; ++k) r = (r * r).eval();
  }
  if (!r.allFinite()) throw NumericalError("matrix exponential overflowed");
  return DenseOperator(r, meta);
}

struct MMatrixReport {
  bool is_sign_pattern = false;
  double max_positive_offdiag = 0.0;
  double min_diag = 0.0;
  double max_abs_row_sum = 0.0;
  bool row_sums_ok = false;
  double min_real_eigenvalue = 0.0;
  bool spectrum_ok = false;
  bool passed() const { return is_sign_pattern && row_sums_ok && spectrum_ok; }
};

inline MMatrixReport verify_m_matrix(const DenseOperator& mop, double tol) {
  const auto& m = mop.entries;
  require_square(m, "verify_m_matrix");
  MMatrixReport r;
  const Eigen::Index n = m.rows();
  r.max_positive_offdiag = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j) r.max_positive_offdiag = std::max(r.max_positive_offdiag, m(i, j));
  if (n == 1) r.max_positive_offdiag = 0.0;
  r.min_diag = m.diagonal().minCoeff();
  r.is_sign_pattern = r.max_positive_offdiag <= tol && r.min_diag >= -tol;
  r.max_abs_row_sum = m.rowwise().sum().cwiseAbs().maxCoeff();
  r.row_sums_ok = r.max_abs_row_sum <= tol * std::max(1.0, max_abs(m));
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
  r.min_real_eigenvalue = es.eigenvalues().real().minCoeff();
  r.spectrum_ok = r.min_real_eigenvalue >= -tol * std::max(1.0, max_abs(m));
  return r;
}

}  // namespace fracgraph
