#pragma once

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <vector>

#include "fracgraph/decay.hpp"
#include "fracgraph/error.hpp"

namespace fracgraph {

enum class Orientation { Undirected, Directed };

inline const char* to_string(Orientation o) {
  return o == Orientation::Undirected ? "undirected" : "directed";
}

struct QuadratureSettings {
  double tol = 1e-10;             // relative to the L1 norm of the integrand
  std::size_t max_panels = 1u << 22;
  double envelope_cut = 46.0;     // drop x where the integrand is below e^{-cut}
  unsigned max_depth = 15;
};

struct QuadratureValue {
  double value = 0.0;
  double error = 0.0;
  double l1 = 0.0;
  std::size_t panels = 0;
};

namespace detail {

struct GkPiece {
  double value, error, l1;
};

template <class F>
GkPiece gk31(F& f, double lo, double hi) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  GkPiece g{0, 0, 0};
  g.value = GK::integrate(f, lo, hi, 0, 0.0, &g.error, &g.l1);
  g.error *= 0.5 * (hi - lo);  // boost reports the leaf estimate on [-1, 1]
  return g;
}

// GK31 on [lo,hi], bisected until the error estimate is below the absolute
// target `abs_tol * (hi - lo) / width`. Stops early once a split no longer
// lowers the estimate: that residue is the estimator's own roundoff floor.
template <class F>
void gk_absolute(F& f, double lo, double hi, double abs_tol, double width, unsigned depth,
                 const GkPiece& whole, QuadratureValue& q) {
  auto accept = [&](const GkPiece& g) {
    q.value += g.value;
    q.error += g.error;
    q.l1 += g.l1;
  };
  if (whole.error <= abs_tol * (hi - lo) / width || depth == 0) return accept(whole);
  double mid = 0.5 * (lo + hi);
  GkPiece left = gk31(f, lo, mid), right = gk31(f, mid, hi);
  if (left.error + right.error >= 0.5 * whole.error) {
    accept(left);
    accept(right);
    return;
  }
  gk_absolute(f, lo, mid, abs_tol, width, depth - 1, left, q);
  gk_absolute(f, mid, hi, abs_tol, width, depth - 1, right, q);
}

// Sum over `panels` equal pieces of [a,b]. The integrands here have a
// power-type singularity at a (and, for large t, all their mass piled up
// next to it), so the first piece is split geometrically towards a, down to
// a width of w 2^-60. Every piece gets GK31 refined against an absolute
// budget tied to the total L1.
template <class F>
QuadratureValue panel_quadrature(F&& f, double a, double b, std::size_t panels,
                                 const QuadratureSettings& s) {
  if (panels > s.max_panels) {
    std::ostringstream os;
    os << "quadrature needs " << panels << " panels, above the cap of " << s.max_panels;
    throw NumericalError(os.str());
  }
  const double w = (b - a) / double(panels);
  std::vector<double> edges{a};
  for (int k = 60; k > 0; --k) edges.push_back(a + std::ldexp(w, -k));
  for (std::size_t p = 1; p <= panels; ++p) edges.push_back(p == panels ? b : a + w * double(p));

  QuadratureValue q;
  // coarse pass for the L1 scale
  std::vector<GkPiece> coarse(edges.size() - 1);
  double l1 = 0.0;
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    coarse[p] = gk31(f, edges[p], edges[p + 1]);
    l1 += coarse[p].l1;
  }
  const double budget = 0.5 * s.tol * std::max(l1, 1e-300);
  q.panels = panels;
  for (std::size_t p = 0; p + 1 < edges.size(); ++p)
    gk_absolute(f, edges[p], edges[p + 1], budget, b - a, s.max_depth, coarse[p], q);
  if (q.error > s.tol * std::max(q.l1, 1e-300)) {
    std::ostringstream os;
    os << "quadrature did not converge: error estimate " << q.error << " vs L1 " << q.l1;
    throw NumericalError(os.str());
  }
  return q;
}

// Symbol h(x) on [0, pi]: (2 - 2cos x)^a, or the principal (1 - e^{ix})^a
// written as (2 sin(x/2))^a e^{i a (x - pi)/2} to avoid cancellation near 0.
inline std::complex<double> lattice_symbol(double alpha, Orientation o, double x) {
  double r = 2.0 * std::sin(0.5 * x);
  if (o == Orientation::Undirected) return std::pow(r * r, alpha);
  return std::polar(std::pow(r, alpha), alpha * 0.5 * (x - std::numbers::pi));
}

// Largest x in (0, pi] that still matters: t Re h(x) <= cut.
inline double lattice_window(double alpha, Orientation o, double t, double cut) {
  auto g = [&](double x) { return t * lattice_symbol(alpha, o, x).real(); };
  if (g(std::numbers::pi) <= cut) return std::numbers::pi;
  double lo = 0.0, hi = std::numbers::pi;
  for (int k = 0; k < 200 && hi - lo > 1e-15 * hi; ++k) {
    double mid = 0.5 * (lo + hi);
    (g(mid) > cut ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace detail

// u(t)_z = (1/2pi) int_{-pi}^{pi} e^{-izx} e^{-t h(x)} dx for real z. The
// integrand at -x is the conjugate of the one at x, so the imaginary part
// vanishes identically and only (1/pi) int_0^pi Re(...) is integrated.
inline QuadratureValue lattice_solution_detail(double alpha, Orientation o, double t, double z,
                                               const QuadratureSettings& s = {}) {
  if (!(alpha > 0 && alpha <= 1)) throw InputError("alpha must lie in (0, 1]");
  if (!(t > 0)) throw InputError("t must be positive");
  double x_max = detail::lattice_window(alpha, o, t, s.envelope_cut);
  auto f = [&](double x) {
    auto h = detail::lattice_symbol(alpha, o, x);
    return std::exp(-t * h.real()) * std::cos(z * x + t * h.imag());
  };
  std::size_t panels = 8 + static_cast<std::size_t>(std::ceil(std::abs(z) * x_max / std::numbers::pi));
  auto q = detail::panel_quadrature(f, 0.0, x_max, panels, s);
  q.value /= std::numbers::pi;
  q.error /= std::numbers::pi;
  q.l1 /= std::numbers::pi;
  return q;
}

inline double lattice_solution(double alpha, Orientation o, double t, double z,
                               const QuadratureSettings& s = {}) {
  return lattice_solution_detail(alpha, o, t, z, s).value;
}

// Evaluator bound to (alpha, orientation, settings).
struct LatticeSolution {
  double alpha = 0.5;
  Orientation orientation = Orientation::Undirected;
  QuadratureSettings settings{};
  double operator()(double t, double z) const {
    return lattice_solution(alpha, orientation, t, z, settings);
  }
};

// sum_{k=-K}^{K} u(t)_k (undirected) or sum_{k=0}^{K} (directed; u_k = 0 for k < 0),
// as one integral against the Dirichlet kernel.
inline double lattice_partial_mass(double alpha, Orientation o, double t, std::size_t kmax,
                                   const QuadratureSettings& s = {}) {
  double x_max = detail::lattice_window(alpha, o, t, s.envelope_cut);
  const double kk = double(kmax);
  auto f = [&](double x) {
    auto h = detail::lattice_symbol(alpha, o, x);
    double env = std::exp(-t * h.real());
    double sh = std::sin(0.5 * x);
    if (o == Orientation::Undirected) {
      double d = sh == 0.0 ? 2.0 * kk + 1.0 : std::sin((kk + 0.5) * x) / sh;
      return env * std::cos(t * h.imag()) * d;
    }
    // sum_{k=0}^K e^{-ikx} = e^{-iKx/2} sin((K+1)x/2) / sin(x/2)
    double d = sh == 0.0 ? kk + 1.0 : std::sin(0.5 * (kk + 1.0) * x) / sh;
    return env * std::cos(0.5 * kk * x + t * h.imag()) * d;
  };
  std::size_t panels = 8 + static_cast<std::size_t>(std::ceil((kk + 1.0) * x_max / std::numbers::pi));
  return detail::panel_quadrature(f, 0.0, x_max, panels, s).value / std::numbers::pi;
}

// Mass beyond K from e^{-th} = sum_j (-t)^j h^j / j!, using closed-form tail sums
// of the Fourier coefficients of h^j. Directed: -Gamma(K+1-b) / (Gamma(K+1) Gamma(1-b));
// undirected (two-sided): -Gamma(2b+1) sin(pi b) Gamma(K+1-b) / (pi b Gamma(K+1+b)); b = j a.
// Convergent for the directed symbol, asymptotic in t K^{-2a} for the undirected one.
inline double lattice_tail_mass(double alpha, Orientation o, double t, std::size_t kmax) {
  const double kk = double(kmax);
  double sum = 0.0, prev = std::numeric_limits<double>::infinity();
  for (int j = 1; j < 400; ++j) {
    const double b = j * alpha;
    if (b > kk) break;
    if (std::abs(b - std::round(b)) < 1e-14) continue;  // h^j is a trigonometric polynomial
    int sg = 1;
    double lg;
    if (o == Orientation::Directed) {
      lg = std::lgamma(kk + 1.0 - b) - std::lgamma(kk + 1.0) - special::log_abs_gamma(1.0 - b, &sg);
      sg = -sg;
    } else {
      double sn = std::sin(std::numbers::pi * b);
      lg = std::lgamma(2.0 * b + 1.0) + std::log(std::abs(sn) / (std::numbers::pi * b)) +
           std::lgamma(kk + 1.0 - b) - std::lgamma(kk + 1.0 + b);
      sg = sn > 0 ? -1 : 1;
    }
    lg += j * std::log(t) - std::lgamma(j + 1.0);
    double term = (j % 2 ? -sg : sg) * std::exp(lg);
    if (o == Orientation::Undirected && std::abs(term) > prev) break;  // optimal truncation
    sum += term;
    prev = std::abs(term);
    if (prev < 1e-18 * std::max(1.0, std::abs(sum))) break;
  }
  return sum;
}

// Total mass: partial sum up to a K past the bulk, plus the analytic tail.
inline double lattice_mass_tail_corrected(double alpha, Orientation o, double t, std::size_t kmax,
                                          const QuadratureSettings& s = {}) {
  const double rate = o == Orientation::Undirected ? 2.0 * alpha : alpha;
  const double reach = o == Orientation::Undirected ? 20.0 : 4.0;  // t K^{-rate} <= 1/reach
  const double k_bulk = std::ceil(std::pow(reach * t, 1.0 / rate));
  const auto k = std::max<std::size_t>(kmax, static_cast<std::size_t>(k_bulk));
  return lattice_partial_mass(alpha, o, t, k, s) + lattice_tail_mass(alpha, o, t, k);
}

struct StableParams {
  double alpha = 2.0;
  double beta = 0.0;
  double gamma = 1.0;
  double delta = 0.0;
};

// f(xi) = (1/pi) int_0^inf e^{-(g z)^a} cos((xi - delta) z - beta tan(a pi/2) (g z)^a) dz,
// truncated where the envelope drops below 1e-14.
inline double stable_density(const StableParams& p, double xi, const QuadratureSettings& s = {}) {
  if (!(p.alpha > 0 && p.alpha <= 2)) throw InputError("stable alpha must lie in (0, 2]");
  if (p.beta < -1 || p.beta > 1) throw InputError("stable beta must lie in [-1, 1]");
  if (!(p.gamma > 0)) throw InputError("stable gamma must be positive");
  if (p.alpha == 1.0 && p.beta != 0.0) throw InputError("alpha = 1 requires beta = 0");
  const double skew = p.beta == 0.0 ? 0.0 : p.beta * std::tan(p.alpha * std::numbers::pi / 2.0);
  const double x = xi - p.delta;
  const double zmax = std::pow(std::log(1e14), 1.0 / p.alpha) / p.gamma;
  auto f = [&](double z) {
    double gz = std::pow(p.gamma * z, p.alpha);
    return std::exp(-gz) * std::cos(x * z - skew * gz);
  };
  std::size_t panels =
      32 + static_cast<std::size_t>(std::ceil(std::abs(x) * zmax / std::numbers::pi));
  double v = detail::panel_quadrature(f, 0.0, zmax, panels, s).value / std::numbers::pi;
  if (v < 0.0 && v > -1e-9) v = 0.0;
  return v;
}

struct FwhmOptions {
  std::size_t samples = 401;
  std::optional<double> support_left;  // one-sided densities: left edge of the support
  double tol = 1e-10;                  // crossing accuracy relative to the bracket
};

struct FwhmResult {
  double width = 0.0;
  double peak_location = 0.0;
  double peak_value = 0.0;
  double left = 0.0, right = 0.0;
};

inline FwhmResult fwhm_detail(const std::function<double(double)>& f, double a, double b,
                              const FwhmOptions& opt = {}) {
  if (!(b > a) || opt.samples < 5) throw InputError("fwhm: bad bracket or sample count");
  const std::size_t m = opt.samples;
  std::vector<double> xs(m), ys(m);
  for (std::size_t i = 0; i < m; ++i) {
    xs[i] = a + (b - a) * double(i) / double(m - 1);
    ys[i] = f(xs[i]);
  }
  std::size_t top = std::max_element(ys.begin(), ys.end()) - ys.begin();
  const double slack = 1e-9 * ys[top];
  for (std::size_t i = 1; i <= top; ++i)
    if (ys[i] < ys[i - 1] - slack) throw NumericalError("fwhm: samples are not unimodal");
  for (std::size_t i = top + 1; i < m; ++i)
    if (ys[i] > ys[i - 1] + slack) throw NumericalError("fwhm: samples are not unimodal");

  // golden-section refinement of the peak between the neighbouring samples
  double lo = xs[top == 0 ? 0 : top - 1], hi = xs[std::min(top + 1, m - 1)];
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
  double fc = f(c), fd = f(d);
  while (hi - lo > opt.tol * (b - a)) {
    if (fc > fd) {
      hi = d, d = c, fd = fc;
      c = hi - gr * (hi - lo), fc = f(c);
    } else {
      lo = c, c = d, fc = fd;
      d = lo + gr * (hi - lo), fd = f(d);
    }
  }
  FwhmResult r;
  r.peak_location = 0.5 * (lo + hi);
  r.peak_value = std::max({f(r.peak_location), ys[top]});
  const double half = 0.5 * r.peak_value;

  auto bisect = [&](double inside, double outside) {
    while (std::abs(outside - inside) > opt.tol * (b - a)) {
      double mid = 0.5 * (inside + outside);
      (f(mid) >= half ? inside : outside) = mid;
    }
    return 0.5 * (inside + outside);
  };
  std::optional<std::size_t> right_out, left_out;
  for (std::size_t i = top; i < m; ++i)
    if (ys[i] < half) {
      right_out = i;
      break;
    }
  if (!right_out) throw NumericalError("fwhm: no half-maximum crossing right of the peak");
  r.right = bisect(std::max(xs[*right_out - 1], r.peak_location), xs[*right_out]);
  if (opt.support_left) {
    r.left = *opt.support_left;
  } else {
    for (std::size_t i = top + 1; i-- > 0;)
      if (ys[i] < half) {
        left_out = i;
        break;
      }
    if (!left_out) throw NumericalError("fwhm: no half-maximum crossing left of the peak");
    r.left = bisect(std::min(xs[*left_out + 1], r.peak_location), xs[*left_out]);
  }
  r.width = std::abs(r.right - r.left);
  return r;
}

inline double fwhm(const std::function<double(double)>& f, double a, double b,
                   const FwhmOptions& opt = {}) {
  return fwhm_detail(f, a, b, opt).width;
}

// Natural spatial scale of u(t): t^{1/(2a)} undirected, t^{1/a} directed.
inline double lattice_scale(double alpha, Orientation o, double t) {
  return std::pow(t, o == Orientation::Undirected ? 1.0 / (2.0 * alpha) : 1.0 / alpha);
}

// FWHM of z -> u(t)_z; directed profiles are measured from the support edge z = 0.
inline double lattice_fwhm(double alpha, Orientation o, double t, const QuadratureSettings& s = {}) {
  double scale = lattice_scale(alpha, o, t);
  auto u = [&](double z) { return lattice_solution(alpha, o, t, z, s); };
  FwhmOptions fo;
  if (o == Orientation::Undirected) {
    double b = 6.0 * scale + 6.0;
    return fwhm(u, -b, b, fo);
  }
  fo.support_left = 0.0;
  double b = 6.0 * scale + 6.0;
  return fwhm(u, 0.0, b, fo);
}

struct ExponentFit {
  double exponent = 0.0;
  double r2 = 0.0;
  std::vector<double> times;
  std::vector<double> fwhm_squared;
};

inline ExponentFit superdiffusion_exponent(double alpha, Orientation o,
                                           const std::vector<double>& t_grid,
                                           const QuadratureSettings& s = {}) {
  if (t_grid.size() < 5) throw InputError("exponent fit needs at least 5 times");
  if (*std::max_element(t_grid.begin(), t_grid.end()) < 1e3)
    throw InputError("exponent fit needs a largest time of at least 1e3");
  ExponentFit fit;
  std::vector<double> lx, ly;
  for (double t : t_grid) {
    double w = lattice_fwhm(alpha, o, t, s);
    fit.times.push_back(t);
    fit.fwhm_squared.push_back(w * w);
    lx.push_back(std::log(t));
    ly.push_back(std::log(w * w));
  }
  auto line = least_squares_line(lx, ly);
  fit.exponent = line.slope;
  fit.r2 = line.r2;
  if (fit.r2 < 0.99) {
    std::ostringstream os;
    os << "superdiffusion fit r^2 = " << fit.r2 << " below 0.99";
    throw NumericalError(os.str());
  }
  return fit;
}

// The stable law that the rescaled lattice solution approaches.
inline StableParams limit_law(double alpha, Orientation o) {
  if (o == Orientation::Undirected) return {2.0 * alpha, 0.0, 1.0, 0.0};
  return {alpha, 1.0, std::pow(std::cos(alpha * std::numbers::pi / 2.0), 1.0 / alpha), 0.0};
}

struct StableLimitReport {
  std::vector<double> times;
  std::vector<double> sup_errors;
  bool decreasing_last_three = false;
  double max_negative_side_density = 0.0;  // directed: max rescaled value over xi < 0
};

inline StableLimitReport verify_stable_limit(double alpha, Orientation o,
                                             const std::vector<double>& t_list,
                                             const std::vector<double>& xi_grid,
                                             const QuadratureSettings& s = {}) {
  if (!(alpha > 0 && alpha < 1)) throw InputError("stable limit check needs alpha in (0, 1)");
  auto law = limit_law(alpha, o);
  std::vector<double> ref;
  for (double xi : xi_grid) ref.push_back(stable_density(law, xi, s));
  StableLimitReport rep;
  for (double t : t_list) {
    double sc = lattice_scale(alpha, o, t);
    double err = 0.0;
    for (std::size_t i = 0; i < xi_grid.size(); ++i) {
      double v = sc * lattice_solution(alpha, o, t, sc * xi_grid[i], s);
      err = std::max(err, std::abs(v - ref[i]));
      if (o == Orientation::Directed && xi_grid[i] < 0)
        rep.max_negative_side_density = std::max(rep.max_negative_side_density, v);
    }
    rep.times.push_back(t);
    rep.sup_errors.push_back(err);
  }
  const auto& e = rep.sup_errors;
  rep.decreasing_last_three = e.size() >= 3 && e[e.size() - 1] < e[e.size() - 2] &&
                              e[e.size() - 2] < e[e.size() - 3];
  return rep;
}

}  // namespace fracgraph
