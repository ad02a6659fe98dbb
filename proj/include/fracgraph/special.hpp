#pragma once

#include <cmath>
#include <numbers>
#include <vector>

namespace fracgraph::special {

// binom(a, k) for k = 0..kmax via the product recurrence c_k = c_{k-1} (a-k+1)/k.
inline std::vector<double> binomial_sequence(double a, std::size_t kmax) {
  std::vector<double> c(kmax + 1);
  c[0] = 1.0;
  for (std::size_t k = 1; k <= kmax; ++k) c[k] = c[k - 1] * (a - double(k) + 1.0) / double(k);
  return c;
}

inline double binomial(double a, std::size_t k) {
  double c = 1.0;
  for (std::size_t j = 1; j <= k; ++j) c *= (a - double(j) + 1.0) / double(j);
  return c;
}

// log|Gamma(x)| and sign, using reflection for x < 0.5.
inline double log_abs_gamma(double x, int* sign = nullptr) {
  if (x < 0.5) {
    double s = std::sin(std::numbers::pi * x);
    double r = std::log(std::numbers::pi / std::abs(s)) - log_abs_gamma(1.0 - x);
    if (sign) *sign = (s > 0 ? 1 : -1);  // Gamma(1-x) > 0 here
    return r;
  }
  if (sign) *sign = 1;
  return std::lgamma(x);
}

// Gamma(d - a) / (Gamma(d + 1) Gamma(-a)) for integer d >= 0 and non-integer a;
// equals (-1)^d binom(a, d).
inline double gamma_ratio(std::size_t d, double a) {
  int s1 = 1, s2 = 1;
  double l1 = log_abs_gamma(double(d) - a, &s1);
  double l2 = log_abs_gamma(-a, &s2);
  return s1 * s2 * std::exp(l1 - l2 - std::lgamma(double(d) + 1.0));
}

}  // namespace fracgraph::special
