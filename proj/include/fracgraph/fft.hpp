#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace fracgraph::fft {

using cd = std::complex<double>;

inline bool is_pow2(std::size_t n) { return n && !(n & (n - 1)); }

// In-place iterative radix-2; sign = -1 forward, +1 inverse (unnormalized).
inline void radix2(std::vector<cd>& a, int sign) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    for (std::size_t k = 0; k < half; ++k) {
      cd w = std::polar(1.0, sign * 2.0 * std::numbers::pi * double(k) / double(len));
      for (std::size_t i = k; i < n; i += len) {
        cd u = a[i], v = a[i + half] * w;
        a[i] = u + v;
        a[i + half] = u - v;
      }
    }
  }
}

// y_k = sum_j x_j exp(sign 2 pi i jk/n), any n (Bluestein when n is not a power of two).
inline std::vector<cd> dft(const std::vector<cd>& x, int sign = -1) {
  const std::size_t n = x.size();
  if (n <= 1) return x;
  if (is_pow2(n)) {
    auto a = x;
    radix2(a, sign);
    return a;
  }
  std::size_t m = 1;
  while (m < 2 * n - 1) m <<= 1;
  // chirp w_j = exp(sign i pi j^2 / n); j^2 reduced mod 2n to keep the angle small
  std::vector<cd> w(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t j2 = (j * j) % (2 * n);
    w[j] = std::polar(1.0, sign * std::numbers::pi * double(j2) / double(n));
  }
  std::vector<cd> a(m, 0.0), b(m, 0.0);
  for (std::size_t j = 0; j < n; ++j) a[j] = x[j] * w[j];
  b[0] = std::conj(w[0]);
  for (std::size_t j = 1; j < n; ++j) b[j] = b[m - j] = std::conj(w[j]);
  radix2(a, -1);
  radix2(b, -1);
  for (std::size_t j = 0; j < m; ++j) a[j] *= b[j];
  radix2(a, +1);
  std::vector<cd> y(n);
  for (std::size_t k = 0; k < n; ++k) y[k] = a[k] * w[k] / double(m);
  return y;
}

}  // namespace fracgraph::fft
