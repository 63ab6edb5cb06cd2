#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "phi3lab/errors.hpp"

namespace phi3lab {

inline bool is_pow2(std::size_t n) { return n && (n & (n - 1)) == 0; }

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Iterative radix-2 FFT.  Forward uses exp(-i), inverse uses exp(+i) and
// divides by n, so fft(ifft(x)) == x up to roundoff.
inline void fft_inplace(std::vector<std::complex<double>>& a, bool inverse) {
  std::size_t n = a.size();
  if (!is_pow2(n)) throw AliasRisk("FFT length must be a power of two");
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  const double pi = 3.14159265358979323846;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    double ang = 2.0 * pi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
    std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        std::complex<double> u = a[i + k];
        std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
  if (inverse) {
    double inv = 1.0 / static_cast<double>(n);
    for (auto& z : a) z *= inv;
  }
}

// 2D transform of a row-major M x M array: FFT over every row, then every
// column.
inline void fft2_inplace(std::vector<std::complex<double>>& a, std::size_t M,
                         bool inverse) {
  if (a.size() != M * M) throw AliasRisk("2D FFT needs an M x M buffer");
  std::vector<std::complex<double>> line(M);
  for (std::size_t r = 0; r < M; ++r) {
    for (std::size_t c = 0; c < M; ++c) line[c] = a[r * M + c];
    fft_inplace(line, inverse);
    for (std::size_t c = 0; c < M; ++c) a[r * M + c] = line[c];
  }
  for (std::size_t c = 0; c < M; ++c) {
    for (std::size_t r = 0; r < M; ++r) line[r] = a[r * M + c];
    fft_inplace(line, inverse);
    for (std::size_t r = 0; r < M; ++r) a[r * M + c] = line[r];
  }
}

}  // namespace phi3lab
