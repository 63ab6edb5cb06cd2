#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace phi3lab {

// Hermitian-symmetric Fourier coefficients on the mode disk |n| <= N of Z^2.
// Stored densely on the (2N+1)^2 square with zeros outside the disk.
struct SpectralField {
  enum class Kind { white, free_field, deterministic };

  int cutoff_N = 0;
  double time_t = 0.0;
  Kind kind = Kind::deterministic;
  std::vector<std::complex<double>> coeffs;

  static SpectralField zeros(int N);

  int side() const { return 2 * cutoff_N + 1; }
  bool inside(int nx, int ny) const {
    return nx * nx + ny * ny <= cutoff_N * cutoff_N;
  }
  std::complex<double> coeff(int nx, int ny) const {
    return coeffs[static_cast<std::size_t>(nx + cutoff_N) * side() +
                  static_cast<std::size_t>(ny + cutoff_N)];
  }
  std::complex<double>& at(int nx, int ny) {
    return coeffs[static_cast<std::size_t>(nx + cutoff_N) * side() +
                  static_cast<std::size_t>(ny + cutoff_N)];
  }
  // Throws when coeff(-n) != conj(coeff(n)) beyond tol or coeff(0) is not real.
  void check_hermitian(double tol = 1e-12) const;
};

// Real field values on the uniform M x M torus grid (points 2*pi*j/M).
struct GridField {
  int resolution_M = 0;
  int dealias_degree = 0;  // highest Fourier degree the values represent
  std::vector<double> values;

  double& at(int i, int j) {
    return values[static_cast<std::size_t>(i) * resolution_M + j];
  }
  double at(int i, int j) const {
    return values[static_cast<std::size_t>(i) * resolution_M + j];
  }
  // Physical torus integral (2*pi)^2 * mean of the samples; exact for
  // trigonometric polynomials of degree < M.
  double integral() const;
  double integral_power(int k) const;  // integral of values^k
};

// Free field at time t: coeff(n) = B_n(t)/<n> with <n> = sqrt(1+|n|^2),
// E|B_n|^2 = t (independent real/imaginary parts of variance t/2), B_0 real
// with variance t, B_{-n} = conj(B_n).  Deterministic in (N, t, seed).
SpectralField sample_free_field(int N, double t, std::uint64_t seed);

// Martingale step from t = 1/2 to t = 1: adds an independent increment of
// variance 1/2 per mode.  zero_increment is a test hook making the step the
// identity.
SpectralField extend_in_time(const SpectralField& f, std::uint64_t seed,
                             bool zero_increment = false);

// sigma_N(t) = sum_{|n|<=N} t/<n>^2, the Wick-ordering counterterm.
double tadpole(int N, double t);

// Renormalized powers on a dealiased grid: k=2 gives Y^2 - sigma_N, k=3
// gives Y^3 - 3 sigma_N Y.  M = 0 picks the smallest power of two with
// M >= k*N + 1; an explicit undersized M raises AliasRisk.
GridField wick_power(const SpectralField& f, int k, int M = 0);

// Closed form E[(int :Y^2: dx)^2] = 2 t^2 (2 pi)^4 sum_{|n|<=N} <n>^{-4}
// under the physical torus normalization (integrals carry (2 pi)^2).
double wick2_integral_variance(int N, double t);

// Evaluate the coefficients on an M x M grid (M a power of two, M >= 2N+1).
GridField spectral_to_grid(const SpectralField& f, int M);

}  // namespace phi3lab
