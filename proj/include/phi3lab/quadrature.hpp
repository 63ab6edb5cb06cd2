#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "phi3lab/errors.hpp"

namespace phi3lab {

// Composite Simpson on a uniform grid.  Odd point counts use the pure rule;
// even counts close the last three intervals with the 3/8 rule so no
// interval is dropped.
inline double simpson(const std::vector<double>& f, double h) {
  std::size_t n = f.size();
  if (n < 2) return 0.0;
  if (n == 2) return 0.5 * h * (f[0] + f[1]);
  auto simpson_odd = [&](std::size_t lo, std::size_t hi) {
    double s = f[lo] + f[hi];
    for (std::size_t i = lo + 1; i < hi; i += 2) s += 4.0 * f[i];
    for (std::size_t i = lo + 2; i < hi; i += 2) s += 2.0 * f[i];
    return s * h / 3.0;
  };
  if (n % 2 == 1) return simpson_odd(0, n - 1);
  if (n == 4) {
    return 3.0 * h / 8.0 * (f[0] + 3.0 * f[1] + 3.0 * f[2] + f[3]);
  }
  double head = simpson_odd(0, n - 4);
  double tail = 3.0 * h / 8.0 * (f[n - 4] + 3.0 * f[n - 3] + 3.0 * f[n - 2] + f[n - 1]);
  return head + tail;
}

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;  // |I_h - I_2h| / 15, the h^4 Richardson bound
};

// Simpson value plus a Richardson error estimate from the half-resolution
// subsample.  When the point count does not admit an exact half grid the
// comparison drops the final point or two; that only perturbs the estimate,
// never the returned value.
inline QuadratureResult simpson_richardson(const std::vector<double>& f, double h) {
  QuadratureResult out;
  out.value = simpson(f, h);
  std::size_t n = f.size();
  if (n < 5) {
    out.error_estimate = std::abs(out.value);
    return out;
  }
  std::size_t m = n;
  while ((m - 1) % 4 != 0) --m;
  std::vector<double> coarse;
  coarse.reserve((m + 1) / 2);
  for (std::size_t i = 0; i < m; i += 2) coarse.push_back(f[i]);
  std::vector<double> fine(f.begin(), f.begin() + m);
  double ih = simpson(fine, h);
  double i2h = simpson(coarse, 2.0 * h);
  out.error_estimate = std::abs(ih - i2h) / 15.0;
  return out;
}

// 8-point Gauss-Legendre nodes and weights on [-1, 1].
inline const double* gl8_nodes() {
  static const double x[8] = {
      -0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
      -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
      0.7966664774136267,  0.9602898564975363};
  return x;
}
inline const double* gl8_weights() {
  static const double w[8] = {
      0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
      0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
      0.2223810344533745, 0.1012285362903763};
  return w;
}

inline double integrate_gl8(const std::function<double(double)>& f, double a,
                            double b) {
  const double* x = gl8_nodes();
  const double* w = gl8_weights();
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < 8; ++i) s += w[i] * f(mid + half * x[i]);
  return s * half;
}

// J0 via the classic rational fits (Hart); absolute error below ~1e-7.
// Used in the hot loops (transform tables, image sums) where the libm
// special function is too slow; calls that feed a tolerance tighter than
// 1e-7 use std::cyl_bessel_j instead.
inline double fast_j0(double x) {
  double ax = std::abs(x);
  if (ax < 8.0) {
    double y = x * x;
    double p1 = -2957821389.0 +
                y * (7062834065.0 +
                     y * (-512359803.6 +
                          y * (10879881.29 + y * (-86327.92757 + y * 228.4622733))));
    double q1 = 40076544269.0 +
                y * (745249964.8 +
                     y * (7189466.438 + y * (47447.26470 + y * (226.1030244 + y))));
    return p1 / q1;
  }
  double z = 8.0 / ax;
  double y = z * z;
  double xx = ax - 0.78539816339744830962;
  double p0 = 1.0 + y * (-0.1098628627e-2 +
                         y * (0.2734510407e-4 +
                              y * (-0.2073370639e-5 + y * 0.2093887211e-6)));
  double q0 = -0.1562499995e-1 +
              y * (0.1430488765e-3 +
                   y * (-0.6911147651e-5 +
                        y * (0.7621095161e-6 + y * (-0.934935152e-7))));
  return std::sqrt(0.636619772367581343 / ax) *
         (std::cos(xx) * p0 - z * std::sin(xx) * q0);
}

// Radial integral of g(s) * J0(b s) over [0, S] with panels short enough to
// resolve both the smooth scale of g and the Bessel oscillation (at least
// eight panels per period 2*pi/b).  Throws when the requested resolution
// would need an absurd panel count, which indicates a misuse upstream.
inline double integrate_radial_bessel(const std::function<double(double)>& g,
                                      double S, double b, double smooth_panel) {
  if (S <= 0.0) return 0.0;
  double h = smooth_panel;
  if (b > 0.0) {
    double osc = 2.0 * 3.14159265358979323846 / b / 8.0;
    if (osc < h) h = osc;
  }
  std::size_t panels = static_cast<std::size_t>(std::ceil(S / h));
  if (panels > 2000000)
    throw OscillationUnderresolved(
        "radial Bessel quadrature would need more than 2e6 panels");
  double sum = 0.0;
  const double* x = gl8_nodes();
  const double* w = gl8_weights();
  double width = S / static_cast<double>(panels);
  for (std::size_t p = 0; p < panels; ++p) {
    double a = width * static_cast<double>(p);
    double mid = a + 0.5 * width, half = 0.5 * width;
    double s = 0.0;
    for (int i = 0; i < 8; ++i) {
      double t = mid + half * x[i];
      s += w[i] * g(t) * fast_j0(b * t);
    }
    sum += s * half;
  }
  return sum;
}

}  // namespace phi3lab
