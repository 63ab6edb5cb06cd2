#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "phi3lab/fluctuation.hpp"

namespace phi3lab {

// Axis-aligned partition of the torus into side^2 equal boxes of width
// within [delta, 2 delta); points are the box centers.
struct CoarseGrid {
  double q = 0.0;
  double eps = 0.0;
  double delta = 0.0;    // requested separation q^{-1/2}(log q)^{1/2-eps}
  int side = 0;          // boxes per side
  double spacing = 0.0;  // 2 pi / side
  std::vector<Point> points;

  std::size_t count() const { return points.size(); }
};

// Requires q >= e and eps in (0, 1/2).  Boxes per side start from
// round(2 pi / delta) and shrink by one when rounding up would push the
// spacing below delta.
CoarseGrid build_grid(double q, double eps);

struct MaxStatistics {
  double mean = 0.0;
  double stderr_mean = 0.0;
  double sample_sd = 0.0;
  int n_samples = 0;
  std::size_t count = 0;
};

// Joint Gram of the field over the grid centers, built from the
// displacement-class covariance table.
CovarianceGram grid_gram(const FluctuationKernel& k, const CoarseGrid& grid);

// Monte Carlo estimate of E[max over points].  The gram overload allows
// synthetic injections (e.g. i.i.d. diagonals) for oracle tests.
MaxStatistics mc_max(const CovarianceGram& gram, int n_samples,
                     std::uint64_t seed);
MaxStatistics mc_max(const FluctuationKernel& k, const CoarseGrid& grid,
                     int n_samples, std::uint64_t seed);

// (1/sqrt(2 pi)) * min_{j != k} d(x_j, x_k) * sqrt(log count), with the
// canonical metric d(x,y)^2 = E|Phi(x) - Phi(y)|^2 from the Gram.
double sudakov_lower(const CovarianceGram& gram);
double sudakov_lower(const FluctuationKernel& k, const CoarseGrid& grid);

// sigma_max * (sqrt(2 log count) + 1/sqrt(2 pi)): the union bound constant
// sqrt(2) plus the exact one-point correction that keeps the bound valid
// down to a single center.
double union_upper(const CovarianceGram& gram);
double union_upper(const FluctuationKernel& k, const CoarseGrid& grid);

// MC estimate of E[ sup_{|y-z| <= delta} |Phi(y) - Phi(z)| ] over a 9x9
// patch of spacing delta/4 (so the refined sub-grid resolves delta/4).
double continuity_modulus(const FluctuationKernel& k, double delta,
                          int n_samples, std::uint64_t seed);

struct GrowthFit {
  double c_hat = 0.0;
  std::vector<double> xs;         // abscissas of the regression
  std::vector<double> means;      // mc_max means per list entry
  std::vector<double> residuals;  // relative to the fitted line
};

// Least squares through the origin; the workhorse behind growth_fit and the
// synthetic-oracle checks.
GrowthFit fit_through_origin(const std::vector<double>& xs,
                             const std::vector<double>& ys);

// Regresses mc_max means over build_grid(q, eps) against q sqrt(log q).
GrowthFit growth_fit(
    const std::function<FluctuationKernel(double)>& kernel_factory,
    const std::vector<double>& q_list, double eps, int n_samples,
    std::uint64_t seed);

}  // namespace phi3lab
