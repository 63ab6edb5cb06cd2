#include "phi3lab/extremes.hpp"

#include <algorithm>
#include <cmath>

#include "phi3lab/errors.hpp"
#include "phi3lab/threads.hpp"

namespace phi3lab {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kE = 2.7182818284590452353602874713527;

void require_gram_shape(const CovarianceGram& gram) {
  const std::size_t n = gram.count();
  if (n == 0) throw DegenerateGrid("empty point set");
  if (gram.matrix.size() != n * n)
    throw Error("Gram matrix does not match its point list");
}

}  // namespace

CoarseGrid build_grid(double q, double eps) {
  if (!(q >= kE)) throw Error("coarse grid needs q >= e");
  if (!(eps > 0.0) || !(eps < 0.5))
    throw Error("coarse grid needs eps in (0, 1/2)");
  CoarseGrid g;
  g.q = q;
  g.eps = eps;
  g.delta = std::pow(q, -0.5) * std::pow(std::log(q), 0.5 - eps);
  int side = static_cast<int>(std::llround(kTwoPi / g.delta));
  // rounding up may push the box width below delta; step back if so
  if (kTwoPi / side < g.delta * (1.0 - 1e-12)) side -= 1;
  if (side < 2) throw DegenerateGrid("fewer than 4 grid points");
  g.side = side;
  g.spacing = kTwoPi / side;
  g.points.reserve(static_cast<std::size_t>(side) * side);
  for (int a = 0; a < side; ++a)
    for (int b = 0; b < side; ++b)
      g.points.push_back({(a + 0.5) * g.spacing, (b + 0.5) * g.spacing});
  return g;
}

CovarianceGram grid_gram(const FluctuationKernel& k, const CoarseGrid& grid) {
  const int P = grid.side;
  if (P < 1) throw DegenerateGrid("grid has no boxes");
  if (grid.points.size() > 10000)
    throw Error("grid count exceeds the factorization budget 1e4");
  const std::vector<double> table = covariance_table_mod(k, P);
  CovarianceGram g;
  g.points = grid.points;
  const std::size_t n = grid.points.size();
  g.matrix.resize(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    const int ai = static_cast<int>(i) / P, bi = static_cast<int>(i) % P;
    for (std::size_t j = 0; j < n; ++j) {
      const int aj = static_cast<int>(j) / P, bj = static_cast<int>(j) % P;
      const int da = ((ai - aj) % P + P) % P;
      const int db = ((bi - bj) % P + P) % P;
      g.matrix[i * n + j] = table[static_cast<std::size_t>(da) * P + db];
    }
  }
  return g;
}

MaxStatistics mc_max(const CovarianceGram& gram, int n_samples,
                     std::uint64_t seed) {
  if (gram.count() == 0) throw DegenerateGrid("empty point set");
  if (gram.count() > 10000)
    throw Error("grid count exceeds the factorization budget 1e4");
  if (n_samples < 100) throw Error("need at least 100 samples");
  require_gram_shape(gram);
  const GramSampler sampler(gram);
  std::vector<double> maxima(static_cast<std::size_t>(n_samples));
  parallel_for(maxima.size(), [&](std::size_t i) {
    const std::vector<double> x = sampler.sample(seed + i);
    double m = x[0];
    for (double v : x) m = std::max(m, v);
    maxima[i] = m;
  });
  MaxStatistics s;
  s.n_samples = n_samples;
  s.count = gram.count();
  double acc = 0.0;
  for (double m : maxima) acc += m;
  s.mean = acc / n_samples;
  double var = 0.0;
  for (double m : maxima) var += (m - s.mean) * (m - s.mean);
  var /= (n_samples - 1);
  s.sample_sd = std::sqrt(var);
  s.stderr_mean = s.sample_sd / std::sqrt(static_cast<double>(n_samples));
  return s;
}

MaxStatistics mc_max(const FluctuationKernel& k, const CoarseGrid& grid,
                     int n_samples, std::uint64_t seed) {
  return mc_max(grid_gram(k, grid), n_samples, seed);
}

double sudakov_lower(const CovarianceGram& gram) {
  require_gram_shape(gram);
  const std::size_t n = gram.count();
  if (n < 2) throw DegenerateGrid("Sudakov bound needs two points");
  double dmin_sq = -1.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d2 = gram.at(i, i) + gram.at(j, j) - 2.0 * gram.at(i, j);
      if (dmin_sq < 0.0 || d2 < dmin_sq) dmin_sq = d2;
    }
  const double dmin = std::sqrt(std::max(dmin_sq, 0.0));
  return dmin * std::sqrt(std::log(static_cast<double>(n))) /
         std::sqrt(kTwoPi);
}

double sudakov_lower(const FluctuationKernel& k, const CoarseGrid& grid) {
  return sudakov_lower(grid_gram(k, grid));
}

double union_upper(const CovarianceGram& gram) {
  require_gram_shape(gram);
  const std::size_t n = gram.count();
  if (n < 2) throw DegenerateGrid("union bound needs two points");
  double vmax = 0.0;
  for (std::size_t i = 0; i < n; ++i) vmax = std::max(vmax, gram.at(i, i));
  const double sigma = std::sqrt(vmax);
  return sigma * (std::sqrt(2.0 * std::log(static_cast<double>(n))) +
                  1.0 / std::sqrt(kTwoPi));
}

double union_upper(const FluctuationKernel& k, const CoarseGrid& grid) {
  return union_upper(grid_gram(k, grid));
}

double continuity_modulus(const FluctuationKernel& k, double delta,
                          int n_samples, std::uint64_t seed) {
  if (!(delta > 0.0)) throw Error("modulus scale must be positive");
  if (n_samples < 100) throw Error("need at least 100 samples");
  const int half = 4;  // 9x9 patch at spacing delta/4
  const double step = delta / 4.0;
  const double cx = kTwoPi / 2.0, cy = kTwoPi / 2.0;
  std::vector<Point> pts;
  for (int i = -half; i <= half; ++i)
    for (int j = -half; j <= half; ++j)
      pts.push_back({cx + i * step, cy + j * step});
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t a = 0; a < pts.size(); ++a)
    for (std::size_t b = a + 1; b < pts.size(); ++b) {
      const double dx = pts[a].x - pts[b].x;
      const double dy = pts[a].y - pts[b].y;
      if (std::sqrt(dx * dx + dy * dy) <= delta * (1.0 + 1e-12))
        pairs.emplace_back(a, b);
    }
  if (pairs.empty()) throw Error("no point pairs within the modulus scale");
  const GramSampler sampler(gram_points(k, pts));
  std::vector<double> sup(static_cast<std::size_t>(n_samples));
  parallel_for(sup.size(), [&](std::size_t i) {
    const std::vector<double> x = sampler.sample(seed + i);
    double m = 0.0;
    for (const auto& pr : pairs)
      m = std::max(m, std::abs(x[pr.first] - x[pr.second]));
    sup[i] = m;
  });
  double acc = 0.0;
  for (double v : sup) acc += v;
  return acc / n_samples;
}

GrowthFit fit_through_origin(const std::vector<double>& xs,
                             const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.empty())
    throw ConfigInvalid("regression needs matching nonempty inputs");
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += xs[i] * ys[i];
    sxx += xs[i] * xs[i];
  }
  if (!(sxx > 0.0)) throw ConfigInvalid("degenerate regression abscissas");
  GrowthFit f;
  f.c_hat = sxy / sxx;
  f.xs = xs;
  f.means = ys;
  f.residuals.resize(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    f.residuals[i] = (ys[i] - f.c_hat * xs[i]) / (f.c_hat * xs[i]);
  return f;
}

GrowthFit growth_fit(
    const std::function<FluctuationKernel(double)>& kernel_factory,
    const std::vector<double>& q_list, double eps, int n_samples,
    std::uint64_t seed) {
  if (q_list.size() < 3)
    throw ConfigInvalid("growth fit needs at least three masses");
  for (std::size_t i = 0; i + 1 < q_list.size(); ++i)
    if (!(q_list[i] < q_list[i + 1]))
      throw ConfigInvalid("growth fit masses must increase");
  std::vector<double> xs, means;
  for (std::size_t i = 0; i < q_list.size(); ++i) {
    const double q = q_list[i];
    const CoarseGrid grid = build_grid(q, eps);
    const FluctuationKernel k = kernel_factory(q);
    const MaxStatistics s =
        mc_max(k, grid, n_samples, seed + 1000000 * (i + 1));
    xs.push_back(q * std::sqrt(std::log(q)));
    means.push_back(s.mean);
  }
  return fit_through_origin(xs, means);
}

}  // namespace phi3lab
