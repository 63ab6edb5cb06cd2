#include "phi3lab/fluctuation.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <utility>

#include "phi3lab/errors.hpp"
#include "phi3lab/quadrature.hpp"
#include "phi3lab/rng.hpp"
#include "phi3lab/soliton.hpp"
#include "phi3lab/threads.hpp"

namespace phi3lab {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr std::uint64_t kRolePhi = 3;

bool representative(int nx, int ny) { return ny > 0 || (ny == 0 && nx > 0); }

double torus_delta(double a) {
  double d = std::fmod(a, kTwoPi);
  if (d < 0.0) d += kTwoPi;
  if (d > kTwoPi / 2.0) d -= kTwoPi;
  return d;
}

void require_distinct(const std::vector<Point>& pts) {
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double dx = torus_delta(pts[i].x - pts[j].x);
      const double dy = torus_delta(pts[i].y - pts[j].y);
      if (std::abs(dx) < 1e-14 && std::abs(dy) < 1e-14)
        throw Error("sample points must be pairwise distinct");
    }
}

// single Poisson image F(r) = 2 pi int s f(s) J0(r s) ds, f = w^2 / 2
double poisson_term(const FluctuationKernel& k, double r) {
  const auto g = [&k](double s) {
    const double w = k.w_cont(s);
    return s * 0.5 * w * w;
  };
  try {
    return kTwoPi * integrate_radial_bessel(g, k.s_max, r, k.s_max / 256.0);
  } catch (const Error& e) {
    throw QuadratureUnstable(e.what());
  }
}

}  // namespace

double FluctuationKernel::w_cont(double s) const {
  s = std::abs(s);
  if (s >= s_max) return 0.0;
  const double u = s / s_step;
  std::ptrdiff_t i0 = static_cast<std::ptrdiff_t>(u) - 1;
  const std::ptrdiff_t last = static_cast<std::ptrdiff_t>(w_radial.size()) - 4;
  i0 = std::max<std::ptrdiff_t>(0, std::min(i0, last));
  const double t = u - static_cast<double>(i0);
  // 4-point Lagrange weights at offset t in [1, 2] for interior points
  const double w0 = -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0;
  const double w1 = t * (t - 2.0) * (t - 3.0) / 2.0;
  const double w2 = -t * (t - 1.0) * (t - 3.0) / 2.0;
  const double w3 = t * (t - 1.0) * (t - 2.0) / 6.0;
  return w0 * w_radial[i0] + w1 * w_radial[i0 + 1] + w2 * w_radial[i0 + 2] +
         w3 * w_radial[i0 + 3];
}

FluctuationKernel build_kernel(double sigma, double q, double eps,
                               const GroundState& gs) {
  if (sigma == 0.0) throw ZeroCoupling("kernel needs a nonzero coupling");
  if (!(q > 0.0)) throw Error("kernel mass must be positive");
  if (eps < 0.0) throw Error("schedule margin must be nonnegative");
  if (!gs.transform_support_certified())
    throw HankelUnderflow("transform support could not be certified");

  FluctuationKernel k;
  k.sigma = sigma;
  k.q = q;
  k.eps = eps;
  k.cutoff_N = cutoff_schedule(q, eps);
  const double rq = std::sqrt(q);
  const double support = rq * gs.transform_support(sigma);
  const int r_support = static_cast<int>(std::ceil(support));
  const int R = std::max(1, std::min(k.cutoff_N, r_support));
  k.truncation_radius = R;

  const auto w_of = [&](double s) {
    return s * s / std::sqrt(1.0 + s * s) * gs.unit_transform(s / rq, sigma);
  };

  k.w_by_nsq.resize(static_cast<std::size_t>(R) * R + 1);
  for (std::size_t s2 = 0; s2 < k.w_by_nsq.size(); ++s2)
    k.w_by_nsq[s2] = w_of(std::sqrt(static_cast<double>(s2)));
  k.w_by_nsq[0] = 0.0;

  double kept = 0.0;
  for (int nx = -R; nx <= R; ++nx)
    for (int ny = -R; ny <= R; ++ny) {
      const int s2 = nx * nx + ny * ny;
      if (s2 > R * R || s2 == 0) continue;
      const double w = k.w_by_nsq[s2];
      kept += w * w;
    }
  k.sum_w_squared = kept;

  // measure what the radial truncation discards
  double discarded = 0.0;
  const int r_ext = std::max(R + 2, static_cast<int>(std::ceil(1.25 * support)));
  for (int nx = -r_ext; nx <= r_ext; ++nx)
    for (int ny = -r_ext; ny <= r_ext; ++ny) {
      const int s2 = nx * nx + ny * ny;
      if (s2 <= R * R || s2 > r_ext * r_ext) continue;
      const double w = w_of(std::sqrt(static_cast<double>(s2)));
      discarded += w * w;
    }
  k.tail_ratio = kept > 0.0 ? discarded / kept : 0.0;

  k.s_max = std::max(support, 1.0) * 1.02;
  const std::size_t table_n = 4096;
  k.s_step = k.s_max / static_cast<double>(table_n - 1);
  k.w_radial.resize(table_n);
  for (std::size_t i = 0; i < table_n; ++i)
    k.w_radial[i] = w_of(static_cast<double>(i) * k.s_step);
  return k;
}

double variance(const FluctuationKernel& k) { return 0.5 * k.sum_w_squared; }

double covariance_exact(const FluctuationKernel& k, double dx, double dy) {
  const int R = k.truncation_radius;
  double c = 0.0, odd = 0.0;
  for (int nx = -R; nx <= R; ++nx)
    for (int ny = -R; ny <= R; ++ny) {
      const int s2 = nx * nx + ny * ny;
      if (s2 > R * R || s2 == 0) continue;
      const double w = k.w_by_nsq[s2];
      const double phase = nx * dx + ny * dy;
      c += 0.5 * w * w * std::cos(phase);
      odd += 0.5 * w * w * std::sin(phase);
    }
  if (std::abs(odd) > 1e-10 * std::max(1.0, 0.5 * k.sum_w_squared))
    throw Error("odd part of the covariance sum failed to cancel");
  return c;
}

double covariance_poisson(const FluctuationKernel& k, double dx, double dy,
                          int images_K) {
  if (images_K < 0) throw Error("image count must be nonnegative");
  double c = 0.0;
  for (int kx = -images_K; kx <= images_K; ++kx)
    for (int ky = -images_K; ky <= images_K; ++ky) {
      const double ix = dx + kTwoPi * kx;
      const double iy = dy + kTwoPi * ky;
      c += poisson_term(k, std::sqrt(ix * ix + iy * iy));
    }
  return c;
}

DecayFit poisson_decay_fit(const FluctuationKernel& k, int n_points) {
  if (n_points < 4) throw Error("decay fit needs at least four points");
  const double rq = std::sqrt(k.q);
  std::vector<double> lx, ly;
  for (int j = 0; j < n_points; ++j) {
    const double r = (2.0 / rq) * std::pow(10.0, static_cast<double>(j) /
                                                     (n_points - 1));
    const double f = poisson_term(k, r);
    if (std::abs(f) < 1e-300) continue;
    lx.push_back(std::log1p(rq * r));
    ly.push_back(std::log(std::abs(f)));
  }
  if (lx.size() < 4) throw QuadratureUnstable("decay fit lost its points");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(lx.size());
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  DecayFit fit;
  fit.m = std::max(1, std::min(8, static_cast<int>(std::floor(-slope))));
  double c = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i)
    c = std::max(c, std::exp(ly[i] + fit.m * lx[i]));
  fit.c_m = c / (k.q * k.q);
  return fit;
}

double correlation(const FluctuationKernel& k, double dx, double dy) {
  const double v = variance(k);
  if (!(v > 0.0)) throw Error("kernel has zero variance");
  const double rho = covariance_exact(k, dx, dy) / v;
  if (std::abs(rho) > 1.0 + 1e-8)
    throw Error("correlation escaped [-1, 1]");
  return rho;
}

CovarianceGram gram_points(const FluctuationKernel& k,
                           const std::vector<Point>& points) {
  require_distinct(points);
  const std::size_t n = points.size();
  CovarianceGram g;
  g.points = points;
  g.matrix.assign(n * n, 0.0);

  // collapse numerically identical displacements into classes
  using Key = std::pair<long long, long long>;
  std::map<Key, double> classes;
  std::vector<Key> keys(n * n);
  std::vector<std::pair<double, double>> reps;
  std::vector<Key> order;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double dx = torus_delta(points[i].x - points[j].x);
      const double dy = torus_delta(points[i].y - points[j].y);
      const Key key{std::llround(dx * 1e12), std::llround(dy * 1e12)};
      keys[i * n + j] = key;
      if (classes.emplace(key, 0.0).second) {
        reps.emplace_back(dx, dy);
        order.push_back(key);
      }
    }
  std::vector<double> vals(reps.size());
  parallel_for(reps.size(), [&](std::size_t c) {
    vals[c] = covariance_exact(k, reps[c].first, reps[c].second);
  });
  for (std::size_t c = 0; c < order.size(); ++c) classes[order[c]] = vals[c];
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      g.matrix[i * n + j] = classes[keys[i * n + j]];
  return g;
}

std::vector<double> covariance_table_mod(const FluctuationKernel& k, int P) {
  if (P < 1) throw Error("sublattice order must be positive");
  const int R = k.truncation_radius;
  std::vector<double> fold(static_cast<std::size_t>(P) * P, 0.0);
  for (int nx = -R; nx <= R; ++nx) {
    const int u = ((nx % P) + P) % P;
    for (int ny = -R; ny <= R; ++ny) {
      const int s2 = nx * nx + ny * ny;
      if (s2 > R * R || s2 == 0) continue;
      const int v = ((ny % P) + P) % P;
      const double w = k.w_by_nsq[s2];
      fold[static_cast<std::size_t>(u) * P + v] += 0.5 * w * w;
    }
  }
  std::vector<std::complex<double>> tw(P);
  for (int j = 0; j < P; ++j) {
    const double a = kTwoPi * j / P;
    tw[j] = {std::cos(a), std::sin(a)};
  }
  // two-pass unnormalized inverse DFT of the folded weights
  std::vector<std::complex<double>> h(static_cast<std::size_t>(P) * P);
  for (int u = 0; u < P; ++u)
    for (int b = 0; b < P; ++b) {
      std::complex<double> s = 0.0;
      for (int v = 0; v < P; ++v)
        s += fold[static_cast<std::size_t>(u) * P + v] *
             tw[static_cast<std::size_t>(v) * b % P];
      h[static_cast<std::size_t>(u) * P + b] = s;
    }
  std::vector<double> table(static_cast<std::size_t>(P) * P, 0.0);
  for (int a = 0; a < P; ++a)
    for (int b = 0; b < P; ++b) {
      std::complex<double> s = 0.0;
      for (int u = 0; u < P; ++u)
        s += h[static_cast<std::size_t>(u) * P + b] *
             tw[static_cast<std::size_t>(u) * a % P];
      table[static_cast<std::size_t>(a) * P + b] = s.real();
    }
  return table;
}

GramSampler::GramSampler(const CovarianceGram& gram) {
  n_ = gram.count();
  if (n_ == 0) throw Error("empty Gram matrix");
  double trace = 0.0;
  for (std::size_t i = 0; i < n_; ++i) trace += gram.at(i, i);
  const double base = std::max(trace / static_cast<double>(n_), 1e-300);
  const double ladder[] = {0.0, 1e-12, 1e-10, 1e-8, 1e-6};
  for (double rel : ladder) {
    std::vector<double> a = gram.matrix;
    for (std::size_t i = 0; i < n_; ++i) a[i * n_ + i] += rel * base;
    bool ok = true;
    for (std::size_t j = 0; j < n_ && ok; ++j) {
      double d = a[j * n_ + j];
      for (std::size_t t = 0; t < j; ++t) d -= a[j * n_ + t] * a[j * n_ + t];
      if (!(d > 0.0)) {
        ok = false;
        break;
      }
      const double lj = std::sqrt(d);
      a[j * n_ + j] = lj;
      for (std::size_t i = j + 1; i < n_; ++i) {
        double s = a[i * n_ + j];
        for (std::size_t t = 0; t < j; ++t)
          s -= a[i * n_ + t] * a[j * n_ + t];
        a[i * n_ + j] = s / lj;
      }
    }
    if (ok) {
      chol_ = std::move(a);
      jitter_ = rel * base;
      return;
    }
  }
  throw FactorizationFailure("Gram matrix is not positive definite");
}

std::vector<double> GramSampler::sample(std::uint64_t seed) const {
  CounterRng rng(seed);
  std::vector<double> z(n_);
  for (std::size_t i = 0; i < n_; ++i)
    z[i] = rng.normal(0, static_cast<std::uint64_t>(i));
  std::vector<double> x(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j <= i; ++j) s += chol_[i * n_ + j] * z[j];
    x[i] = s;
  }
  return x;
}

std::vector<double> sample_phi(const FluctuationKernel& k,
                               const std::vector<Point>& points,
                               std::uint64_t seed, SamplePath path) {
  require_distinct(points);
  if (points.empty()) throw Error("no sample points given");
  if (path == SamplePath::gram) {
    const GramSampler sampler(gram_points(k, points));
    return sampler.sample(seed);
  }
  const int R = k.truncation_radius;
  CounterRng rng(seed);
  std::vector<double> out(points.size(), 0.0);
  const double amp = std::sqrt(0.5);
  for (int nx = -R; nx <= R; ++nx)
    for (int ny = -R; ny <= R; ++ny) {
      if (!representative(nx, ny)) continue;
      const int s2 = nx * nx + ny * ny;
      if (s2 > R * R) continue;
      const double w = k.w_by_nsq[s2];
      if (w == 0.0) continue;
      const std::complex<double> c =
          amp * w * rng.complex_normal(CounterRng::mode_stream(kRolePhi, nx, ny), 0);
      for (std::size_t p = 0; p < points.size(); ++p) {
        const double phase = nx * points[p].x + ny * points[p].y;
        out[p] += 2.0 * (c.real() * std::cos(phase) -
                         c.imag() * std::sin(phase));
      }
    }
  return out;
}

}  // namespace phi3lab
