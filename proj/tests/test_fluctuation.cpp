#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "phi3lab/errors.hpp"
#include "phi3lab/fluctuation.hpp"
#include "phi3lab/groundstate.hpp"
#include "phi3lab/soliton.hpp"
#include "phi3lab/threads.hpp"

using namespace phi3lab;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

const GroundState& handle() {
  static GroundState gs;
  return gs;
}

const FluctuationKernel& kernel_16_16() {
  static FluctuationKernel k = build_kernel(16.0, 16.0, 0.1, handle());
  return k;
}

}  // namespace

TEST_CASE("kernel construction basics") {
  const FluctuationKernel& k = kernel_16_16();
  CHECK(k.w_by_nsq[0] == 0.0);
  CHECK(k.truncation_radius >= 1);
  CHECK(k.cutoff_N == cutoff_schedule(16.0, 0.1));
  CHECK(k.truncation_radius <= k.cutoff_N);
  CHECK(k.sum_w_squared > 0.0);
  CHECK(k.tail_ratio < 1e-12);
  CHECK_THROWS_AS((void)build_kernel(0.0, 4.0, 0.1, handle()), ZeroCoupling);
  CHECK_THROWS_AS((void)build_kernel(1.0, -1.0, 0.1, handle()), Error);
  CHECK_THROWS_AS((void)build_kernel(1.0, 4.0, -0.1, handle()), Error);
}

TEST_CASE("radial truncation discards nothing that matters") {
  const GroundState& gs = handle();
  const FluctuationKernel& k = kernel_16_16();
  const int R = k.truncation_radius;
  const int R_ext = static_cast<int>(1.5 * R) + 1;
  const double rq = std::sqrt(k.q);
  double outside = 0.0;
  for (int nx = -R_ext; nx <= R_ext; ++nx)
    for (int ny = -R_ext; ny <= R_ext; ++ny) {
      const int s2 = nx * nx + ny * ny;
      if (s2 <= R * R || s2 > R_ext * R_ext) continue;
      const double s = std::sqrt(static_cast<double>(s2));
      const double w =
          s * s / std::sqrt(1.0 + s * s) * gs.unit_transform(s / rq, 16.0);
      outside += w * w;
    }
  CHECK(outside < 1e-12 * k.sum_w_squared);
}

TEST_CASE("variance and zero-displacement covariance coincide") {
  const FluctuationKernel& k = kernel_16_16();
  const double v = variance(k);
  CHECK(v == doctest::Approx(0.5 * k.sum_w_squared).epsilon(1e-14));
  CHECK(covariance_exact(k, 0.0, 0.0) == doctest::Approx(v).epsilon(1e-12));
  CHECK(correlation(k, 0.0, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("correlation stays in the unit interval") {
  const FluctuationKernel& k = kernel_16_16();
  for (double d : {0.1, 0.4, 0.9, 1.7, 2.8}) {
    const double r1 = correlation(k, d, 0.0);
    const double r2 = correlation(k, d / 1.4142135623730951,
                                  d / 1.4142135623730951);
    CHECK(std::abs(r1) <= 1.0 + 1e-8);
    CHECK(std::abs(r2) <= 1.0 + 1e-8);
    // displacement symmetry
    CHECK(correlation(k, -d, 0.0) == doctest::Approx(r1).epsilon(1e-13));
  }
}

TEST_CASE("per-q variance approaches its scaling limit") {
  const GroundState& gs = handle();
  const double a0 = gs.constants(16.0).a0;
  const double limit = kTwoPi * kTwoPi * a0;
  const FluctuationKernel k16 = build_kernel(16.0, 16.0, 0.1, gs);
  const FluctuationKernel k32 = build_kernel(16.0, 32.0, 0.1, gs);
  const double v16 = variance(k16) / (16.0 * 16.0);
  const double v32 = variance(k32) / (32.0 * 32.0);
  CHECK(std::abs(v32 - v16) / v16 < 0.02);
  CHECK(v32 == doctest::Approx(limit).epsilon(0.02));
  CHECK(v32 > v16);  // monotone approach from below
}

TEST_CASE("exact and Poisson covariances agree across a sweep") {
  const GroundState& gs = handle();
  for (double sigma : {16.0, 1.0}) {
    const FluctuationKernel k = build_kernel(sigma, 16.0, 0.1, gs);
    const double v = variance(k);
    for (double d : {0.0, 0.3, 0.9, 1.5, 2.2, 3.14159265358979}) {
      const double e = covariance_exact(k, d, 0.0);
      const double p = covariance_poisson(k, d, 0.0);
      CHECK(std::abs(e - p) <= 1e-3 * (std::abs(e) + 1e-3 * v));
    }
  }
}

TEST_CASE("Poisson image terms obey the fitted power envelope") {
  const FluctuationKernel& k = kernel_16_16();
  const DecayFit fit = poisson_decay_fit(k);
  CHECK(fit.m >= 4);
  CHECK(fit.m <= 8);
  CHECK(fit.c_m > 0.0);
  const double rq = std::sqrt(k.q);
  for (double d : {2.5 / rq, 7.0 / rq, 18.0 / rq}) {
    const double f = covariance_poisson(k, d, 0.0, 0);  // single image
    const double envelope =
        fit.c_m * k.q * k.q / std::pow(1.0 + rq * d, fit.m);
    CHECK(std::abs(f) <= envelope * 1.05);
  }
}

TEST_CASE("covariance table over a sublattice matches direct sums") {
  const GroundState& gs = handle();
  const FluctuationKernel k = build_kernel(1.0, 4.0, 0.1, gs);
  const int P = 8;
  const std::vector<double> table = covariance_table_mod(k, P);
  for (int a : {0, 1, 3, 5, 7})
    for (int b : {0, 2, 4, 6}) {
      const double want = covariance_exact(k, kTwoPi * a / P, kTwoPi * b / P);
      CHECK(table[static_cast<std::size_t>(a) * P + b] ==
            doctest::Approx(want).epsilon(1e-10));
    }
}

TEST_CASE("gram matrices are translation invariant") {
  const GroundState& gs = handle();
  const FluctuationKernel k = build_kernel(1.0, 9.0, 0.1, gs);
  const std::vector<Point> pts = {{1.0, 1.0}, {2.2, 0.4}, {4.0, 5.0}};
  std::vector<Point> moved = pts;
  for (auto& p : moved) {
    p.x = std::fmod(p.x + 0.7, kTwoPi);
    p.y = std::fmod(p.y + 1.3, kTwoPi);
  }
  const CovarianceGram g1 = gram_points(k, pts);
  const CovarianceGram g2 = gram_points(k, moved);
  for (std::size_t i = 0; i < g1.matrix.size(); ++i)
    CHECK(g1.matrix[i] == doctest::Approx(g2.matrix[i]).epsilon(1e-10));
  // diagonal equals the pointwise variance
  CHECK(g1.at(0, 0) == doctest::Approx(variance(k)).epsilon(1e-12));
  CHECK(g1.at(1, 2) == doctest::Approx(g1.at(2, 1)).epsilon(1e-14));
}

TEST_CASE("sampling rejects degenerate inputs") {
  const GroundState& gs = handle();
  const FluctuationKernel k = build_kernel(1.0, 4.0, 0.1, gs);
  const std::vector<Point> dup = {{1.0, 1.0}, {1.0, 1.0}};
  CHECK_THROWS_AS((void)sample_phi(k, dup, 1, SamplePath::spectral), Error);
  CHECK_THROWS_AS((void)sample_phi(k, {}, 1, SamplePath::spectral), Error);
  CHECK_THROWS_AS((void)gram_points(k, dup), Error);
}

TEST_CASE("indefinite matrices fail factorization loudly") {
  CovarianceGram g;
  g.points = {{0.0, 0.0}, {1.0, 1.0}};
  g.matrix = {1.0, 2.0, 2.0, 1.0};
  CHECK_THROWS_AS(GramSampler{g}, FactorizationFailure);
}

TEST_CASE("gram sampler reproduces a prescribed variance") {
  CovarianceGram g;
  g.points = {{0.0, 0.0}};
  g.matrix = {4.0};
  const GramSampler s(g);
  CHECK(s.jitter() == 0.0);
  const int n = 4000;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = s.sample(1000 + i)[0];
    acc += x * x;
  }
  CHECK(acc / n == doctest::Approx(4.0).epsilon(0.10));
}

TEST_CASE("gram path of sample_phi equals the standalone sampler") {
  const GroundState& gs = handle();
  const FluctuationKernel k = build_kernel(1.0, 4.0, 0.1, gs);
  const std::vector<Point> pts = {{0.5, 0.5}, {2.0, 1.0}, {4.0, 4.0}};
  const GramSampler sampler(gram_points(k, pts));
  const auto a = sample_phi(k, pts, 77, SamplePath::gram);
  const auto b = sampler.sample(77);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("spectral path is deterministic and has the right variance") {
  const GroundState& gs = handle();
  const FluctuationKernel k = build_kernel(1.0, 4.0, 0.1, gs);
  const std::vector<Point> pts = {{1.0, 2.0}};
  const auto a = sample_phi(k, pts, 5, SamplePath::spectral);
  const auto b = sample_phi(k, pts, 5, SamplePath::spectral);
  CHECK(a[0] == b[0]);
  const int n = 4000;
  std::vector<double> vals(n);
  parallel_for(n, [&](std::size_t i) {
    vals[i] = sample_phi(k, pts, 100 + i, SamplePath::spectral)[0];
  });
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += vals[i] * vals[i];
  CHECK(acc / n == doctest::Approx(variance(k)).epsilon(0.08));
}

TEST_CASE("spectral and gram paths share their covariance structure") {
  const GroundState& gs = handle();
  const FluctuationKernel k = build_kernel(1.0, 16.0, 0.1, gs);
  const std::vector<Point> pts = {{0.5, 0.5}, {1.5, 2.0}, {3.3, 4.4},
                                  {5.5, 0.7}};
  const CovarianceGram exact = gram_points(k, pts);
  const GramSampler sampler(exact);
  const int n = 10000;
  const std::size_t m = pts.size();
  std::vector<std::vector<double>> spectral(n), gram(n);
  parallel_for(n, [&](std::size_t i) {
    spectral[i] = sample_phi(k, pts, 40000 + i, SamplePath::spectral);
    gram[i] = sampler.sample(90000 + i);
  });
  const double v = variance(k);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a; b < m; ++b) {
      double cs = 0.0, cg = 0.0;
      for (int i = 0; i < n; ++i) {
        cs += spectral[i][a] * spectral[i][b];
        cg += gram[i][a] * gram[i][b];
      }
      cs /= n;
      cg /= n;
      const double want = exact.at(a, b);
      CHECK(std::abs(cs - want) < 0.06 * v);
      CHECK(std::abs(cg - want) < 0.06 * v);
    }
}
