#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "phi3lab/errors.hpp"
#include "phi3lab/groundstate.hpp"
#include "phi3lab/soliton.hpp"
#include "phi3lab/spectral.hpp"

using namespace phi3lab;

namespace {

const GroundState& handle() {
  static GroundState gs;
  return gs;
}

SolitonSpec make_spec(double sigma, double q, double x0 = 0.0,
                      double y0 = 0.0) {
  SolitonSpec s;
  s.sigma = sigma;
  s.q = q;
  s.x0 = x0;
  s.y0 = y0;
  return s;
}

}  // namespace

TEST_CASE("spec validation") {
  CHECK_THROWS_AS(make_spec(0.0, 1.0).validate(), ZeroCoupling);
  CHECK_THROWS_AS(make_spec(1.0, -2.0).validate(), Error);
  CHECK_THROWS_AS(make_spec(1.0, 1.0, 7.0).validate(), Error);
  CHECK_NOTHROW(make_spec(-3.0, 2.5, 1.0, 6.2).validate());
}

TEST_CASE("periodize rejects coarse grids") {
  CHECK_THROWS_AS((void)periodize(make_spec(1.0, 4.0), handle(), 8),
                  UnderResolved);
}

TEST_CASE("image tail is negligible for a tight soliton") {
  const PeriodizedField p = periodize(make_spec(16.0, 4.0), handle(), 64);
  CHECK(p.tail_bound < 1e-12);
  CHECK(p.images_K >= 1);
  const PeriodizationTail t = periodization_tail(make_spec(16.0, 4.0),
                                                 handle());
  CHECK(t.images_K == p.images_K);
  CHECK(t.c_rate * 4.0 == doctest::Approx(t.kappa * 6.283185307179586 *
                                          t.images_K));
  CHECK(t.bound < 1e-12);
}

TEST_CASE("real-space images and exact mode synthesis agree") {
  // tight soliton: torus coefficients come from the continuous transform
  const SolitonSpec spec = make_spec(16.0, 4.0, 1.0, 2.5);
  const SpectralField modes = soliton_modes(spec, handle(), 1 << 20);
  const int M = 256;
  const GridField via_modes = spectral_to_grid(modes, M);
  const PeriodizedField direct = periodize(spec, handle(), M);
  double sup = 0.0, peak = 0.0;
  for (std::size_t i = 0; i < via_modes.values.size(); ++i) {
    sup = std::max(sup,
                   std::abs(via_modes.values[i] - direct.field.values[i]));
    peak = std::max(peak, std::abs(direct.field.values[i]));
  }
  CHECK(peak > 1.0);
  CHECK(sup < 1e-6 * peak);

  // wide soliton: the image sum has many terms but the identity still holds
  const SolitonSpec wide = make_spec(1.0, 1.0);
  const GridField wm = spectral_to_grid(soliton_modes(wide, handle(), 1 << 20),
                                        16);
  const PeriodizedField wd = periodize(wide, handle(), 16);
  double wsup = 0.0, wpeak = 0.0;
  for (std::size_t i = 0; i < wm.values.size(); ++i) {
    wsup = std::max(wsup, std::abs(wm.values[i] - wd.field.values[i]));
    wpeak = std::max(wpeak, std::abs(wd.field.values[i]));
  }
  CHECK(wsup < 1e-7 * wpeak);
}

TEST_CASE("projection round trip recovers the coefficients") {
  const SolitonSpec spec = make_spec(1.0, 4.0, 0.5, 0.25);
  const SpectralField f = soliton_modes(spec, handle(), 1 << 20);
  const int M = 64;
  const GridField g = spectral_to_grid(f, M);
  const SpectralField back = project_cutoff(g, f.cutoff_N);
  for (int nx = -f.cutoff_N; nx <= f.cutoff_N; ++nx)
    for (int ny = -f.cutoff_N; ny <= f.cutoff_N; ++ny)
      CHECK(std::abs(back.coeff(nx, ny) - f.coeff(nx, ny)) < 1e-12);
  const SpectralField low = project_cutoff(g, 2);
  for (int nx = -2; nx <= 2; ++nx)
    for (int ny = -2; ny <= 2; ++ny)
      if (low.inside(nx, ny))
        CHECK(std::abs(low.coeff(nx, ny) - f.coeff(nx, ny)) < 1e-12);
  CHECK_THROWS_AS((void)project_cutoff(g, 40), AliasRisk);
}

TEST_CASE("plane Hamiltonian matches the scaling identity") {
  const GroundState& gs = handle();
  const double a0 = gs.constants(1.0).a0;
  const SolitonSpec spec = make_spec(1.0, 3.0);
  const HamiltonianReport h = hamiltonian_plane(spec, gs, 2.0 * a0);
  CHECK(h.domain == "plane");
  CHECK(h.total == doctest::Approx(9.0 * a0).epsilon(1e-7));
  const HamiltonianReport at_crit = hamiltonian_plane(spec, gs, a0);
  CHECK(std::abs(at_crit.total) < 1e-7 * 9.0 * a0);
  // both coupling signs give the same energy
  const HamiltonianReport neg = hamiltonian_plane(make_spec(-1.0, 3.0), gs,
                                                  2.0 * a0);
  CHECK(neg.total == doctest::Approx(h.total).epsilon(1e-14));
  CHECK(h.kinetic > 0.0);
  CHECK(h.cubic < 0.0);
  CHECK(h.taming > 0.0);
}

TEST_CASE("torus Hamiltonian converges to the plane value") {
  const GroundState& gs = handle();
  const double a0 = gs.constants(16.0).a0;
  const SolitonSpec spec = make_spec(16.0, 4.0, 3.0, 3.0);
  const SpectralField modes = soliton_modes(spec, gs, 1 << 20);
  const int M = static_cast<int>(next_pow2(
      static_cast<std::size_t>(3 * modes.cutoff_N + 1)));
  const GridField g = spectral_to_grid(modes, M);
  const HamiltonianReport ht = hamiltonian_torus(g, 16.0, 2.0 * a0);
  const HamiltonianReport hp = hamiltonian_plane(spec, gs, 2.0 * a0);
  CHECK(ht.domain == "torus");
  CHECK(ht.kinetic == doctest::Approx(hp.kinetic).epsilon(1e-5));
  CHECK(ht.cubic == doctest::Approx(hp.cubic).epsilon(1e-5));
  CHECK(ht.taming == doctest::Approx(hp.taming).epsilon(1e-5));
  CHECK(ht.total == doctest::Approx(hp.total).epsilon(1e-4));
}

TEST_CASE("torus Hamiltonian of the zero field vanishes") {
  GridField g;
  g.resolution_M = 16;
  g.dealias_degree = 4;
  g.values.assign(256, 0.0);
  const HamiltonianReport h = hamiltonian_torus(g, 1.0, 1.0);
  CHECK(h.kinetic == 0.0);
  CHECK(h.cubic == 0.0);
  CHECK(h.taming == 0.0);
  CHECK(h.total == 0.0);
}

TEST_CASE("torus Hamiltonian refuses aliased cubic terms") {
  const PeriodizedField p = periodize(make_spec(16.0, 4.0), handle(), 32);
  CHECK_THROWS_AS((void)hamiltonian_torus(p.field, 16.0, 1.0), AliasRisk);
}

TEST_CASE("mollifier errors decay at the first-order rate") {
  const GroundState& gs = handle();
  std::vector<double> a1, a2;
  for (int N : {32, 64, 128, 256}) {
    a1.push_back(mollifier_error_a1(1.0, 4.0, N, gs));
    a2.push_back(mollifier_error_a2(1.0, 4.0, N, gs));
  }
  for (std::size_t i = 0; i < a1.size(); ++i) {
    CHECK(a1[i] > 0.0);
    CHECK(a2[i] > 0.0);
  }
  // halving the smoothing scale halves the error, up to curvature
  for (std::size_t i = 0; i + 1 < a1.size(); ++i) {
    CHECK(a1[i] / a1[i + 1] > 1.6);
    CHECK(a1[i] / a1[i + 1] < 2.6);
    CHECK(a2[i] / a2[i + 1] > 1.6);
    CHECK(a2[i] / a2[i + 1] < 2.6);
  }
}

TEST_CASE("cutoff schedule") {
  CHECK(cutoff_schedule(4.0, 0.1) == 37);
  CHECK(cutoff_schedule(1.0, 0.05) == 1);
  CHECK(cutoff_schedule(1.0, 0.3) == 1);
  CHECK(cutoff_schedule(2.0, 0.0) == 6);
  CHECK_THROWS_AS((void)cutoff_schedule(0.0, 0.1), Error);
  CHECK_THROWS_AS((void)cutoff_schedule(4.0, -0.1), Error);
}

TEST_CASE("projection commutator shrinks as the cutoff grows") {
  const GroundState& gs = handle();
  const SolitonSpec spec = make_spec(16.0, 2.0);
  std::vector<double> d;
  for (int N : {4, 8, 16, 32}) {
    d.push_back(commutator_diagnostic(spec, gs, N));
  }
  for (std::size_t i = 0; i + 1 < d.size(); ++i) CHECK(d[i] > d[i + 1]);
  CHECK(d.front() > 0.0);
  const SpectralField modes = soliton_modes(spec, gs, 1 << 20);
  const double exact = commutator_diagnostic(spec, gs, 4 * modes.cutoff_N);
  CHECK(exact < 1e-12);
}

TEST_CASE("profile solves its Euler-Lagrange equation") {
  const GroundState& gs = handle();
  const RadialProfile unit = gs.unit_soliton(1.0);
  const double a0 = gs.constants(1.0).a0;
  const double q = 2.0;
  const double rq = std::sqrt(q);
  const double h = 4e-3;
  const int n = static_cast<int>(12.0 / h);
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = q * unit.value_at(rq * i * h);
  double sup_resid = 0.0, sup_scale = 0.0;
  for (int i = 2; i < n - 2; ++i) {
    const double r = i * h;
    const double d1 = (v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] -
                       v[i + 2]) / (12.0 * h);
    const double d2 = (-v[i - 2] + 16.0 * v[i - 1] - 30.0 * v[i] +
                       16.0 * v[i + 1] - v[i + 2]) / (12.0 * h * h);
    const double lap = d2 + d1 / r;
    const double resid = -lap + v[i] * v[i] + 4.0 * a0 * q * v[i];
    sup_resid = std::max(sup_resid, std::abs(resid));
    sup_scale = std::max(sup_scale, v[i] * v[i]);
  }
  CHECK(sup_resid < 1e-5 * sup_scale);
}
