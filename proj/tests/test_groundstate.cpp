#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "phi3lab/errors.hpp"
#include "phi3lab/groundstate.hpp"

using namespace phi3lab;

namespace {

// Frozen regression constants, produced once by an independent fine-grid
// shooting run of the scaled equation u'' + u'/r = u - u^2 (u(r) equals the
// ground state at r/sqrt(2)) with step 1e-5 and Richardson-confirmed digits.
constexpr double kQ0 = 2.391956403;        // ground-state height Q(0)
constexpr double kL2sq = 15.50158633;      // squared L2 norm of the ground state
constexpr double kA0Sigma1 = 0.008063690862;  // critical potential at sigma=1
constexpr double kCgns = 0.3809808860;     // sharp cubic interpolation constant

// In-test oracle: solves the scaled equation with its own stepper and
// returns (u(0), 2*pi*int u^2 r dr) plus the stored profile.  Written
// independently of the library solver: different equation, different
// detectors, no tail graft.
struct OracleRun {
  double u0 = 0.0;
  double l2sq = 0.0;
  std::vector<double> u;
  double h = 0.0;
};

OracleRun run_oracle(double h, double r_max) {
  auto classify = [&](double a, std::vector<double>* store) {
    // series start u = a + a(1-a)/4 r^2 + ...
    double c2 = 0.25 * a * (1.0 - a);
    double c4 = c2 * (1.0 - 2.0 * a) / 16.0;
    double u = a + c2 * h * h + c4 * h * h * h * h;
    double p = 2.0 * c2 * h + 4.0 * c4 * h * h * h;
    std::size_t n = static_cast<std::size_t>(r_max / h) + 1;
    if (store) {
      store->assign(n, 0.0);
      (*store)[0] = a;
      (*store)[1] = u;
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
      double r = i * h;
      auto f = [](double rr, double uu, double pp, double& du, double& dp) {
        du = pp;
        dp = uu - uu * uu - pp / rr;
      };
      double k1u, k1p, k2u, k2p, k3u, k3p, k4u, k4p;
      f(r, u, p, k1u, k1p);
      f(r + 0.5 * h, u + 0.5 * h * k1u, p + 0.5 * h * k1p, k2u, k2p);
      f(r + 0.5 * h, u + 0.5 * h * k2u, p + 0.5 * h * k2p, k3u, k3p);
      f(r + h, u + h * k3u, p + h * k3p, k4u, k4p);
      u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
      p += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
      if (store) (*store)[i + 1] = u;
      if (u < 0.0 || u > 1e4) return 1;            // crossed / exploded
      if (r > 2.0 && p > 0.0 && u < 0.8) return 0; // turned back up
    }
    return 0;
  };
  double lo = 1.0, hi = 10.0;
  REQUIRE(classify(lo, nullptr) == 0);
  REQUIRE(classify(hi, nullptr) == 1);
  for (int it = 0; it < 60 && hi - lo > 1e-15; ++it) {
    double mid = 0.5 * (lo + hi);
    (classify(mid, nullptr) == 1 ? hi : lo) = mid;
  }
  OracleRun out;
  out.u0 = 0.5 * (lo + hi);
  out.h = h;
  classify(out.u0, &out.u);
  // trapezoid is good enough here: the comparison tolerances are 1e-6 level
  double s = 0.0;
  std::size_t usable = out.u.size();
  for (std::size_t i = 0; i < out.u.size(); ++i) {
    if (out.u[i] <= 0.0) { usable = i; break; }
  }
  for (std::size_t i = 1; i < usable; ++i) {
    double r0 = (i - 1) * h, r1 = i * h;
    s += 0.5 * (out.u[i - 1] * out.u[i - 1] * r0 + out.u[i] * out.u[i] * r1) * h;
  }
  out.l2sq = 2.0 * 3.14159265358979323846 * s;
  return out;
}

const RadialProfile& qstar() {
  static RadialProfile p = solve_ground_state(1e-10, 30.0, 1e-3);
  return p;
}

const GroundState& handle() {
  static GroundState gs;
  return gs;
}

}  // namespace

TEST_CASE("oracle reproduces the frozen constants") {
  OracleRun o = run_oracle(2e-4, 42.0);
  CHECK(std::abs(o.u0 - kQ0) < 5e-10);
  // ||Q||^2 on the plane is half the scaled-equation value
  CHECK(std::abs(0.5 * o.l2sq - kL2sq) / kL2sq < 1e-7);
}

TEST_CASE("solver height and residual meet the contract") {
  const RadialProfile& p = qstar();
  CHECK(std::abs(p.values[0] - kQ0) < 1e-9);
  CHECK(p.ode_residual < 1e-9);  // 10 * tol
  // positive and strictly decreasing
  for (std::size_t i = 1; i < p.values.size(); ++i) {
    REQUIRE(p.values[i] > 0.0);
    REQUIRE(p.values[i] < p.values[i - 1]);
  }
}

TEST_CASE("solver profile equals the rescaled oracle solution") {
  OracleRun o = run_oracle(2e-4, 42.0);
  const RadialProfile& p = qstar();
  for (double r : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    double ru = std::sqrt(2.0) * r;
    std::size_t i = static_cast<std::size_t>(ru / o.h);
    double t = ru / o.h - i;
    double uval = (1.0 - t) * o.u[i] + t * o.u[i + 1];
    CHECK(std::abs(p.value_at(r) - uval) < 1e-8);
  }
}

TEST_CASE("truncation radius does not move the norms") {
  RadialProfile p15 = solve_ground_state(1e-10, 15.0, 1e-3);
  double l2_15 = radial_norms(p15).l2sq;
  double l2_30 = radial_norms(qstar()).l2sq;
  CHECK(std::abs(l2_15 - l2_30) / l2_30 < 1e-8);
}

TEST_CASE("norms of the zero profile vanish") {
  RadialProfile z;
  for (int i = 0; i <= 100; ++i) {
    z.r_grid.push_back(i * 0.01);
    z.values.push_back(0.0);
  }
  z.step = 0.01;
  z.r_max = 1.0;
  RadialNorms nm = radial_norms(z);
  CHECK(nm.l2sq == 0.0);
  CHECK(nm.gradsq == 0.0);
  CHECK(nm.l3cubed == 0.0);
}

TEST_CASE("ground-state norms and the forced identities") {
  RadialNorms nm = radial_norms(qstar());
  CHECK(std::abs(nm.l2sq - kL2sq) / kL2sq < 1e-6);
  // Pohozaev: int Q^2 = (2/3) int Q^3
  CHECK(std::abs(nm.l3cubed - 1.5 * nm.l2sq) / nm.l2sq < 1e-6);
  // energy identity: |grad Q|^2 - 2 int Q^3 + 2 int Q^2 = 0
  CHECK(std::abs(nm.gradsq - 2.0 * nm.cubic_signed + 2.0 * nm.l2sq) / nm.l2sq <
        1e-6);
  // together: |grad Q|^2 = ||Q||^2
  CHECK(std::abs(nm.gradsq - nm.l2sq) / nm.l2sq < 1e-6);
  // sharp-constant equality at the optimizer
  CHECK(std::abs(nm.l3cubed - 1.5 * std::sqrt(nm.l2sq) * std::sqrt(nm.gradsq)) /
            nm.l3cubed <
        1e-5);
}

TEST_CASE("critical constants") {
  CriticalConstants c1 = critical_constants(1.0, qstar());
  CHECK(c1.a0 == 1.0 / (8.0 * c1.l2sq_Qstar));
  CHECK(std::abs(c1.a0 - kA0Sigma1) / kA0Sigma1 < 1e-7);
  CHECK(std::abs(c1.c_gns - kCgns) / kCgns < 1e-7);
  CriticalConstants cm2 = critical_constants(-2.0, qstar());
  CHECK(cm2.a0 == doctest::Approx(4.0 * c1.a0).epsilon(1e-14));
  CHECK_THROWS_AS(critical_constants(0.0, qstar()), ZeroCoupling);
}

TEST_CASE("unit soliton profile") {
  RadialProfile qp = soliton_unit_profile(1.0, qstar());
  RadialNorms nm = radial_norms(qp);
  CHECK(std::abs(nm.l2sq - 1.0) < 1e-8);
  for (double v : qp.values) CHECK(v <= 0.0);  // negative branch for sigma > 0
  // H0(Q) = kinetic/2 + (sigma/3) int Q^3 equals -A0
  CriticalConstants c1 = critical_constants(1.0, qstar());
  double h0 = 0.5 * nm.gradsq + (1.0 / 3.0) * nm.cubic_signed;
  CHECK(std::abs(h0 + c1.a0) / c1.a0 < 1e-5);

  RadialProfile qm = soliton_unit_profile(-1.0, qstar());
  for (std::size_t i = 0; i < qm.values.size(); ++i)
    CHECK(qm.values[i] == doctest::Approx(-qp.values[i]).epsilon(1e-14));
  CHECK_THROWS_AS(soliton_unit_profile(0.0, qstar()), ZeroCoupling);
}

TEST_CASE("quadratic-part scaling of the base energy") {
  // H0(q Q(sqrt(q) .)) = q^2 H0(Q)
  RadialProfile qp = soliton_unit_profile(1.0, qstar());
  RadialNorms base = radial_norms(qp);
  double h0 = 0.5 * base.gradsq + (1.0 / 3.0) * base.cubic_signed;
  for (double q : {2.0, 5.0, 10.0}) {
    RadialProfile sp;
    double rq = std::sqrt(q);
    for (std::size_t i = 0; i < qp.values.size(); ++i) {
      sp.r_grid.push_back(qp.r_grid[i] / rq);
      sp.values.push_back(q * qp.values[i]);
    }
    sp.step = qp.step / rq;
    sp.r_max = qp.r_max / rq;
    RadialNorms nm = radial_norms(sp);
    double h0q = 0.5 * nm.gradsq + (1.0 / 3.0) * nm.cubic_signed;
    CHECK(std::abs(h0q - q * q * h0) / (q * q * std::abs(h0)) < 1e-6);
  }
}

TEST_CASE("sigma enters scalars only through sigma^2") {
  CriticalConstants cp = critical_constants(3.0, qstar());
  CriticalConstants cm = critical_constants(-3.0, qstar());
  CHECK(cp.a0 == cm.a0);
  CHECK(cp.c_gns == cm.c_gns);
}

TEST_CASE("plane transform at zero frequency and Parseval") {
  const RadialProfile& p = qstar();
  double mass = hankel_transform(p, 0.0);
  RadialNorms nm = radial_norms(p);
  // int Q = int Q^2 for this equation (integrate the equation over the plane)
  CHECK(std::abs(mass - nm.l2sq) / nm.l2sq < 1e-7);

  // Parseval on the radial transform: (2pi)^{-1} int |Qhat|^2 s ds = ||Q||^2.
  // Stride the profile to keep the many transform evaluations affordable.
  RadialProfile sub;
  for (std::size_t i = 0; i < p.values.size(); i += 4) {
    sub.r_grid.push_back(p.r_grid[i]);
    sub.values.push_back(p.values[i]);
  }
  sub.step = p.step * 4.0;
  sub.r_max = sub.r_grid.back();
  double ds = 0.05;
  std::vector<double> f;
  for (double s = 0.0; s <= 16.0; s += ds) {
    double qh = hankel_transform(sub, s);
    f.push_back(qh * qh * s);
  }
  double par = 0.0;
  for (std::size_t i = 1; i < f.size(); ++i) par += 0.5 * (f[i - 1] + f[i]) * ds;
  par /= 2.0 * 3.14159265358979323846;
  CHECK(std::abs(par - nm.l2sq) / nm.l2sq < 1e-5);
}

TEST_CASE("transform decay scan and oscillation guard") {
  const RadialProfile& p = qstar();
  double cut = hankel_decay_cutoff(p, 16.0, 0.25);
  CHECK(cut < 16.0);
  RadialProfile sub;
  for (std::size_t i = 0; i < p.values.size(); i += 4) {
    sub.r_grid.push_back(p.r_grid[i]);
    sub.values.push_back(p.values[i]);
  }
  sub.step = p.step * 4.0;
  sub.r_max = sub.r_grid.back();
  CHECK(std::abs(hankel_transform(sub, cut + 0.5)) < 1e-10);
  CHECK(std::abs(hankel_transform(sub, cut + 2.0)) < 1e-10);
  CHECK_THROWS_AS(hankel_transform(p, 700.0), OscillationUnderresolved);
}

TEST_CASE("handle transform table matches the direct transform") {
  const GroundState& gs = handle();
  RadialProfile unit = gs.unit_soliton(16.0);
  double direct0 = hankel_transform(unit, 0.0);
  CHECK(std::abs(gs.unit_transform(0.0, 16.0) - direct0) /
            std::abs(direct0) <
        1e-6);
  double lam = gs.lambda_abs(16.0);
  for (double xi : {0.5 * lam, 2.0 * lam, 5.0 * lam}) {
    double direct = hankel_transform(unit, xi);
    CHECK(std::abs(gs.unit_transform(xi, 16.0) - direct) <
          1e-6 * std::abs(direct0));
  }
  double sup = gs.transform_support(16.0);
  CHECK(sup > 0.0);
  CHECK(std::abs(gs.unit_transform(1.05 * sup, 16.0)) <
        5e-10 * std::abs(gs.unit_transform(0.0, 16.0)));
}

TEST_CASE("solver rejects bad arguments") {
  CHECK_THROWS_AS(solve_ground_state(-1.0, 30.0, 1e-3), Error);
  CHECK_THROWS_AS(solve_ground_state(1e-10, 10.0, 1e-3), Error);
}
