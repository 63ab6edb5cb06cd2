#pragma once

#include <mutex>
#include <string>
#include <vector>

namespace phi3lab {

// Radial function r -> f(r) sampled on a uniform grid starting at r = 0.
struct RadialProfile {
  std::vector<double> r_grid;
  std::vector<double> values;
  double r_max = 0.0;
  double step = 0.0;
  std::string step_policy = "uniform";
  double ode_residual = 0.0;  // sup-norm equation residual (solver outputs)

  // Throws if the structural invariants fail: grid uniform ascending from 0,
  // finite values, decayed tail |values.back()| < 1e-8.
  void validate() const;

  // Local cubic (4-point Lagrange) interpolation; even extension through
  // r = 0, identically zero beyond r_max.
  double value_at(double rr) const;
};

struct RadialNorms {
  double l2sq = 0.0;      // integral of f^2 over the plane
  double gradsq = 0.0;    // integral of |f'|^2 over the plane
  double l3cubed = 0.0;   // integral of |f|^3 over the plane
  double cubic_signed = 0.0;  // integral of f^3, sign kept
  double quad_error = 0.0;    // worst Richardson estimate among the integrals
};

struct CriticalConstants {
  double sigma = 0.0;
  double l2sq_Qstar = 0.0;
  double gradsq_Qstar = 0.0;
  double l3cubed_Qstar = 0.0;
  double c_gns = 0.0;  // (3/2) * l2sq_Qstar^{-1/2}
  double a0 = 0.0;     // sigma^2 / (8 * l2sq_Qstar)
};

// Shooting solver for Q'' + Q'/r = 2Q - 2Q^2, Q'(0) = 0, Q(oo) = 0.
// Bisection on Q(0) in [1, 10] between surviving and sign-crossing shots;
// the far tail is continued with the exact decaying solution of the
// linearized equation so the truncation error stays below the residual
// budget.
RadialProfile solve_ground_state(double tol = 1e-10, double r_max = 30.0,
                                 double step = 1e-3);

// Plane integrals 2*pi*int f(r) r dr of f^2, |f'|^2, |f|^3 (and signed f^3)
// by composite Simpson with a Richardson step-halving estimate.
RadialNorms radial_norms(const RadialProfile& p, double rel_tol = 1e-8);

CriticalConstants critical_constants(double sigma, const RadialProfile& qstar);

// Unit-mass optimizer of the cubic-vs-taming balance: lambda * Qstar(|lambda| r)
// / ||Qstar|| with lambda = -sigma / (2 ||grad Qstar||).  Exact sample
// rescaling, no interpolation.
RadialProfile soliton_unit_profile(double sigma, const RadialProfile& qstar);

// 2*pi*int f(r) J0(xi r) r dr, the plane Fourier transform of a radial
// function under the convention fhat(xi) = int f exp(-i xi.x) dx.
double hankel_transform(const RadialProfile& p, double xi);

// Smallest grid xi beyond which |fhat| stays below 1e-10 * |fhat(0)|,
// scanned on a uniform xi grid of the given resolution.
double hankel_decay_cutoff(const RadialProfile& p, double xi_max,
                           double xi_step);

// Shared handle bundling the solved ground state with lazily built
// transform tables.  Everything is immutable after construction except the
// one-time table fill, so const access is thread-safe.
class GroundState {
 public:
  explicit GroundState(double tol = 1e-10, double r_max = 30.0,
                       double step = 1e-3);

  const RadialProfile& qstar() const { return qstar_; }
  const RadialNorms& qstar_norms() const { return norms_; }
  CriticalConstants constants(double sigma) const;

  RadialProfile unit_soliton(double sigma) const;

  // |lambda| = |sigma| / (2 ||grad Qstar||); the unit soliton concentrates on
  // length scale 1/|lambda| and decays like exp(-sqrt(2)|lambda| r).
  double lambda_abs(double sigma) const;
  double decay_rate(double sigma) const { return 1.4142135623730951 * lambda_abs(sigma); }

  // Plane Fourier transform of the unit soliton at radial frequency xi >= 0,
  // evaluated from a cached table of the sigma-free ground-state transform.
  double unit_transform(double xi, double sigma) const;

  // Frequency beyond which |unit_transform| < 1e-10 * |unit_transform(0)|.
  double transform_support(double sigma) const;

  // False when the decay scan ran off the table end, so the support above is
  // a table boundary rather than a certified decay radius.
  bool transform_support_certified() const;

 private:
  RadialProfile qstar_;
  RadialNorms norms_;
  mutable std::once_flag table_once_;
  mutable std::vector<double> table_;  // ground-state transform on eta grid
  mutable double table_deta_ = 0.0;
  mutable double table_eta_max_ = 0.0;
  mutable double table_support_ = 0.0;  // eta beyond which table is tiny
  void ensure_table() const;
  double qstar_hat(double eta) const;
};

}  // namespace phi3lab
