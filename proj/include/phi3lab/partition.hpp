#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "phi3lab/groundstate.hpp"
#include "phi3lab/records.hpp"

namespace phi3lab {

enum class Regime { supercritical, critical, subcritical };

const char* regime_name(Regime r);

// A is critical when it sits within 1e-12 relative of a0; below is
// supercritical (no normalization), above subcritical.
Regime classify_regime(double A, double a0);

struct PhasePoint {
  double sigma = 1.0;
  double A = 0.0;
  Regime regime = Regime::supercritical;
  double q = 1.0;
  int N = 0;
};

PhasePoint make_phase_point(double sigma, double A, double q, int N,
                            const GroundState& gs);

struct BoundReport {
  std::string kind;  // "lower" or "upper"
  double value = 0.0;
  double deterministic_part = 0.0;
  double stochastic_part = 0.0;
  double stderr_value = 0.0;  // 0 when the report is exact
  std::map<std::string, double> components;
};

// Explicit-drift lower bound on log Z: value = -H_torus(Q_{q,x0,N}) - q/2.
// The centered-error integrals i1 = -A Var(int :Y^2:) and
// i2 = |Q_{q,x0,N}|^2_{H^-1} are reported as components; they are
// N-convergent constants that would drown the q^2 signal at desk scale, so
// they stay out of value.  Accepts critical points too (the bound
// degenerates to -q/2 there).
BoundReport supercritical_lower_bound(const PhasePoint& pp,
                                      const GroundState& gs);

// Critical probe: value = E[max over the coarse grid] - q - exp(-c q) with
// c the measured periodization rate.
BoundReport critical_lower_bound(const PhasePoint& pp, double eps,
                                 int n_samples, std::uint64_t seed,
                                 const GroundState& gs);

// Subcritical coercivity certificate: with
// alpha = A - eps_c - (|sigma|/(2|Q*|) + eta |sigma|/3)^2 / (2 (1 - 2 eps_c))
// the quartic-minus-cubic profile alpha m^4 - C(eta) m^3 is minimized at
// -27 C^4 / (256 alpha^3), a q-independent lower bound on the tamed energy.
// Throws NotCoercive when alpha <= 0 (always the case for A <= A0).
BoundReport coercivity_certificate(const PhasePoint& pp, double eta,
                                   double eps_c, const GroundState& gs,
                                   double c_eta = 1.0);

// Direct desk-scale estimate of log E exp(-(sigma/3) int :Y^3: -
// A (int :Y^2:)^2) at time 1 via log-mean-exp with jackknife errors.
// sigma = 0 is allowed here (pure taming weight).
BoundReport lattice_logz_mc(double sigma, double A, int N, int n_samples,
                            std::uint64_t seed);
BoundReport lattice_logz_mc(const PhasePoint& pp, int n_samples,
                            std::uint64_t seed);

// One record per (A, q): the regime picks the probe.  A-major row order;
// per-row seeds are derived from the base seed, so reruns are identical.
std::vector<ExperimentRecord> phase_sweep(double sigma,
                                          const std::vector<double>& A_grid,
                                          const std::vector<double>& q_grid,
                                          double eps, int n_samples,
                                          std::uint64_t seed,
                                          const GroundState& gs);

}  // namespace phi3lab
