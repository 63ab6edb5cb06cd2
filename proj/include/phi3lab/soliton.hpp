#pragma once

#include <string>

#include "phi3lab/groundstate.hpp"
#include "phi3lab/spectral.hpp"

namespace phi3lab {

// A mass-q soliton q*Q(sqrt(q)(x - x0)) built from the unit profile for the
// given coupling sign/strength.
struct SolitonSpec {
  double sigma = 1.0;
  double q = 1.0;
  double x0 = 0.0;
  double y0 = 0.0;

  void validate() const;
};

struct HamiltonianReport {
  double kinetic = 0.0;  // (1/2) int |grad phi|^2
  double cubic = 0.0;    // (sigma/3) int phi^3
  double taming = 0.0;   // A (int phi^2)^2
  double total = 0.0;
  std::string domain;  // "plane" or "torus"
};

struct PeriodizedField {
  GridField field;
  int images_K = 0;        // image sum over |k|_inf <= K
  double decay_rate = 0.0; // kappa of the mass-q profile, |Q_q| ~ e^{-kappa r}
  double tail_bound = 0.0; // outermost image ring sup relative to the peak
};

// Exponential bookkeeping for the discarded images: the periodized profile
// differs from the exact one by at most ~ exp(-c_rate * q).
struct PeriodizationTail {
  double kappa = 0.0;   // decay rate of the mass-q profile
  int images_K = 0;
  double c_rate = 0.0;  // kappa * 2 pi K / q, per unit of q
  double bound = 0.0;   // exp(-c_rate * q)
};

// Wraps the soliton onto the torus by direct image summation on an M x M
// grid.  M < 8 sqrt(q) raises UnderResolved.
PeriodizedField periodize(const SolitonSpec& spec, const GroundState& gs,
                          int M);

// Image count and tail size used by periodize for this spec.
PeriodizationTail periodization_tail(const SolitonSpec& spec,
                                     const GroundState& gs);

// Exact torus Fourier coefficients of the periodized soliton through mode
// cutoff N (further limited by the measured transform support):
// c_n = qhat(|n|/sqrt(q)) e^{-i n.x0} / (2 pi)^2.  A positive
// mollifier_scale applies the smoothing weight e^{-|n|/mollifier_scale}.
SpectralField soliton_modes(const SolitonSpec& spec, const GroundState& gs,
                            int N, double mollifier_scale = 0.0);

// Restrict a grid field to modes |n| <= N.  Requires M >= 2N+1.
SpectralField project_cutoff(const GridField& g, int N);

// H(phi) = (1/2)|grad phi|_2^2 + (sigma/3) int phi^3 + A (int phi^2)^2.
// The plane version evaluates the closed scaling form q^2 (A - A0) through
// the unit-profile quadratures; the torus version works spectrally on the
// grid and requires the cubic term to be dealiased (M >= 3 deg + 1).
HamiltonianReport hamiltonian_plane(const SolitonSpec& spec,
                                    const GroundState& gs, double A);
HamiltonianReport hamiltonian_torus(const GridField& g, double sigma,
                                    double A);

// Error in the cubic term after mollification at scale N:
// |int (rho_N Q)^3 - int Q^3| on the torus; decays like q^3 / N.
double mollifier_error_a1(double sigma, double q, int N,
                          const GroundState& gs);

// Error in the taming term: |(int (rho_N Q)^2)^2 - (int Q^2)^2| ~ q / N.
double mollifier_error_a2(double sigma, double q, int N,
                          const GroundState& gs);

// Mode cutoff schedule N(q) = ceil(q^{5/2 + eps}).
int cutoff_schedule(double q, double eps);

// || P_N(Q^2) - (P_N Q)^2 ||_{L^2} on the torus; decreasing in N.
double commutator_diagnostic(const SolitonSpec& spec, const GroundState& gs,
                             int N);

}  // namespace phi3lab
