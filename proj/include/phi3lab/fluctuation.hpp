#pragma once

#include <cstdint>
#include <vector>

#include "phi3lab/groundstate.hpp"

namespace phi3lab {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

// Gaussian fluctuation field around the mass-q soliton on the torus:
// Phi(x) = sum_n w_n B_n e^{i n.x} with mode weights
// w_n = (|n|^2 / sqrt(1+|n|^2)) qhat(|n|/sqrt(q)), w_0 = 0, and B_n the
// time-1/2 free-field amplitudes, so Var Phi(x) = (1/2) sum w_n^2.
struct FluctuationKernel {
  double sigma = 0.0;
  double q = 0.0;
  double eps = 0.0;
  int cutoff_N = 0;          // schedule cutoff N(q)
  int truncation_radius = 0; // modes kept: |n| <= truncation_radius
  double tail_ratio = 0.0;   // measured discarded sum w^2 over the kept sum
  double sum_w_squared = 0.0;

  // w at integer squared radius; index n^2 in [0, truncation_radius^2]
  std::vector<double> w_by_nsq;
  // dense radial table of w(s) for the continuous (Poisson) representation
  std::vector<double> w_radial;
  double s_step = 0.0;
  double s_max = 0.0;

  double w_lattice(int nsq) const { return w_by_nsq[nsq]; }
  double w_cont(double s) const;
};

FluctuationKernel build_kernel(double sigma, double q, double eps,
                               const GroundState& gs);

// Pointwise variance (1/2) sum w^2 over the kept modes.
double variance(const FluctuationKernel& k);

// Exact lattice covariance (1/2) sum w_n^2 cos(n.d).  The odd part cancels
// pairwise; a nonzero residual beyond rounding throws.
double covariance_exact(const FluctuationKernel& k, double dx, double dy);

// Poisson-summed covariance: sum over images |k|_inf <= images_K of
// F(d + 2 pi k) with F(x) = 2 pi int s f(s) J0(|x| s) ds, f = w^2 / 2.
double covariance_poisson(const FluctuationKernel& k, double dx, double dy,
                          int images_K = 3);

// Envelope fit |F(x)| <= c_m q^2 / (1 + sqrt(q)|x|)^m over
// |x| in [2 q^{-1/2}, 20 q^{-1/2}], exponent capped at 8.
struct DecayFit {
  double c_m = 0.0;
  int m = 0;
};
DecayFit poisson_decay_fit(const FluctuationKernel& k, int n_points = 12);

double correlation(const FluctuationKernel& k, double dx, double dy);

struct CovarianceGram {
  std::vector<Point> points;
  std::vector<double> matrix;  // row-major count x count
  std::size_t count() const { return points.size(); }
  double at(std::size_t i, std::size_t j) const {
    return matrix[i * points.size() + j];
  }
};

// Dense Gram matrix by exact lattice sums, one per displacement class.
CovarianceGram gram_points(const FluctuationKernel& k,
                           const std::vector<Point>& points);

// Covariance table for all displacement classes of the sublattice
// (2 pi / P) Z^2: entry (a, b) is the covariance at displacement
// (2 pi a / P, 2 pi b / P).  Folding the mode weights modulo P makes every
// class cost O(P) after an O(P^3) transform.
std::vector<double> covariance_table_mod(const FluctuationKernel& k, int P);

// Cholesky-based sampler for arbitrary Gram matrices.  Rounding can leave
// the matrix indefinite by a hair, so factorization retries on a ladder of
// diagonal jitters (relative to trace/count) before giving up.
class GramSampler {
 public:
  explicit GramSampler(const CovarianceGram& gram);
  std::vector<double> sample(std::uint64_t seed) const;
  std::size_t count() const { return n_; }
  double jitter() const { return jitter_; }

 private:
  std::size_t n_ = 0;
  double jitter_ = 0.0;
  std::vector<double> chol_;  // lower triangular factor
};

enum class SamplePath { spectral, gram };

// One draw of the field at the given distinct points.  The spectral path
// synthesizes from per-mode Gaussians; the gram path factorizes the exact
// covariance and transforms white noise.  Both are deterministic in seed.
std::vector<double> sample_phi(const FluctuationKernel& k,
                               const std::vector<Point>& points,
                               std::uint64_t seed, SamplePath path);

}  // namespace phi3lab
