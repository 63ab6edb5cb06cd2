#include "phi3lab/partition.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>

#include "phi3lab/errors.hpp"
#include "phi3lab/extremes.hpp"
#include "phi3lab/fft.hpp"
#include "phi3lab/fluctuation.hpp"
#include "phi3lab/soliton.hpp"
#include "phi3lab/spectral.hpp"
#include "phi3lab/threads.hpp"

namespace phi3lab {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// log sum_{j != skip} exp(w_j), shifted by the running max for stability
double loo_logsumexp(const std::vector<double>& w, std::size_t skip) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < w.size(); ++j)
    if (j != skip) m = std::max(m, w[j]);
  double t = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j)
    if (j != skip) t += std::exp(w[j] - m);
  return m + std::log(t);
}

}  // namespace

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::supercritical:
      return "supercritical";
    case Regime::critical:
      return "critical";
    case Regime::subcritical:
      return "subcritical";
  }
  return "unknown";
}

Regime classify_regime(double A, double a0) {
  if (!(a0 > 0.0)) throw ConfigInvalid("critical constant must be positive");
  if (std::abs(A - a0) <= 1e-12 * a0) return Regime::critical;
  return A < a0 ? Regime::supercritical : Regime::subcritical;
}

PhasePoint make_phase_point(double sigma, double A, double q, int N,
                            const GroundState& gs) {
  if (sigma == 0.0) throw ZeroCoupling("phase point needs sigma != 0");
  if (!(A >= 0.0)) throw ConfigInvalid("chemical potential must be >= 0");
  if (!(q > 0.0)) throw ConfigInvalid("mass must be positive");
  if (N < 0) throw ConfigInvalid("mode cutoff must be nonnegative");
  PhasePoint pp;
  pp.sigma = sigma;
  pp.A = A;
  pp.q = q;
  pp.N = N;
  pp.regime = classify_regime(A, gs.constants(sigma).a0);
  return pp;
}

BoundReport supercritical_lower_bound(const PhasePoint& pp,
                                      const GroundState& gs) {
  if (pp.regime == Regime::subcritical)
    throw ConfigInvalid("explicit-drift bound needs A <= A0");
  if (pp.N < 1) throw ConfigInvalid("mode cutoff must be scheduled");
  SolitonSpec spec;
  spec.sigma = pp.sigma;
  spec.q = pp.q;
  const SpectralField modes = soliton_modes(spec, gs, pp.N);
  const int R = modes.cutoff_N;
  const int M = static_cast<int>(next_pow2(static_cast<std::size_t>(3 * R + 1)));
  const GridField grid = spectral_to_grid(modes, M);
  const HamiltonianReport ham = hamiltonian_torus(grid, pp.sigma, pp.A);

  double i2 = 0.0;
  for (int nx = -R; nx <= R; ++nx)
    for (int ny = -R; ny <= R; ++ny) {
      if (!modes.inside(nx, ny)) continue;
      const double c2 = std::norm(modes.coeff(nx, ny));
      i2 += c2 / (1.0 + static_cast<double>(nx * nx + ny * ny));
    }
  i2 *= kTwoPi * kTwoPi;
  const double i1 = -pp.A * wick2_integral_variance(pp.N, 1.0);

  BoundReport rep;
  rep.kind = "lower";
  rep.deterministic_part = -ham.total - 0.5 * pp.q;
  rep.stochastic_part = 0.0;
  rep.stderr_value = 0.0;
  rep.value = rep.deterministic_part + rep.stochastic_part;
  rep.components["h_kinetic"] = ham.kinetic;
  rep.components["h_cubic"] = ham.cubic;
  rep.components["h_taming"] = ham.taming;
  rep.components["h_total"] = ham.total;
  rep.components["mass_term"] = 0.5 * pp.q;
  rep.components["i1"] = i1;
  rep.components["i2"] = i2;
  rep.components["cutoff_N"] = static_cast<double>(pp.N);
  rep.components["mode_radius"] = static_cast<double>(R);
  return rep;
}

BoundReport critical_lower_bound(const PhasePoint& pp, double eps,
                                 int n_samples, std::uint64_t seed,
                                 const GroundState& gs) {
  if (pp.regime != Regime::critical)
    throw ConfigInvalid("fluctuation probe needs A = A0");
  const FluctuationKernel kernel = build_kernel(pp.sigma, pp.q, eps, gs);
  const CoarseGrid grid = build_grid(pp.q, eps);
  const CovarianceGram gram = grid_gram(kernel, grid);
  const MaxStatistics stats = mc_max(gram, n_samples, seed);

  SolitonSpec spec;
  spec.sigma = pp.sigma;
  spec.q = pp.q;
  const PeriodizationTail tail = periodization_tail(spec, gs);

  BoundReport rep;
  rep.kind = "lower";
  rep.deterministic_part = -pp.q - tail.bound;
  rep.stochastic_part = stats.mean;
  rep.stderr_value = stats.stderr_mean;
  rep.value = rep.deterministic_part + rep.stochastic_part;
  rep.components["mc_mean"] = stats.mean;
  rep.components["mc_stderr"] = stats.stderr_mean;
  rep.components["count"] = static_cast<double>(stats.count);
  rep.components["delta"] = grid.delta;
  rep.components["sudakov"] = sudakov_lower(gram);
  rep.components["union_bound"] = union_upper(gram);
  rep.components["c_rate"] = tail.c_rate;
  rep.components["tail_bound"] = tail.bound;
  rep.components["eps"] = eps;
  rep.components["n_samples"] = static_cast<double>(n_samples);
  return rep;
}

BoundReport coercivity_certificate(const PhasePoint& pp, double eta,
                                   double eps_c, const GroundState& gs,
                                   double c_eta) {
  if (!(eta > 0.0)) throw ConfigInvalid("eta must be positive");
  if (!(eps_c > 0.0) || !(eps_c < 0.5))
    throw ConfigInvalid("eps_c must lie in (0, 1/2)");
  if (!(c_eta > 0.0)) throw ConfigInvalid("C(eta) must be positive");
  const double qnorm = std::sqrt(gs.qstar_norms().l2sq);
  const double s = std::abs(pp.sigma);
  const double cross = s / (2.0 * qnorm) + eta * s / 3.0;
  const double alpha =
      pp.A - eps_c - 0.5 * cross * cross / (1.0 - 2.0 * eps_c);
  if (!(alpha > 0.0))
    throw NotCoercive("quartic coefficient is not positive; shrink eta/eps_c");
  BoundReport rep;
  rep.kind = "lower";
  rep.deterministic_part =
      -27.0 * std::pow(c_eta, 4) / (256.0 * std::pow(alpha, 3));
  rep.stochastic_part = 0.0;
  rep.stderr_value = 0.0;
  rep.value = rep.deterministic_part;
  rep.components["alpha"] = alpha;
  rep.components["eta"] = eta;
  rep.components["eps_c"] = eps_c;
  rep.components["c_eta"] = c_eta;
  return rep;
}

BoundReport lattice_logz_mc(double sigma, double A, int N, int n_samples,
                            std::uint64_t seed) {
  if (N < 1 || N > 16)
    throw Error("lattice estimate is a desk-scale probe; need 1 <= N <= 16");
  if (!(A > 0.0)) throw Error("lattice estimate needs A > 0");
  if (n_samples < 100) throw Error("need at least 100 samples");

  std::vector<double> w(static_cast<std::size_t>(n_samples));
  parallel_for(w.size(), [&](std::size_t i) {
    const SpectralField y = sample_free_field(N, 1.0, seed + i);
    const double int2 = wick_power(y, 2).integral();
    const double int3 = wick_power(y, 3).integral();
    w[i] = -(sigma / 3.0) * int3 - A * int2 * int2;
  });
  for (double v : w)
    if (!std::isfinite(v))
      throw Overflow("sample weight left the representable range");

  const double m = *std::max_element(w.begin(), w.end());
  double t = 0.0;
  for (double v : w) t += std::exp(v - m);
  const double value = m + std::log(t / n_samples);

  // leave-one-out estimates; rebuild with a fresh shift when removing a
  // dominant weight would cancel catastrophically
  const std::size_t n = w.size();
  std::vector<double> loo(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double di = t - std::exp(w[i] - m);
    if (di > 1e-12 * t)
      loo[i] = m + std::log(di) - std::log(static_cast<double>(n - 1));
    else
      loo[i] = loo_logsumexp(w, i) - std::log(static_cast<double>(n - 1));
  }
  double loo_mean = 0.0;
  for (double v : loo) loo_mean += v;
  loo_mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : loo) ss += (v - loo_mean) * (v - loo_mean);
  const double se =
      std::sqrt(ss * static_cast<double>(n - 1) / static_cast<double>(n));

  const std::size_t top = std::max<std::size_t>(1, (n + 99) / 100);
  std::vector<double> weights(n);
  for (std::size_t i = 0; i < n; ++i) weights[i] = std::exp(w[i] - m);
  std::nth_element(weights.begin(), weights.begin() + (top - 1), weights.end(),
                   std::greater<double>());
  double top_share = 0.0;
  for (std::size_t i = 0; i < top; ++i) top_share += weights[i];
  top_share /= t;

  if (!std::isfinite(value) || !std::isfinite(se))
    throw Overflow("log-mean-exp left the representable range");

  BoundReport rep;
  rep.kind = "lower";
  rep.deterministic_part = 0.0;
  rep.stochastic_part = value;
  rep.stderr_value = se;
  rep.value = value;
  rep.components["top_share"] = top_share;
  rep.components["heavy_tail"] = top_share > 0.5 ? 1.0 : 0.0;
  rep.components["cutoff_N"] = static_cast<double>(N);
  rep.components["n_samples"] = static_cast<double>(n_samples);
  return rep;
}

BoundReport lattice_logz_mc(const PhasePoint& pp, int n_samples,
                            std::uint64_t seed) {
  return lattice_logz_mc(pp.sigma, pp.A, pp.N, n_samples, seed);
}

std::vector<ExperimentRecord> phase_sweep(double sigma,
                                          const std::vector<double>& A_grid,
                                          const std::vector<double>& q_grid,
                                          double eps, int n_samples,
                                          std::uint64_t seed,
                                          const GroundState& gs) {
  if (A_grid.empty() || q_grid.empty())
    throw ConfigInvalid("phase sweep needs nonempty grids");
  const double a0 = gs.constants(sigma).a0;
  std::vector<ExperimentRecord> out;
  std::uint64_t row = 0;
  for (double A : A_grid)
    for (double q : q_grid) {
      const std::uint64_t row_seed = seed + 1000003 * row;
      ++row;
      ExperimentRecord rec;
      rec.experiment = "phases";
      rec.seed = row_seed;
      rec.set("sigma", sigma);
      rec.set("A", A);
      rec.set("A_over_A0", A / a0);
      rec.set("q", q);
      const auto start = std::chrono::steady_clock::now();
      try {
        const int N = cutoff_schedule(q, eps);
        const PhasePoint pp = make_phase_point(sigma, A, q, N, gs);
        rec.set("regime", regime_name(pp.regime));
        rec.set("N", static_cast<double>(N));
        BoundReport rep;
        switch (pp.regime) {
          case Regime::supercritical:
            rep = supercritical_lower_bound(pp, gs);
            break;
          case Regime::critical:
            rep = critical_lower_bound(pp, eps, n_samples, row_seed, gs);
            break;
          case Regime::subcritical:
            rep = coercivity_certificate(pp, 0.01, 0.01, gs, 1.0);
            break;
        }
        rep.components["eps"] = eps;
        rep.components["n_samples"] = static_cast<double>(n_samples);
        rec.value = rep.value;
        if (rep.stderr_value > 0.0) rec.stderr_value = rep.stderr_value;
        rec.set("components_json", components_json(rep.components));
      } catch (const std::exception& e) {
        rec.error = e.what();
        rec.value = std::numeric_limits<double>::quiet_NaN();
      }
      rec.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - start)
                        .count();
      out.push_back(rec);
    }
  return out;
}

}  // namespace phi3lab
