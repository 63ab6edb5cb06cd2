#include "phi3lab/soliton.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "phi3lab/errors.hpp"
#include "phi3lab/fft.hpp"
#include "phi3lab/threads.hpp"

namespace phi3lab {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Enough images that the discarded ring sits below e^{-30} of the peak,
// never fewer than the sqrt(q) * 2 pi K >= 60 floor.
int image_count(double q, double kappa_q) {
  const int k_floor =
      static_cast<int>(std::ceil(60.0 / (kTwoPi * std::sqrt(q))));
  const int k_tail = static_cast<int>(std::ceil(30.0 / (kappa_q * kTwoPi)));
  return std::max({k_floor, k_tail, 1});
}

int signed_freq(int idx, int M) { return idx <= M / 2 ? idx : idx - M; }

std::vector<std::complex<double>> grid_spectrum(const GridField& g) {
  const int M = g.resolution_M;
  std::vector<std::complex<double>> buf(g.values.size());
  for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = g.values[i];
  fft2_inplace(buf, static_cast<std::size_t>(M), /*inverse=*/false);
  const double inv = 1.0 / (static_cast<double>(M) * static_cast<double>(M));
  for (auto& c : buf) c *= inv;
  return buf;
}

}  // namespace

void SolitonSpec::validate() const {
  if (sigma == 0.0) throw ZeroCoupling("soliton coupling must be nonzero");
  if (!(q > 0.0)) throw Error("soliton mass must be positive");
  if (x0 < 0.0 || x0 >= kTwoPi || y0 < 0.0 || y0 >= kTwoPi)
    throw Error("soliton center must lie in [0, 2 pi)^2");
}

PeriodizationTail periodization_tail(const SolitonSpec& spec,
                                     const GroundState& gs) {
  spec.validate();
  PeriodizationTail t;
  t.kappa = std::sqrt(spec.q) * gs.decay_rate(spec.sigma);
  t.images_K = image_count(spec.q, t.kappa);
  t.c_rate = t.kappa * kTwoPi * t.images_K / spec.q;
  t.bound = std::exp(-t.c_rate * spec.q);
  return t;
}

PeriodizedField periodize(const SolitonSpec& spec, const GroundState& gs,
                          int M) {
  spec.validate();
  if (M < 8.0 * std::sqrt(spec.q))
    throw UnderResolved("grid must satisfy M >= 8 sqrt(q)");
  const RadialProfile unit = gs.unit_soliton(spec.sigma);
  const PeriodizationTail tail = periodization_tail(spec, gs);
  const int K = tail.images_K;
  const double rq = std::sqrt(spec.q);
  const double h = kTwoPi / M;

  PeriodizedField out;
  out.images_K = K;
  out.decay_rate = tail.kappa;
  out.field.resolution_M = M;
  out.field.values.assign(static_cast<std::size_t>(M) * M, 0.0);
  std::vector<double> ring_sup(static_cast<std::size_t>(M), 0.0);

  parallel_for(static_cast<std::size_t>(M), [&](std::size_t i) {
    const double x = static_cast<double>(i) * h - spec.x0;
    double ring_worst = 0.0;
    for (int j = 0; j < M; ++j) {
      const double y = j * h - spec.y0;
      double v = 0.0;
      double ring = 0.0;
      for (int kx = -K; kx <= K; ++kx) {
        const double dx = x + kTwoPi * kx;
        for (int ky = -K; ky <= K; ++ky) {
          const double dy = y + kTwoPi * ky;
          const double r = std::sqrt(dx * dx + dy * dy);
          const double term = spec.q * unit.value_at(rq * r);
          v += term;
          if (std::max(std::abs(kx), std::abs(ky)) == K)
            ring = std::max(ring, std::abs(term));
        }
      }
      out.field.values[i * M + j] = v;
      ring_worst = std::max(ring_worst, ring);
    }
    ring_sup[i] = ring_worst;
  });

  double peak = 0.0, ring = 0.0;
  for (double v : out.field.values) peak = std::max(peak, std::abs(v));
  for (double r : ring_sup) ring = std::max(ring, r);
  out.tail_bound = ring / std::max(peak, 1e-300);

  const int support = static_cast<int>(
      std::ceil(rq * gs.transform_support(spec.sigma)));
  out.field.dealias_degree = std::min(support, (M - 1) / 2);
  return out;
}

SpectralField soliton_modes(const SolitonSpec& spec, const GroundState& gs,
                            int N, double mollifier_scale) {
  spec.validate();
  if (N < 1) throw Error("mode cutoff must be at least 1");
  const double rq = std::sqrt(spec.q);
  const int support =
      static_cast<int>(std::ceil(rq * gs.transform_support(spec.sigma)));
  const int R = std::max(1, std::min(N, support));
  SpectralField f = SpectralField::zeros(R);
  f.kind = SpectralField::Kind::deterministic;
  f.time_t = 0.0;
  const double inv4pi2 = 1.0 / (kTwoPi * kTwoPi);
  for (int nx = -R; nx <= R; ++nx) {
    for (int ny = -R; ny <= R; ++ny) {
      if (!f.inside(nx, ny)) continue;
      const double nn =
          std::sqrt(static_cast<double>(nx) * nx + static_cast<double>(ny) * ny);
      double amp = gs.unit_transform(nn / rq, spec.sigma) * inv4pi2;
      if (mollifier_scale > 0.0) amp *= std::exp(-nn / mollifier_scale);
      const double phase = -(nx * spec.x0 + ny * spec.y0);
      f.at(nx, ny) = amp * std::complex<double>(std::cos(phase),
                                                std::sin(phase));
    }
  }
  return f;
}

SpectralField project_cutoff(const GridField& g, int N) {
  if (N < 1) throw Error("mode cutoff must be at least 1");
  const int M = g.resolution_M;
  if (M < 2 * N + 1)
    throw AliasRisk("projection needs grid resolution M >= 2N+1");
  const auto spec = grid_spectrum(g);
  SpectralField f = SpectralField::zeros(N);
  f.kind = SpectralField::Kind::deterministic;
  for (int nx = -N; nx <= N; ++nx) {
    const int ix = ((nx % M) + M) % M;
    for (int ny = -N; ny <= N; ++ny) {
      if (!f.inside(nx, ny)) continue;
      const int iy = ((ny % M) + M) % M;
      f.at(nx, ny) = spec[static_cast<std::size_t>(ix) * M + iy];
    }
  }
  return f;
}

HamiltonianReport hamiltonian_plane(const SolitonSpec& spec,
                                    const GroundState& gs, double A) {
  spec.validate();
  const RadialNorms n = gs.qstar_norms();
  const double lam = gs.lambda_abs(spec.sigma);
  // unit-profile integrals by exact rescaling of the ground-state ones
  const double grad_u = lam * lam;
  const double sign = spec.sigma > 0.0 ? -1.0 : 1.0;
  const double cubic_u = sign * lam * n.l3cubed / std::pow(n.l2sq, 1.5);
  const double q2 = spec.q * spec.q;
  HamiltonianReport r;
  r.kinetic = 0.5 * q2 * grad_u;
  r.cubic = (spec.sigma / 3.0) * q2 * cubic_u;
  r.taming = A * q2;  // unit profile has unit mass
  r.total = r.kinetic + r.cubic + r.taming;
  r.domain = "plane";
  return r;
}

HamiltonianReport hamiltonian_torus(const GridField& g, double sigma,
                                    double A) {
  const int M = g.resolution_M;
  if (M < 3 * g.dealias_degree + 1)
    throw AliasRisk("cubic term needs M >= 3*degree + 1");
  const auto spec = grid_spectrum(g);
  double kin = 0.0, mass = 0.0;
  for (int ix = 0; ix < M; ++ix) {
    const int nx = signed_freq(ix, M);
    for (int iy = 0; iy < M; ++iy) {
      const int ny = signed_freq(iy, M);
      const double p = std::norm(spec[static_cast<std::size_t>(ix) * M + iy]);
      kin += static_cast<double>(nx * nx + ny * ny) * p;
      mass += p;
    }
  }
  const double four_pi2 = kTwoPi * kTwoPi;
  HamiltonianReport r;
  r.kinetic = 0.5 * four_pi2 * kin;
  r.cubic = (sigma / 3.0) * g.integral_power(3);
  r.taming = A * (four_pi2 * mass) * (four_pi2 * mass);
  r.total = r.kinetic + r.cubic + r.taming;
  r.domain = "torus";
  return r;
}

double mollifier_error_a1(double sigma, double q, int N,
                          const GroundState& gs) {
  if (N < 1) throw Error("mollifier scale must be at least 1");
  SolitonSpec spec;
  spec.sigma = sigma;
  spec.q = q;
  const SpectralField plain = soliton_modes(spec, gs, 1 << 20);
  const SpectralField moll =
      soliton_modes(spec, gs, 1 << 20, static_cast<double>(N));
  const int R = plain.cutoff_N;
  const int M = static_cast<int>(next_pow2(static_cast<std::size_t>(3 * R + 1)));
  const GridField gp = spectral_to_grid(plain, M);
  const GridField gm = spectral_to_grid(moll, M);
  return std::abs(gm.integral_power(3) - gp.integral_power(3));
}

double mollifier_error_a2(double sigma, double q, int N,
                          const GroundState& gs) {
  if (N < 1) throw Error("mollifier scale must be at least 1");
  SolitonSpec spec;
  spec.sigma = sigma;
  spec.q = q;
  const SpectralField plain = soliton_modes(spec, gs, 1 << 20);
  const double four_pi2 = kTwoPi * kTwoPi;
  double m_plain = 0.0, m_moll = 0.0;
  const int R = plain.cutoff_N;
  for (int nx = -R; nx <= R; ++nx)
    for (int ny = -R; ny <= R; ++ny) {
      const double p = std::norm(plain.coeff(nx, ny));
      if (p == 0.0) continue;
      const double nn = std::sqrt(static_cast<double>(nx) * nx +
                                  static_cast<double>(ny) * ny);
      m_plain += p;
      m_moll += p * std::exp(-2.0 * nn / N);
    }
  m_plain *= four_pi2;
  m_moll *= four_pi2;
  return std::abs(m_moll * m_moll - m_plain * m_plain);
}

int cutoff_schedule(double q, double eps) {
  if (!(q > 0.0)) throw Error("mass must be positive");
  if (eps < 0.0) throw Error("schedule exponent margin must be nonnegative");
  return static_cast<int>(std::ceil(std::pow(q, 2.5 + eps)));
}

double commutator_diagnostic(const SolitonSpec& spec, const GroundState& gs,
                             int N) {
  if (N < 1) throw Error("mode cutoff must be at least 1");
  const SpectralField full = soliton_modes(spec, gs, 1 << 20);
  const int R = full.cutoff_N;
  const int M =
      static_cast<int>(next_pow2(static_cast<std::size_t>(4 * R + 1)));
  const SpectralField low = soliton_modes(spec, gs, N);
  const GridField gf = spectral_to_grid(full, M);
  const GridField gl = spectral_to_grid(low, M);
  GridField sq_f = gf, sq_l = gl;
  for (std::size_t i = 0; i < sq_f.values.size(); ++i) {
    sq_f.values[i] = gf.values[i] * gf.values[i];
    sq_l.values[i] = gl.values[i] * gl.values[i];
  }
  const auto hat_f = grid_spectrum(sq_f);
  const auto hat_l = grid_spectrum(sq_l);
  double acc = 0.0;
  for (int ix = 0; ix < M; ++ix) {
    const int nx = signed_freq(ix, M);
    for (int iy = 0; iy < M; ++iy) {
      const int ny = signed_freq(iy, M);
      const std::size_t idx = static_cast<std::size_t>(ix) * M + iy;
      const bool keep = nx * nx + ny * ny <= N * N;
      const std::complex<double> a = keep ? hat_f[idx] : 0.0;
      acc += std::norm(a - hat_l[idx]);
    }
  }
  return kTwoPi * std::sqrt(acc);
}

}  // namespace phi3lab
