#include "phi3lab/spectral.hpp"

#include <cmath>
#include <cstdlib>

#include "phi3lab/errors.hpp"
#include "phi3lab/fft.hpp"
#include "phi3lab/rng.hpp"
#include "phi3lab/threads.hpp"

namespace phi3lab {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// RNG roles keep the base field and the time increments on disjoint
// counter streams for every mode.
constexpr std::uint64_t kRoleField = 0;
constexpr std::uint64_t kRoleIncrement = 1;

double bracket(int n) { return std::sqrt(1.0 + static_cast<double>(n)); }

void require_field(const SpectralField& f) {
  if (f.cutoff_N < 1) throw Error("spectral field has empty mode set");
  const std::size_t want =
      static_cast<std::size_t>(f.side()) * static_cast<std::size_t>(f.side());
  if (f.coeffs.size() != want)
    throw Error("spectral field storage does not match its cutoff");
}

// Fills the Hermitian pair (n, -n) from one complex draw; the representative
// half-plane is ny > 0 or (ny == 0 and nx > 0).
bool representative(int nx, int ny) {
  return ny > 0 || (ny == 0 && nx > 0);
}

void add_gaussian_layer(SpectralField& f, std::uint64_t seed,
                        std::uint64_t role, double variance) {
  CounterRng rng(seed);
  const int N = f.cutoff_N;
  const double amp = std::sqrt(variance);
  f.at(0, 0) += amp * rng.normal(CounterRng::mode_stream(role, 0, 0), 0);
  for (int nx = -N; nx <= N; ++nx) {
    for (int ny = -N; ny <= N; ++ny) {
      if (!representative(nx, ny) || !f.inside(nx, ny)) continue;
      const std::complex<double> z =
          rng.complex_normal(CounterRng::mode_stream(role, nx, ny), 0);
      const std::complex<double> c = amp * z / bracket(nx * nx + ny * ny);
      f.at(nx, ny) += c;
      f.at(-nx, -ny) += std::conj(c);
    }
  }
}

}  // namespace

SpectralField SpectralField::zeros(int N) {
  if (N < 1) throw Error("mode cutoff must be at least 1");
  SpectralField f;
  f.cutoff_N = N;
  f.coeffs.assign(static_cast<std::size_t>(2 * N + 1) * (2 * N + 1),
                  {0.0, 0.0});
  return f;
}

void SpectralField::check_hermitian(double tol) const {
  require_field(*this);
  if (std::abs(coeff(0, 0).imag()) > tol)
    throw Error("zero mode has an imaginary part");
  for (int nx = -cutoff_N; nx <= cutoff_N; ++nx)
    for (int ny = -cutoff_N; ny <= cutoff_N; ++ny) {
      const std::complex<double> d =
          coeff(nx, ny) - std::conj(coeff(-nx, -ny));
      if (std::abs(d) > tol)
        throw Error("coefficients are not Hermitian-symmetric");
    }
}

double GridField::integral() const { return integral_power(1); }

double GridField::integral_power(int k) const {
  const std::size_t n = values.size();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double v = values[i];
    double p = v;
    for (int j = 1; j < k; ++j) p *= v;
    s += p;
  }
  return kTwoPi * kTwoPi * s / static_cast<double>(n);
}

SpectralField sample_free_field(int N, double t, std::uint64_t seed) {
  if (N < 1) throw Error("mode cutoff must be at least 1");
  if (!(t > 0.0) || t > 1.0) throw Error("time must lie in (0, 1]");
  SpectralField f = SpectralField::zeros(N);
  f.time_t = t;
  f.kind = SpectralField::Kind::free_field;
  add_gaussian_layer(f, seed, kRoleField, t);
  return f;
}

SpectralField extend_in_time(const SpectralField& f, std::uint64_t seed,
                             bool zero_increment) {
  require_field(f);
  if (f.kind != SpectralField::Kind::free_field || f.time_t != 0.5)
    throw WrongTime("extend_in_time needs a free field at time 1/2");
  SpectralField out = f;
  out.time_t = 1.0;
  if (!zero_increment) add_gaussian_layer(out, seed, kRoleIncrement, 0.5);
  return out;
}

double tadpole(int N, double t) {
  if (N < 1) throw Error("mode cutoff must be at least 1");
  if (t < 0.0) throw Error("time must be nonnegative");
  double s = 0.0;
  for (int nx = -N; nx <= N; ++nx) {
    const int budget = N * N - nx * nx;
    if (budget < 0) continue;
    const int ny_max = static_cast<int>(std::floor(std::sqrt(
        static_cast<double>(budget))));
    for (int ny = -ny_max; ny <= ny_max; ++ny)
      s += 1.0 / (1.0 + static_cast<double>(nx * nx + ny * ny));
  }
  return t * s;
}

double wick2_integral_variance(int N, double t) {
  if (N < 1) throw Error("mode cutoff must be at least 1");
  if (t < 0.0) throw Error("time must be nonnegative");
  // the disk has ~ pi N^2 modes and the cutoff schedule reaches N ~ 5e4,
  // so split by column; the fixed-order final sum keeps the result
  // independent of the worker count
  std::vector<double> col(static_cast<std::size_t>(2 * N + 1), 0.0);
  parallel_for(col.size(), [&](std::size_t i) {
    const int nx = static_cast<int>(i) - N;
    const int budget = N * N - nx * nx;
    if (budget < 0) return;
    const int ny_max = static_cast<int>(std::floor(std::sqrt(
        static_cast<double>(budget))));
    double s = 0.0;
    for (int ny = -ny_max; ny <= ny_max; ++ny) {
      const double br2 = 1.0 + static_cast<double>(nx * nx + ny * ny);
      s += 1.0 / (br2 * br2);
    }
    col[i] = s;
  });
  double s = 0.0;
  for (double c : col) s += c;
  const double four_pi2 = kTwoPi * kTwoPi;
  return 2.0 * t * t * four_pi2 * four_pi2 * s;
}

GridField spectral_to_grid(const SpectralField& f, int M) {
  require_field(f);
  const int N = f.cutoff_N;
  if (!is_pow2(static_cast<std::size_t>(M)))
    throw AliasRisk("grid resolution must be a power of two");
  if (M < 2 * N + 1)
    throw AliasRisk("grid resolution below the Nyquist requirement 2N+1");
  std::vector<std::complex<double>> buf(
      static_cast<std::size_t>(M) * static_cast<std::size_t>(M), {0.0, 0.0});
  for (int nx = -N; nx <= N; ++nx) {
    const int ix = ((nx % M) + M) % M;
    for (int ny = -N; ny <= N; ++ny) {
      if (!f.inside(nx, ny)) continue;
      const int iy = ((ny % M) + M) % M;
      buf[static_cast<std::size_t>(ix) * M + iy] += f.coeff(nx, ny);
    }
  }
  fft2_inplace(buf, static_cast<std::size_t>(M), /*inverse=*/true);
  // inverse FFT divides by M^2; the synthesis sum sum_n c_n e^{i n x} does not
  const double scale = static_cast<double>(M) * static_cast<double>(M);
  GridField g;
  g.resolution_M = M;
  g.dealias_degree = N;
  g.values.resize(buf.size());
  double worst = 0.0;
  double peak = 0.0;
  for (std::size_t i = 0; i < buf.size(); ++i) {
    const std::complex<double> v = scale * buf[i];
    g.values[i] = v.real();
    worst = std::max(worst, std::abs(v.imag()));
    peak = std::max(peak, std::abs(v.real()));
  }
  if (worst > 1e-9 * std::max(1.0, peak))
    throw Error("synthesized grid field is not real");
  return g;
}

GridField wick_power(const SpectralField& f, int k, int M) {
  require_field(f);
  if (f.kind != SpectralField::Kind::free_field)
    throw Error("wick_power is defined for free-field samples");
  if (k != 2 && k != 3) throw Error("wick power order must be 2 or 3");
  const int N = f.cutoff_N;
  const int nyquist = k * N + 1;
  if (M == 0) {
    M = static_cast<int>(next_pow2(static_cast<std::size_t>(nyquist)));
  } else {
    if (M < nyquist)
      throw AliasRisk("grid resolution below k*N+1 aliases the power");
    if (!is_pow2(static_cast<std::size_t>(M)))
      throw AliasRisk("grid resolution must be a power of two");
  }
  GridField y = spectral_to_grid(f, M);
  const double sig = tadpole(N, f.time_t);
  GridField out = y;
  out.dealias_degree = k * N;
  const std::size_t n = y.values.size();
  if (k == 2) {
    for (std::size_t i = 0; i < n; ++i) {
      const double v = y.values[i];
      out.values[i] = v * v - sig;
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const double v = y.values[i];
      out.values[i] = v * v * v - 3.0 * sig * v;
    }
  }
  return out;
}

}  // namespace phi3lab
