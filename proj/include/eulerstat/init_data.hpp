#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "eulerstat/errors.hpp"
#include "eulerstat/random.hpp"
#include "eulerstat/spectral_field.hpp"

// Generators take unit coordinates xi in [0,1)^2 and map them to the torus by
// x = 2 pi xi. Velocity amplitudes are not rescaled.

namespace eulerstat {

enum class Family { flat_sheet, sinusoidal_sheet, fbm, taylor_green };

inline std::string to_string(Family f) {
  switch (f) {
    case Family::flat_sheet: return "flat_sheet";
    case Family::sinusoidal_sheet: return "sinusoidal_sheet";
    case Family::fbm: return "fbm";
    case Family::taylor_green: return "taylor_green";
  }
  return "unknown";
}

inline Family family_from_string(const std::string& s) {
  if (s == "flat_sheet") return Family::flat_sheet;
  if (s == "sinusoidal_sheet") return Family::sinusoidal_sheet;
  if (s == "fbm") return Family::fbm;
  if (s == "taylor_green") return Family::taylor_green;
  throw ArgumentError("unknown initial-data family '" + s + "'");
}

struct InitialMeasureSpec {
  Family family = Family::flat_sheet;
  /// Smoothing length in unit coordinates; 0 selects the discontinuous sheet.
  double rho = 0.1;
  /// Interface perturbation amplitude.
  double delta = 0.025;
  /// Number of perturbation modes.
  int q = 10;
  /// Sinusoidal sheet amplitude.
  double d = 0.2;
  /// Quadrature points per mollifier radius (sinusoidal sheet).
  int Q = 400;
  /// Hurst index (fBm).
  double H = 0.5;
  std::uint64_t base_seed = 0;
  int N = 64;

  void validate() const {
    if (N < 1) throw ArgumentError("N must be positive");
    if (rho < 0.0) throw ArgumentError("rho must be >= 0");
    if (delta < 0.0) throw ArgumentError("delta must be >= 0");
    if (q < 0) throw ArgumentError("q must be >= 0");
    if (family == Family::sinusoidal_sheet) {
      if (rho <= 0.0) throw ArgumentError("sinusoidal sheet requires rho > 0");
      if (Q < 1) throw ArgumentError("Q must be >= 1");
    }
    if (family == Family::fbm && !(H > 0.0 && H < 1.0))
      throw ArgumentError("Hurst index must lie in (0, 1)");
  }
};

/// Seed recorded for sample `index`; also seeds its interface perturbation.
inline std::uint64_t sample_seed(std::uint64_t base, std::uint64_t index) {
  return derive_seed(base, index, 0);
}

struct PerturbationDraw {
  std::vector<double> alphas;
  std::vector<double> betas;
};

/// alpha_k = delta * U(0,1), beta_k = U[0, 2pi), drawn in that order.
inline PerturbationDraw draw_perturbation(int q, double delta, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  PerturbationDraw draw;
  for (int k = 0; k < q; ++k) {
    double a = unit(rng);
    while (a == 0.0) a = unit(rng);
    draw.alphas.push_back(delta * a);
  }
  for (int k = 0; k < q; ++k) draw.betas.push_back(two_pi * unit(rng));
  return draw;
}

/// sigma(x1) = sum_k alpha_k sin(2 pi x1 - beta_k), x1 in unit coordinates.
inline double perturbation(const PerturbationDraw& draw, double x1) {
  double s = 0.0;
  for (std::size_t k = 0; k < draw.alphas.size(); ++k)
    s += draw.alphas[k] * std::sin(two_pi * x1 - draw.betas[k]);
  return s;
}

/// Horizontal velocity of the flat sheet at unit height x2 (wrapped into
/// [0,1)): tanh layers at 1/4 and 3/4, or the +-1 step when rho == 0.
inline double flat_sheet_profile(double rho, double x2) {
  x2 -= std::floor(x2);
  if (rho == 0.0) return (x2 > 0.25 && x2 <= 0.75) ? 1.0 : -1.0;
  return x2 <= 0.5 ? std::tanh((x2 - 0.25) / rho) : std::tanh((0.75 - x2) / rho);
}

/// Third-order B-spline mollifier, supported on r < 1.
inline double bspline_mollifier(double r) {
  auto cube = [](double v) { return v > 0.0 ? v * v * v : 0.0; };
  if (r >= 1.0) return 0.0;
  return 80.0 / (7.0 * std::numbers::pi) *
         (cube(r + 1.0) - 4.0 * cube(r + 0.5) + 6.0 * cube(r) - 4.0 * cube(r - 0.5) +
          cube(r - 1.0));
}

/// Samples `u` at (x1_j, x2_j + shift[j1]) on an m-point grid, where x2 is
/// displaced by a per-column amount (torus units).
inline VectorGrid sample_with_column_shift(const SpectralField& u, std::size_t m,
                                           const std::vector<double>& shift) {
  const int n = u.resolution();
  detail::require_synthesis_grid(n, m);
  const std::size_t side = u.side();
  VectorGrid g(m);
  std::vector<complex> e1(side), v1(side), v2(side);
  for (std::size_t j1 = 0; j1 < m; ++j1) {
    const double x1 = grid_coordinate(j1, m);
    for (int k = -n; k <= n; ++k) e1[k + n] = std::polar(1.0, k * x1);
    for (int k2 = -n; k2 <= n; ++k2) {
      complex s1{}, s2{};
      for (int k1 = -n; k1 <= n; ++k1) {
        const Vec2c& c = u.at(k1, k2);
        s1 += c.x * e1[k1 + n];
        s2 += c.y * e1[k1 + n];
      }
      v1[k2 + n] = s1;
      v2[k2 + n] = s2;
    }
    for (std::size_t j2 = 0; j2 < m; ++j2) {
      const double x2 = grid_coordinate(j2, m) + shift[j1];
      double r1 = 0.0, r2 = 0.0;
      for (int k2 = -n; k2 <= n; ++k2) {
        const complex e = std::polar(1.0, k2 * x2);
        r1 += (v1[k2 + n] * e).real();
        r2 += (v2[k2 + n] * e).real();
      }
      g.u1[j1 * m + j2] = r1;
      g.u2[j1 * m + j2] = r2;
    }
  }
  return g;
}

/// P(U^rho(x1, x2 + sigma(x1))) for the perturbed flat vortex sheet.
inline SpectralField flat_sheet_sample(const InitialMeasureSpec& spec, std::uint64_t index) {
  spec.validate();
  Rng rng = make_rng(sample_seed(spec.base_seed, index));
  const PerturbationDraw draw = draw_perturbation(spec.q, spec.delta, rng);
  const std::size_t m = default_grid_points(spec.N);
  VectorGrid g(m);
  for (std::size_t j1 = 0; j1 < m; ++j1) {
    const double xi1 = static_cast<double>(j1) / static_cast<double>(m);
    const double sigma = perturbation(draw, xi1);
    for (std::size_t j2 = 0; j2 < m; ++j2) {
      const double xi2 = static_cast<double>(j2) / static_cast<double>(m);
      g.u1[j1 * m + j2] = flat_sheet_profile(spec.rho, xi2 + sigma);
    }
  }
  return leray_project(from_physical(g, spec.N));
}

/// Mollified vorticity of the sheet y = d sin(2 pi x) on an m-point grid (unit
/// coordinates), by the line quadrature with nodes xi_i = x1 + i rho/Q,
/// i in [-Q, Q].
inline ScalarGrid sinusoidal_sheet_vorticity(double rho, double d, int Q, std::size_t m) {
  ScalarGrid w(m);
  const double h = rho / Q;
  const std::size_t nodes = 2 * static_cast<std::size_t>(Q) + 1;
  std::vector<double> dx(nodes), gy(nodes), weight(nodes);
  for (std::size_t j1 = 0; j1 < m; ++j1) {
    const double x1 = static_cast<double>(j1) / static_cast<double>(m);
    for (int i = -Q; i <= Q; ++i) {
      const double xi = x1 + i * h;
      const double slope = two_pi * d * std::cos(two_pi * xi);
      const std::size_t s = static_cast<std::size_t>(i + Q);
      dx[s] = -i * h;
      gy[s] = d * std::sin(two_pi * xi);
      weight[s] = h * std::sqrt(1.0 + slope * slope) / (rho * rho);
    }
    for (std::size_t j2 = 0; j2 < m; ++j2) {
      const double x2 = static_cast<double>(j2) / static_cast<double>(m);
      double acc = 0.0;
      for (std::size_t s = 0; s < nodes; ++s) {
        double dy = x2 - gy[s];
        dy -= std::round(dy);
        if (std::abs(dy) >= rho) continue;
        const double r = std::sqrt(dx[s] * dx[s] + dy * dy) / rho;
        if (r < 1.0) acc += weight[s] * bspline_mollifier(r);
      }
      w(j1, j2) = acc;
    }
  }
  return w;
}

/// P(U^rho(x1, x2 + sigma(x1))) where curl U^rho is the mean-free mollified
/// sinusoidal sheet vorticity.
inline SpectralField sinusoidal_sheet_sample(const InitialMeasureSpec& spec,
                                             std::uint64_t index) {
  spec.validate();
  if (spec.rho <= 0.0) throw ArgumentError("sinusoidal sheet requires rho > 0");
  Rng rng = make_rng(sample_seed(spec.base_seed, index));
  const PerturbationDraw draw = draw_perturbation(spec.q, spec.delta, rng);
  const std::size_t m = default_grid_points(spec.N);
  // from_physical drops the mean; d/dxi = 2 pi d/dx converts the curl.
  ScalarSpectralField w =
      from_physical(sinusoidal_sheet_vorticity(spec.rho, spec.d, spec.Q, m), spec.N);
  w *= 1.0 / two_pi;
  const SpectralField sheet = velocity_from_vorticity(w);
  std::vector<double> shift(m);
  for (std::size_t j1 = 0; j1 < m; ++j1)
    shift[j1] = two_pi * perturbation(draw, static_cast<double>(j1) / static_cast<double>(m));
  return leray_project(from_physical(sample_with_column_shift(sheet, m, shift), spec.N));
}

/// Periodic random midpoint displacement on a 2^levels square lattice. Each
/// level halves the spacing: edge midpoints are the mean of their two
/// endpoints, cell centres the mean of the four corners, and every new node
/// gets an N(0, sigma_l^2) displacement with sigma_l = 2^(-l H).
inline ScalarGrid fbm_surface(int levels, double hurst, Rng& rng) {
  if (levels < 1) throw ArgumentError("fBm surface needs at least one level");
  const std::size_t m = std::size_t{1} << levels;
  ScalarGrid g(m);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto at = [&](std::size_t i, std::size_t j) -> double& { return g(i % m, j % m); };
  at(0, 0) = normal(rng);
  for (int l = 1; l <= levels; ++l) {
    const std::size_t step = m >> (l - 1);
    const std::size_t half = step / 2;
    const double sigma = std::pow(2.0, -l * hurst);
    for (std::size_t i = 0; i < m; i += step)
      for (std::size_t j = 0; j < m; j += step) {
        at(i + half, j) = 0.5 * (at(i, j) + at(i + step, j)) + sigma * normal(rng);
        at(i, j + half) = 0.5 * (at(i, j) + at(i, j + step)) + sigma * normal(rng);
      }
    for (std::size_t i = half; i < m; i += step)
      for (std::size_t j = half; j < m; j += step)
        at(i, j) = 0.25 * (at(i - half, j - half) + at(i - half, j + half) +
                           at(i + half, j - half) + at(i + half, j + half)) +
                   sigma * normal(rng);
  }
  return g;
}

/// Number of dyadic levels used for an fBm sample at resolution n.
inline int fbm_levels(int n) {
  int levels = 1;
  while ((std::size_t{1} << levels) < 2 * static_cast<std::size_t>(n) + 1) ++levels;
  return levels;
}

/// Two independent fBm surfaces as (u1, u2), mean removed, then projected.
inline SpectralField fbm_sample(const InitialMeasureSpec& spec, std::uint64_t index) {
  spec.validate();
  const int levels = fbm_levels(spec.N);
  VectorGrid g(std::size_t{1} << levels);
  for (int c = 1; c <= 2; ++c) {
    Rng rng = make_rng(derive_seed(spec.base_seed, index, static_cast<std::uint64_t>(c)));
    ScalarGrid s = fbm_surface(levels, spec.H, rng);
    (c == 1 ? g.u1 : g.u2) = std::move(s.v);
  }
  return leray_project(from_physical(g, spec.N));
}

/// u = (sin x1 cos x2, -cos x1 sin x2).
inline SpectralField taylor_green_field(int n) {
  const std::size_t m = default_grid_points(std::max(n, 1));
  VectorGrid g(m);
  for (std::size_t j1 = 0; j1 < m; ++j1)
    for (std::size_t j2 = 0; j2 < m; ++j2) {
      const double x1 = grid_coordinate(j1, m), x2 = grid_coordinate(j2, m);
      g.u1[j1 * m + j2] = std::sin(x1) * std::cos(x2);
      g.u2[j1 * m + j2] = -std::cos(x1) * std::sin(x2);
    }
  return from_physical(g, n);
}

/// Initial field of sample `index` drawn from `spec`.
inline SpectralField generate_sample(const InitialMeasureSpec& spec, std::uint64_t index) {
  switch (spec.family) {
    case Family::flat_sheet: return flat_sheet_sample(spec, index);
    case Family::sinusoidal_sheet: return sinusoidal_sheet_sample(spec, index);
    case Family::fbm: return fbm_sample(spec, index);
    case Family::taylor_green: return taylor_green_field(spec.N);
  }
  throw ArgumentError("unknown family");
}

}  // namespace eulerstat
