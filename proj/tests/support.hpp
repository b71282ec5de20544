#pragma once

#include <cmath>
#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "eulerstat/spectral_field.hpp"
#include "eulerstat/transport.hpp"

namespace testing_support {

using eulerstat::complex;
using eulerstat::SpectralField;
using eulerstat::ScalarSpectralField;
using eulerstat::Vec2c;

/// Random divergence-free field with modes 0 < |k|^2 <= kk_max and
/// |u_k| ~ |k|^(-slope). Normalized to modal energy `energy` when > 0.
inline SpectralField random_field(int n, int kk_max, std::uint64_t seed, double slope = 0.0,
                                  double energy = 0.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  SpectralField f(n);
  f.for_each([&](int k1, int k2, Vec2c& c) {
    const int kk = k1 * k1 + k2 * k2;
    if (kk == 0 || kk > kk_max) return;
    const double amp = std::pow(static_cast<double>(kk), -0.5 * slope);
    const complex a(g(rng), g(rng));
    // direction perpendicular to k
    const double norm = std::sqrt(static_cast<double>(kk));
    c = Vec2c{amp * a * (-k2 / norm), amp * a * (k1 / norm)};
  });
  f.enforce_invariants();
  if (energy > 0.0) f *= std::sqrt(energy / f.energy());
  return f;
}

inline ScalarSpectralField random_scalar(int n, int kk_max, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  ScalarSpectralField f(n);
  f.for_each([&](int k1, int k2, complex& c) {
    const int kk = k1 * k1 + k2 * k2;
    if (kk > 0 && kk <= kk_max) c = complex(g(rng), g(rng));
  });
  f.enforce_invariants();
  return f;
}

/// Random field with no divergence-free constraint.
inline SpectralField random_raw_field(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  SpectralField f(n);
  for (auto& c : f.coeffs()) c = Vec2c{complex(g(rng), g(rng)), complex(g(rng), g(rng))};
  f.enforce_invariants();
  return f;
}

inline double max_abs_diff(const SpectralField& a, const SpectralField& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    d = std::max(d, std::sqrt(eulerstat::abs2(a.coeffs()[i] - b.coeffs()[i])));
  return d;
}

inline bool hermitian(const SpectralField& f, double tol) {
  bool ok = true;
  const int n = f.resolution();
  for (int k1 = -n; k1 <= n; ++k1)
    for (int k2 = -n; k2 <= n; ++k2)
      ok = ok && std::sqrt(eulerstat::abs2(f.at(k1, k2) - eulerstat::conj(f.at(-k1, -k2)))) <= tol;
  return ok && eulerstat::abs2(f.at(0, 0)) == 0.0;
}

/// W1 by enumerating all m! matchings.
inline double brute_force_w1(const eulerstat::PointCloud& a, const eulerstat::PointCloud& b) {
  std::vector<std::size_t> perm(a.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = INFINITY;
  do {
    double s = 0.0;
    for (std::size_t i = 0; i < perm.size(); ++i) s += eulerstat::euclidean(a, i, b, perm[i]);
    best = std::min(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best / static_cast<double>(a.size());
}

inline eulerstat::PointCloud random_cloud(std::size_t m, std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  eulerstat::PointCloud c(d);
  std::vector<double> p(d);
  for (std::size_t i = 0; i < m; ++i) {
    for (auto& v : p) v = g(rng);
    c.add(p);
  }
  return c;
}

}  // namespace testing_support
