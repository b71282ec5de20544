#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "eulerstat/errors.hpp"
#include "eulerstat/fft.hpp"

namespace eulerstat {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Fourier coefficient of a 2D velocity field: one complex amplitude per
/// component.
struct Vec2c {
  complex x{};
  complex y{};

  Vec2c& operator+=(const Vec2c& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  Vec2c& operator-=(const Vec2c& o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  Vec2c& operator*=(double a) {
    x *= a;
    y *= a;
    return *this;
  }
  Vec2c& operator*=(complex a) {
    x *= a;
    y *= a;
    return *this;
  }
  friend Vec2c operator+(Vec2c a, const Vec2c& b) { return a += b; }
  friend Vec2c operator-(Vec2c a, const Vec2c& b) { return a -= b; }
  friend Vec2c operator*(double s, Vec2c a) { return a *= s; }
  friend Vec2c operator*(complex s, Vec2c a) { return a *= s; }
  friend bool operator==(const Vec2c&, const Vec2c&) = default;
};

inline Vec2c conj(const Vec2c& v) { return {std::conj(v.x), std::conj(v.y)}; }
inline double abs2(const Vec2c& v) { return std::norm(v.x) + std::norm(v.y); }
inline double abs2(const complex& v) { return std::norm(v); }
inline complex conj_value(const complex& v) { return std::conj(v); }
inline Vec2c conj_value(const Vec2c& v) { return conj(v); }

/// Fourier coefficients on the square |k|_inf <= N of a real field on the
/// 2pi-periodic torus, u(x) = sum_k c(k) exp(i k.x). The full square is
/// stored (k1 outer, k2 inner); Hermitian symmetry and the zero mean mode
/// are restored by enforce_invariants().
template <class Coeff>
class BasicSpectralField {
 public:
  using value_type = Coeff;

  BasicSpectralField() = default;
  explicit BasicSpectralField(int n) : n_(n), c_(side_of(n) * side_of(n)) {
    if (n < 1) throw ArgumentError("resolution must be positive");
  }

  int resolution() const { return n_; }
  std::size_t side() const { return side_of(n_); }
  std::size_t size() const { return c_.size(); }

  std::size_t index(int k1, int k2) const {
    return static_cast<std::size_t>(k1 + n_) * side() +
           static_cast<std::size_t>(k2 + n_);
  }
  bool contains(int k1, int k2) const {
    return std::abs(k1) <= n_ && std::abs(k2) <= n_;
  }

  Coeff& at(int k1, int k2) { return c_[index(k1, k2)]; }
  const Coeff& at(int k1, int k2) const { return c_[index(k1, k2)]; }

  std::span<Coeff> coeffs() { return c_; }
  std::span<const Coeff> coeffs() const { return c_; }

  /// Visits every mode as f(k1, k2, coeff).
  template <class F>
  void for_each(F&& f) {
    std::size_t i = 0;
    for (int k1 = -n_; k1 <= n_; ++k1)
      for (int k2 = -n_; k2 <= n_; ++k2) f(k1, k2, c_[i++]);
  }
  template <class F>
  void for_each(F&& f) const {
    std::size_t i = 0;
    for (int k1 = -n_; k1 <= n_; ++k1)
      for (int k2 = -n_; k2 <= n_; ++k2) f(k1, k2, c_[i++]);
  }

  /// c(k) <- (c(k) + conj c(-k))/2, c(0) <- 0.
  void enforce_invariants() {
    const std::size_t last = c_.size() - 1;
    for (std::size_t i = 0; i < c_.size() / 2; ++i) {
      Coeff sym = 0.5 * (c_[i] + conj_value(c_[last - i]));
      c_[i] = sym;
      c_[last - i] = conj_value(sym);
    }
    c_[c_.size() / 2] = Coeff{};
  }

  /// Sum of |c(k)|^2 over all modes (modal energy normalization).
  double energy() const {
    double e = 0.0;
    for (const auto& c : c_) e += abs2(c);
    return e;
  }

  bool all_finite() const {
    for (const auto& c : c_)
      if (!std::isfinite(abs2(c))) return false;
    return true;
  }

  BasicSpectralField& operator+=(const BasicSpectralField& o) {
    check_same(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  BasicSpectralField& operator-=(const BasicSpectralField& o) {
    check_same(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  BasicSpectralField& operator*=(double a) {
    for (auto& c : c_) c *= a;
    return *this;
  }
  friend BasicSpectralField operator+(BasicSpectralField a,
                                      const BasicSpectralField& b) {
    return a += b;
  }
  friend BasicSpectralField operator-(BasicSpectralField a,
                                      const BasicSpectralField& b) {
    return a -= b;
  }
  friend BasicSpectralField operator*(double s, BasicSpectralField a) {
    return a *= s;
  }
  friend bool operator==(const BasicSpectralField&,
                         const BasicSpectralField&) = default;

 private:
  static std::size_t side_of(int n) { return 2 * static_cast<std::size_t>(n) + 1; }
  void check_same(const BasicSpectralField& o) const {
    if (o.n_ != n_) throw ArgumentError("resolution mismatch");
  }

  int n_ = 0;
  std::vector<Coeff> c_;
};

using SpectralField = BasicSpectralField<Vec2c>;
using ScalarSpectralField = BasicSpectralField<complex>;

/// Real samples on the m x m grid x_j = 2pi j/m, row-major with j1 (the x1
/// index) outer.
struct ScalarGrid {
  std::size_t m = 0;
  std::vector<double> v;

  ScalarGrid() = default;
  explicit ScalarGrid(std::size_t points) : m(points), v(points * points) {}
  double& operator()(std::size_t j1, std::size_t j2) { return v[j1 * m + j2]; }
  double operator()(std::size_t j1, std::size_t j2) const { return v[j1 * m + j2]; }
};

struct VectorGrid {
  std::size_t m = 0;
  std::vector<double> u1;
  std::vector<double> u2;

  VectorGrid() = default;
  explicit VectorGrid(std::size_t points)
      : m(points), u1(points * points), u2(points * points) {}
};

inline double grid_coordinate(std::size_t j, std::size_t m) {
  return two_pi * static_cast<double>(j) / static_cast<double>(m);
}

namespace detail {

inline std::size_t wrap(int k, std::size_t m) {
  const int mm = static_cast<int>(m);
  return static_cast<std::size_t>(((k % mm) + mm) % mm);
}

inline void require_synthesis_grid(int n, std::size_t m) {
  if (m < 2 * static_cast<std::size_t>(n) + 1)
    throw ResolutionError("grid of " + std::to_string(m) +
                          " points cannot resolve modes up to N=" +
                          std::to_string(n) + " (need >= 2N+1)");
}

}  // namespace detail

/// Default physical grid for a resolution-N field.
inline std::size_t default_grid_points(int n) { return 3 * static_cast<std::size_t>(n); }

/// Synthesis u(x_j) = sum_k c(k) exp(i k.x_j). Both real components come
/// out of a single complex transform of c1 + i c2.
inline VectorGrid to_physical(const SpectralField& f, std::size_t m) {
  const int n = f.resolution();
  detail::require_synthesis_grid(n, m);
  std::vector<complex> z(m * m);
  f.for_each([&](int k1, int k2, const Vec2c& c) {
    z[detail::wrap(k1, m) * m + detail::wrap(k2, m)] = c.x + complex(0, 1) * c.y;
  });
  fft2d(z, m, true);
  VectorGrid g(m);
  for (std::size_t i = 0; i < z.size(); ++i) {
    g.u1[i] = z[i].real();
    g.u2[i] = z[i].imag();
  }
  return g;
}

inline VectorGrid to_physical(const SpectralField& f) {
  return to_physical(f, default_grid_points(f.resolution()));
}

inline ScalarGrid to_physical(const ScalarSpectralField& f, std::size_t m) {
  const int n = f.resolution();
  detail::require_synthesis_grid(n, m);
  std::vector<complex> z(m * m);
  f.for_each([&](int k1, int k2, const complex& c) {
    z[detail::wrap(k1, m) * m + detail::wrap(k2, m)] = c;
  });
  fft2d(z, m, true);
  ScalarGrid g(m);
  for (std::size_t i = 0; i < z.size(); ++i) g.v[i] = z[i].real();
  return g;
}

/// Analysis followed by the truncation P_N; the mean mode is dropped.
inline SpectralField from_physical(const VectorGrid& g, int n) {
  if (g.u1.size() != g.m * g.m || g.u2.size() != g.m * g.m)
    throw ShapeError("velocity grid is not square");
  detail::require_synthesis_grid(n, g.m);
  const std::size_t m = g.m;
  std::vector<complex> z(m * m);
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = complex(g.u1[i], g.u2[i]);
  fft2d(z, m, false);
  const double scale = 1.0 / static_cast<double>(m * m);
  SpectralField f(n);
  f.for_each([&](int k1, int k2, Vec2c& c) {
    const complex zp = z[detail::wrap(k1, m) * m + detail::wrap(k2, m)] * scale;
    const complex zm =
        std::conj(z[detail::wrap(-k1, m) * m + detail::wrap(-k2, m)]) * scale;
    c.x = 0.5 * (zp + zm);
    c.y = complex(0, -0.5) * (zp - zm);
  });
  f.at(0, 0) = {};
  return f;
}

inline ScalarSpectralField from_physical(const ScalarGrid& g, int n) {
  if (g.v.size() != g.m * g.m) throw ShapeError("scalar grid is not square");
  detail::require_synthesis_grid(n, g.m);
  const std::size_t m = g.m;
  std::vector<complex> z(g.v.begin(), g.v.end());
  fft2d(z, m, false);
  const double scale = 1.0 / static_cast<double>(m * m);
  ScalarSpectralField f(n);
  f.for_each([&](int k1, int k2, complex& c) {
    c = z[detail::wrap(k1, m) * m + detail::wrap(k2, m)] * scale;
  });
  f.enforce_invariants();
  return f;
}

/// Point evaluation by direct summation; exact synthesis at arbitrary x.
inline std::pair<double, double> evaluate_at(const SpectralField& f, double x1,
                                             double x2) {
  const int n = f.resolution();
  std::vector<complex> e2(f.side());
  for (int k2 = -n; k2 <= n; ++k2) e2[k2 + n] = std::polar(1.0, k2 * x2);
  complex s1{}, s2{};
  for (int k1 = -n; k1 <= n; ++k1) {
    complex r1{}, r2{};
    for (int k2 = -n; k2 <= n; ++k2) {
      const Vec2c& c = f.at(k1, k2);
      r1 += c.x * e2[k2 + n];
      r2 += c.y * e2[k2 + n];
    }
    const complex e1 = std::polar(1.0, k1 * x1);
    s1 += r1 * e1;
    s2 += r2 * e1;
  }
  return {s1.real(), s2.real()};
}

/// c(k) <- (I - k k^T/|k|^2) c(k).
inline SpectralField leray_project(SpectralField f) {
  f.for_each([](int k1, int k2, Vec2c& c) {
    if (k1 == 0 && k2 == 0) {
      c = {};
      return;
    }
    const double kk = static_cast<double>(k1 * k1 + k2 * k2);
    const complex kc = (static_cast<double>(k1) * c.x + static_cast<double>(k2) * c.y) / kk;
    c.x -= static_cast<double>(k1) * kc;
    c.y -= static_cast<double>(k2) * kc;
  });
  return f;
}

/// max_k |k . c(k)|.
inline double max_divergence(const SpectralField& f) {
  double worst = 0.0;
  f.for_each([&](int k1, int k2, const Vec2c& c) {
    worst = std::max(worst, std::abs(static_cast<double>(k1) * c.x +
                                     static_cast<double>(k2) * c.y));
  });
  return worst;
}

/// omega(k) = i (k1 u2(k) - k2 u1(k)).
inline ScalarSpectralField vorticity(const SpectralField& u) {
  ScalarSpectralField w(u.resolution());
  u.for_each([&](int k1, int k2, const Vec2c& c) {
    w.at(k1, k2) = complex(0, 1) * (static_cast<double>(k1) * c.y -
                                    static_cast<double>(k2) * c.x);
  });
  return w;
}

/// Divergence-free velocity with curl u = omega:
/// u(k) = i (k2, -k1) omega(k)/|k|^2.
inline SpectralField velocity_from_vorticity(const ScalarSpectralField& w,
                                             double mean_tolerance = 1e-12) {
  if (std::abs(w.at(0, 0)) > mean_tolerance)
    throw DomainError("vorticity must have zero mean on the torus");
  SpectralField u(w.resolution());
  w.for_each([&](int k1, int k2, const complex& c) {
    if (k1 == 0 && k2 == 0) return;
    const double kk = static_cast<double>(k1 * k1 + k2 * k2);
    const complex s = complex(0, 1) * c / kk;
    u.at(k1, k2) = {static_cast<double>(k2) * s, -static_cast<double>(k1) * s};
  });
  return u;
}

/// ((2pi)^2 sum_k (1+|k|^2)^e |c(k)|^2)^(1/2); e = 0 is the L2 norm.
template <class Coeff>
double sobolev_norm(const BasicSpectralField<Coeff>& f, double e) {
  double s = 0.0;
  f.for_each([&](int k1, int k2, const Coeff& c) {
    const double w = e == 0.0 ? 1.0 : std::pow(1.0 + k1 * k1 + k2 * k2, e);
    s += w * abs2(c);
  });
  return two_pi * std::sqrt(s);
}

template <class Coeff>
double l2_norm(const BasicSpectralField<Coeff>& f) {
  return sobolev_norm(f, 0.0);
}

/// Keeps |k|_inf <= n_coarse.
template <class Coeff>
BasicSpectralField<Coeff> truncate_to(const BasicSpectralField<Coeff>& f,
                                      int n_coarse) {
  if (n_coarse > f.resolution() || n_coarse < 1)
    throw ArgumentError("truncation target must lie in [1, N]");
  BasicSpectralField<Coeff> out(n_coarse);
  out.for_each([&](int k1, int k2, Coeff& c) { c = f.at(k1, k2); });
  return out;
}

/// Zero-padded copy at a finer resolution.
template <class Coeff>
BasicSpectralField<Coeff> embed_into(const BasicSpectralField<Coeff>& f,
                                     int n_fine) {
  if (n_fine < f.resolution())
    throw ArgumentError("embedding target must be >= N");
  BasicSpectralField<Coeff> out(n_fine);
  f.for_each([&](int k1, int k2, const Coeff& c) { out.at(k1, k2) = c; });
  return out;
}

}  // namespace eulerstat
