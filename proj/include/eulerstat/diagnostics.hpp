#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "eulerstat/ensemble.hpp"
#include "eulerstat/errors.hpp"
#include "eulerstat/spectral_field.hpp"

namespace eulerstat {

/// (abscissa, value) pairs: structure functions S(r), spectra E(K), ...
struct ScalarCurve {
  std::string kind;
  double time = 0.0;
  int N = 0;
  std::size_t m = 0;
  std::vector<double> abscissa;
  std::vector<double> values;

  std::size_t size() const { return abscissa.size(); }
};

struct ExponentFit {
  double exponent = 0.0;
  double intercept = 0.0;
  double r_min = 0.0;
  double r_max = 0.0;
  /// RMS misfit in log space.
  double residual = 0.0;
  std::size_t points = 0;
};

/// Disk average of |exp(i k.h) - 1|^2 over |h| <= r, as a function of
/// rho = |k| r: W(rho) = 2 (1 - 2 J1(rho)/rho).
inline double structure_kernel(double rho) {
  rho = std::abs(rho);
  if (rho < 0.5) {
    // 2 J1(rho)/rho = sum_j (-1)^j (rho/2)^(2j) / (j! (j+1)!)
    const double q = 0.25 * rho * rho;
    double term = 1.0, sum = 0.0;
    for (int j = 1; j <= 8; ++j) {
      term *= -q / (static_cast<double>(j) * static_cast<double>(j + 1));
      sum += term;
    }
    return -2.0 * sum;
  }
  return 2.0 * (1.0 - 2.0 * std::cyl_bessel_j(1.0, rho) / rho);
}

/// 24 logarithmically spaced correlation lengths in [2pi/(2N), pi/2].
inline std::vector<double> default_r_grid(int n, std::size_t count = 24) {
  const double lo = two_pi / (2.0 * n), hi = std::numbers::pi / 2.0;
  std::vector<double> r(count);
  for (std::size_t i = 0; i < count; ++i)
    r[i] = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(count - 1));
  return r;
}

namespace detail {

/// Ensemble-averaged |u_k|^2 binned by the integer |k|^2.
inline std::vector<double> power_by_k2(const EnsembleSnapshot& snap) {
  if (snap.fields.empty()) throw ArgumentError("empty ensemble");
  const int n = snap.fields.front().resolution();
  std::vector<double> p(2 * static_cast<std::size_t>(n) * n + 1, 0.0);
  for (const auto& f : snap.fields) {
    if (f.resolution() != n) throw ArgumentError("ensemble mixes resolutions");
    f.for_each([&](int k1, int k2, const Vec2c& c) {
      p[static_cast<std::size_t>(k1 * k1 + k2 * k2)] += abs2(c);
    });
  }
  const double inv_m = 1.0 / static_cast<double>(snap.fields.size());
  for (auto& v : p) v *= inv_m;
  return p;
}

}  // namespace detail

/// S(r) = ((1/m) sum_i (2pi)^2 sum_k W(|k| r) |u_i(k)|^2)^(1/2), which equals
/// the ensemble average of int_D avg_{B_r} |u(x+h) - u(x)|^2 dh dx.
inline ScalarCurve structure_function(const EnsembleSnapshot& snap,
                                      const std::vector<double>& r_values) {
  for (double r : r_values)
    if (!(r > 0.0) || r > std::numbers::pi + 1e-12)
      throw ArgumentError("correlation lengths must lie in (0, pi]");
  if (!std::is_sorted(r_values.begin(), r_values.end()))
    throw ArgumentError("correlation lengths must be increasing");
  const std::vector<double> p = detail::power_by_k2(snap);
  ScalarCurve curve{"structure", snap.time, snap.N, snap.size(), r_values, {}};
  for (double r : r_values) {
    double s = 0.0;
    for (std::size_t kk = 1; kk < p.size(); ++kk)
      if (p[kk] != 0.0) s += structure_kernel(std::sqrt(static_cast<double>(kk)) * r) * p[kk];
    curve.values.push_back(two_pi * std::sqrt(s));
  }
  return curve;
}

inline ScalarCurve structure_function(const EnsembleSnapshot& snap) {
  return structure_function(snap, default_r_grid(snap.N));
}

/// Time-integrated structure function (int S(r,t)^2 dt)^(1/2) from curves at
/// increasing times, by the trapezoidal rule.
inline ScalarCurve time_integrated_structure_function(std::span<const ScalarCurve> curves) {
  if (curves.size() < 2) throw ArgumentError("need at least two times");
  ScalarCurve out = curves.front();
  out.kind = "structure_time_integrated";
  out.time = curves.back().time;
  std::fill(out.values.begin(), out.values.end(), 0.0);
  for (std::size_t t = 1; t < curves.size(); ++t) {
    const double dt = curves[t].time - curves[t - 1].time;
    if (curves[t].abscissa != out.abscissa) throw ArgumentError("curves use different r-grids");
    for (std::size_t i = 0; i < out.values.size(); ++i)
      out.values[i] += 0.5 * dt *
                       (curves[t].values[i] * curves[t].values[i] +
                        curves[t - 1].values[i] * curves[t - 1].values[i]);
  }
  for (auto& v : out.values) v = std::sqrt(v);
  return out;
}

/// Largest shell index needed to cover every mode of a resolution-n field.
inline int max_shell(int n) {
  int k = static_cast<int>(std::ceil(std::sqrt(2.0) * n));
  while ((k - 1) * (k - 1) >= 2 * n * n) --k;
  while (k * k < 2 * n * n) ++k;
  return k;
}

/// E(K) = (1/m) sum_i 1/2 sum_{K-1 < |k| <= K} |u_i(k)|^2, K = 1..K_max.
inline ScalarCurve energy_spectrum(const EnsembleSnapshot& snap, int k_max) {
  if (k_max < 1 || k_max > max_shell(snap.N))
    throw ArgumentError("K_max must lie in [1, ceil(N sqrt 2)]");
  const std::vector<double> p = detail::power_by_k2(snap);
  ScalarCurve curve{"spectrum", snap.time, snap.N, snap.size(), {}, {}};
  curve.values.assign(static_cast<std::size_t>(k_max), 0.0);
  int shell = 1;
  for (std::size_t kk = 1; kk < p.size(); ++kk) {
    while (static_cast<std::size_t>(shell) * static_cast<std::size_t>(shell) < kk) ++shell;
    if (shell > k_max) break;
    curve.values[static_cast<std::size_t>(shell - 1)] += 0.5 * p[kk];
  }
  for (int k = 1; k <= k_max; ++k) curve.abscissa.push_back(k);
  return curve;
}

inline ScalarCurve energy_spectrum(const EnsembleSnapshot& snap) {
  return energy_spectrum(snap, max_shell(snap.N));
}

/// K^gamma E(K).
inline ScalarCurve compensated_spectrum(ScalarCurve curve, double gamma) {
  for (std::size_t i = 0; i < curve.size(); ++i)
    curve.values[i] *= std::pow(curve.abscissa[i], gamma);
  curve.kind = "compensated_spectrum";
  return curve;
}

/// Least-squares line through (log abscissa, log value) on [r_min, r_max].
inline ExponentFit fit_exponent(const ScalarCurve& curve, double r_min, double r_max) {
  std::vector<double> xs, ys;
  const double lo = r_min * (1.0 - 1e-12), hi = r_max * (1.0 + 1e-12);
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const double r = curve.abscissa[i];
    if (r < lo || r > hi) continue;
    if (!(curve.values[i] > 0.0))
      throw DomainError("cannot fit a power law through nonpositive values");
    xs.push_back(std::log(r));
    ys.push_back(std::log(curve.values[i]));
  }
  if (xs.size() < 3) throw ArgumentError("fit range holds fewer than 3 points");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  ExponentFit fit;
  fit.exponent = sxy / sxx;
  fit.intercept = my - fit.exponent * mx;
  fit.r_min = r_min;
  fit.r_max = r_max;
  fit.points = xs.size();
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - (fit.intercept + fit.exponent * xs[i]);
    ss += e * e;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

/// Default structure-function fit window: [2, 20] grid cells (cell = 2pi/N),
/// capped at pi/2.
inline std::pair<double, double> default_structure_fit_range(int n) {
  const double cell = two_pi / n;
  return {2.0 * cell, std::min(20.0 * cell, std::numbers::pi / 2.0)};
}

enum class CauchyStatistic { mean, variance, sample };

namespace detail {

inline void check_cauchy_pair(const EnsembleSnapshot& a, const EnsembleSnapshot& b) {
  if (b.N != 2 * a.N)
    throw ArgumentError("Cauchy pair needs the second resolution to be twice the first");
  if (std::abs(a.time - b.time) > 1e-12 * std::max(1.0, std::abs(a.time)))
    throw ArgumentError("Cauchy pair snapshots are at different times");
  if (a.fields.empty() || b.fields.empty()) throw ArgumentError("empty ensemble");
}

}  // namespace detail

/// L2 distance between a statistic at resolution N and the same statistic at
/// 2N restricted to N.
inline double cauchy_rate(const EnsembleSnapshot& coarse, const EnsembleSnapshot& fine,
                          CauchyStatistic stat, std::size_t sample = 0) {
  detail::check_cauchy_pair(coarse, fine);
  switch (stat) {
    case CauchyStatistic::mean:
      return l2_norm(truncate_to(mean_field(fine), coarse.N) - mean_field(coarse));
    case CauchyStatistic::sample:
      if (sample >= coarse.size() || sample >= fine.size())
        throw ArgumentError("sample index out of range");
      return l2_norm(truncate_to(fine.fields[sample], coarse.N) - coarse.fields[sample]);
    case CauchyStatistic::variance: {
      EnsembleSnapshot restricted = fine;
      restricted.N = coarse.N;
      for (auto& f : restricted.fields) f = truncate_to(f, coarse.N);
      const std::size_t m = default_grid_points(coarse.N);
      const ScalarGrid va = variance_field(coarse, m);
      const ScalarGrid vb = variance_field(restricted, m);
      double s = 0.0;
      for (std::size_t i = 0; i < va.v.size(); ++i) s += (va.v[i] - vb.v[i]) * (va.v[i] - vb.v[i]);
      const double cell = two_pi / static_cast<double>(m);
      return std::sqrt(s) * cell;
    }
  }
  return 0.0;
}

struct TimedField {
  double t = 0.0;
  SpectralField u;
};

/// max over consecutive pairs of ||u(t)-u(s)||_{H^-L} / ((1 + ||u(t_0)||^2) |t-s|).
inline double time_regularity_ratio(std::span<const TimedField> trajectory, double L = 2.0) {
  if (trajectory.size() < 2) throw ArgumentError("need at least two snapshots");
  if (!(L > 0.0)) throw ArgumentError("L must be positive");
  const double u0 = l2_norm(trajectory.front().u);
  const double scale = 1.0 + u0 * u0;
  double worst = 0.0;
  for (std::size_t i = 1; i < trajectory.size(); ++i) {
    const double dt = std::abs(trajectory[i].t - trajectory[i - 1].t);
    if (dt == 0.0) throw ArgumentError("snapshot times must be distinct");
    const double d = sobolev_norm(trajectory[i].u - trajectory[i - 1].u, -L);
    worst = std::max(worst, d / (scale * dt));
  }
  return worst;
}

/// Same ratio for sample `sample` of a sequence of snapshots.
inline double time_regularity_ratio(std::span<const EnsembleSnapshot> snaps, std::size_t sample,
                                    double L = 2.0) {
  std::vector<TimedField> traj;
  for (const auto& s : snaps) {
    if (sample >= s.size()) throw ArgumentError("sample index out of range");
    traj.push_back({s.time, s.fields[sample]});
  }
  return time_regularity_ratio(traj, L);
}

/// printf("%.17g").
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// "# kind,time,N,m" metadata line, then "abscissa,value" rows.
inline void write_curve_csv(std::ostream& os, const ScalarCurve& curve) {
  os << "# " << curve.kind << ',' << format_double(curve.time) << ',' << curve.N << ','
     << curve.m << '\n';
  for (std::size_t i = 0; i < curve.size(); ++i)
    os << format_double(curve.abscissa[i]) << ',' << format_double(curve.values[i]) << '\n';
}

}  // namespace eulerstat
