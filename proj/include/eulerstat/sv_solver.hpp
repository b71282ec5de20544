#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "eulerstat/errors.hpp"
#include "eulerstat/fft.hpp"
#include "eulerstat/spectral_field.hpp"

namespace eulerstat {

enum class Multiplier {
  /// Q_k = 1 - N/|k|^2 for |k| >= sqrt(N), else 0 (s = 1, m_N = sqrt(N)).
  sphinx,
  /// Q_k = 1 - (m_N/|k|)^((2s-1)/theta) for |k| > m_N, theta = 0.9 (2s-1)/(2s).
  general,
};

struct SolverParams {
  int N = 32;
  /// Hyperviscosity order.
  int s = 1;
  /// Dissipation amplitude; the scheme uses eps_N = eps * N^(1-2s).
  double eps = 1.0 / 20.0;
  /// Dissipation-free cutoff for the general multiplier; <= 0 selects
  /// floor(sqrt(N)).
  double mN = 0.0;
  Multiplier multiplier = Multiplier::sphinx;
  double cfl = 0.5;
  double visc_safety = 0.9;
  /// Padded-grid factor relative to 2N points per axis.
  double dealias = 1.5;
  /// Test hook: drop the advection term, leaving pure spectral damping.
  bool nonlinear = true;

  double eps_n() const { return eps * std::pow(static_cast<double>(N), 1.0 - 2.0 * s); }
  double cutoff() const {
    return mN > 0.0 ? mN : std::floor(std::sqrt(static_cast<double>(N)));
  }

  void validate() const {
    if (N < 1) throw ArgumentError("N must be positive");
    if (s < 1) throw ArgumentError("hyperviscosity order s must be >= 1");
    if (eps < 0.0) throw ArgumentError("eps must be nonnegative");
    if (cfl < 0.0 || visc_safety <= 0.0) throw ArgumentError("invalid step safety factors");
    if (dealias < 1.0) throw ArgumentError("dealias factor must be >= 1");
  }
};

/// Multiplier value Q_k for |k|^2 = kk.
inline double multiplier_value(const SolverParams& p, double kk) {
  const double k = std::sqrt(kk);
  const double n = static_cast<double>(p.N);
  switch (p.multiplier) {
    case Multiplier::sphinx:
      return kk >= n ? 1.0 - n / kk : 0.0;
    case Multiplier::general: {
      const double m = p.cutoff();
      if (k <= m) return 0.0;
      const double theta = 0.9 * (2.0 * p.s - 1.0) / (2.0 * p.s);
      return 1.0 - std::pow(m / k, (2.0 * p.s - 1.0) / theta);
    }
  }
  return 0.0;
}

/// Damping rate eps_N Q_k |k|^(2s) of mode k.
inline double damping_rate(const SolverParams& p, int k1, int k2) {
  const double kk = static_cast<double>(k1 * k1 + k2 * k2);
  if (kk == 0.0) return 0.0;
  return p.eps_n() * multiplier_value(p, kk) * std::pow(kk, p.s);
}

/// Energy accounting: E0 = E(t) + D(t) up to time-integration error, with
/// E = sum_k |u_k|^2 and D the accumulated dissipation.
struct EnergyLedger {
  double t = 0.0;
  double E0 = 0.0;
  double E = 0.0;
  double D = 0.0;
  /// Largest relative per-step energy increase seen (should stay ~0).
  double max_step_growth = 0.0;
  std::size_t steps = 0;

  double balance_error() const { return E0 > 0.0 ? std::abs(E + D - E0) / E0 : std::abs(E + D); }
};

/// Spectral hyper-viscosity scheme for one trajectory. Owns its padded-grid
/// workspace, so an instance must not be shared between threads.
class SpectralViscositySolver {
 public:
  using Observer = std::function<void(double t, const SpectralField&, const EnergyLedger&)>;

  explicit SpectralViscositySolver(SolverParams p) : p_(p) {
    p_.validate();
    const auto n = static_cast<std::size_t>(p_.N);
    const auto wanted = static_cast<std::size_t>(std::ceil(p_.dealias * 2.0 * p_.N));
    pad_ = next_fast_size(std::max(wanted + 1, 2 * n + 1));
    rate_.resize((2 * n + 1) * (2 * n + 1));
    std::size_t i = 0;
    max_rate_ = 0.0;
    for (int k1 = -p_.N; k1 <= p_.N; ++k1)
      for (int k2 = -p_.N; k2 <= p_.N; ++k2) {
        rate_[i] = damping_rate(p_, k1, k2);
        max_rate_ = std::max(max_rate_, rate_[i]);
        ++i;
      }
    z_.resize(pad_ * pad_);
    a_.resize(pad_ * pad_);
    b_.resize(pad_ * pad_);
  }

  const SolverParams& params() const { return p_; }
  std::size_t padded_points() const { return pad_; }
  double max_damping_rate() const { return max_rate_; }

  /// d/dt u_k = -i k.(I - kk/|k|^2)(u (x) u)_k - eps_N Q_k |k|^(2s) u_k.
  SpectralField rhs(const SpectralField& u) {
    double unused = 0.0;
    return rhs(u, unused);
  }

  /// Same as rhs(u); also reports max |u| on the padded grid.
  SpectralField rhs(const SpectralField& u, double& max_speed) {
    check_resolution(u);
    const int n = p_.N;
    SpectralField out(n);
    if (p_.nonlinear) {
      synthesize(u, max_speed);
      const std::size_t m = pad_;
      for (std::size_t i = 0; i < z_.size(); ++i) {
        const double u1 = z_[i].real(), u2 = z_[i].imag();
        a_[i] = complex(u1 * u1, u1 * u2);
        b_[i] = complex(u2 * u2, 0.0);
      }
      fft2d(a_, m, false);
      fft2d(b_, m, false);
      const double scale = 1.0 / static_cast<double>(m * m);
      out.for_each([&](int k1, int k2, Vec2c& c) {
        if (k1 == 0 && k2 == 0) return;
        const std::size_t ip = detail::wrap(k1, m) * m + detail::wrap(k2, m);
        const std::size_t im = detail::wrap(-k1, m) * m + detail::wrap(-k2, m);
        const complex ap = a_[ip] * scale, am = std::conj(a_[im]) * scale;
        const complex p11 = 0.5 * (ap + am);
        const complex p12 = complex(0, -0.5) * (ap - am);
        const complex p22 = b_[ip] * scale;
        const double d1 = k1, d2 = k2;
        // divergence of u (x) u, then Leray projection
        const complex t1 = complex(0, 1) * (d1 * p11 + d2 * p12);
        const complex t2 = complex(0, 1) * (d1 * p12 + d2 * p22);
        const complex kt = (d1 * t1 + d2 * t2) / (d1 * d1 + d2 * d2);
        c.x = -(t1 - d1 * kt);
        c.y = -(t2 - d2 * kt);
      });
    } else {
      max_speed = max_speed_of(u);
    }
    auto src = u.coeffs();
    auto dst = out.coeffs();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] -= rate_[i] * src[i];
    out.enforce_invariants();
    return out;
  }

  /// max |u| over the padded synthesis grid.
  double max_speed_of(const SpectralField& u) {
    check_resolution(u);
    double speed = 0.0;
    synthesize(u, speed);
    return speed;
  }

  /// min(cfl h / max|u|, visc_safety 2.5 / lambda_max) with h = 2pi/(2N).
  double adaptive_dt(double max_speed) const {
    const double h = two_pi / (2.0 * p_.N);
    const double inf = std::numeric_limits<double>::infinity();
    const double advective = (p_.cfl > 0.0 && max_speed > 0.0) ? p_.cfl * h / max_speed : inf;
    const double viscous = max_rate_ > 0.0 ? p_.visc_safety * 2.5 / max_rate_ : inf;
    return std::min(advective, viscous);
  }

  double adaptive_dt(const SpectralField& u) { return adaptive_dt(max_speed_of(u)); }

  /// Shu-Osher SSP-RK3 step. `t` only labels a blow-up report.
  SpectralField step(const SpectralField& u, double dt, double t = 0.0) {
    if (dt < 0.0) throw ArgumentError("dt must be nonnegative");
    if (dt == 0.0) return u;
    SpectralField u1 = u + dt * rhs(u);
    SpectralField u2 = 0.75 * u + 0.25 * (u1 + dt * rhs(u1));
    SpectralField next = (1.0 / 3.0) * u + (2.0 / 3.0) * (u2 + dt * rhs(u2));
    next.enforce_invariants();
    if (!next.all_finite()) {
      std::ostringstream msg;
      msg << "non-finite Fourier coefficients at t=" << t + dt << " (dt=" << dt
          << ", N=" << p_.N << ", E(t)=" << u.energy() << ")";
      throw BlowUpError(t + dt, msg.str());
    }
    return next;
  }

  /// 2 sum_k eps_N Q_k |k|^(2s) |u_k|^2.
  double dissipation_rate(const SpectralField& u) const {
    auto c = u.coeffs();
    double s = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) s += rate_[i] * abs2(c[i]);
    return 2.0 * s;
  }

  /// Integrates to every time in `output_times` (sorted, >= 0), landing on
  /// each exactly, and calls `observer` there. Returns the state at the last
  /// output time.
  SpectralField evolve(const SpectralField& u0, const std::vector<double>& output_times,
                       const Observer& observer, EnergyLedger& ledger) {
    check_resolution(u0);
    if (!std::is_sorted(output_times.begin(), output_times.end()) ||
        (!output_times.empty() && output_times.front() < 0.0))
      throw ArgumentError("output times must be sorted and nonnegative");
    SpectralField u = u0;
    ledger = EnergyLedger{};
    ledger.E0 = ledger.E = u.energy();
    double rate = dissipation_rate(u);
    double t = 0.0;
    for (double target : output_times) {
      while (t < target) {
        double dt = adaptive_dt(u);
        bool last = false;
        if (t + dt >= target) {
          dt = target - t;
          last = true;
        }
        SpectralField next = step(u, dt, t);
        const double e_next = next.energy();
        ledger.max_step_growth =
            std::max(ledger.max_step_growth, ledger.E > 0.0 ? (e_next - ledger.E) / ledger.E : 0.0);
        const double rate_next = dissipation_rate(next);
        ledger.D += 0.5 * dt * (rate + rate_next);
        rate = rate_next;
        ledger.E = e_next;
        ++ledger.steps;
        u = std::move(next);
        t = last ? target : t + dt;
        ledger.t = t;
      }
      if (observer) observer(t, u, ledger);
    }
    return u;
  }

  SpectralField evolve(const SpectralField& u0, double t_end, EnergyLedger& ledger) {
    if (t_end < 0.0) throw ArgumentError("t_end must be nonnegative");
    return evolve(u0, std::vector<double>{t_end}, nullptr, ledger);
  }

 private:
  void check_resolution(const SpectralField& u) const {
    if (u.resolution() != p_.N)
      throw ArgumentError("field resolution " + std::to_string(u.resolution()) +
                          " does not match solver N=" + std::to_string(p_.N));
  }

  // Fills z_ with u1 + i u2 on the padded grid.
  void synthesize(const SpectralField& u, double& max_speed) {
    const std::size_t m = pad_;
    std::fill(z_.begin(), z_.end(), complex{});
    u.for_each([&](int k1, int k2, const Vec2c& c) {
      z_[detail::wrap(k1, m) * m + detail::wrap(k2, m)] = c.x + complex(0, 1) * c.y;
    });
    fft2d(z_, m, true);
    double peak = 0.0;
    for (const auto& v : z_) peak = std::max(peak, std::norm(v));
    max_speed = std::sqrt(peak);
  }

  SolverParams p_;
  std::size_t pad_ = 0;
  std::vector<double> rate_;
  double max_rate_ = 0.0;
  std::vector<complex> z_, a_, b_;
};

inline SpectralField rhs(const SpectralField& u, const SolverParams& p) {
  return SpectralViscositySolver(p).rhs(u);
}

inline double adaptive_dt(const SpectralField& u, const SolverParams& p) {
  return SpectralViscositySolver(p).adaptive_dt(u);
}

inline SpectralField step(const SpectralField& u, double dt, const SolverParams& p) {
  return SpectralViscositySolver(p).step(u, dt);
}

}  // namespace eulerstat
