#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "eulerstat/diagnostics.hpp"
#include "eulerstat/ensemble.hpp"
#include "eulerstat/init_data.hpp"
#include "eulerstat/random.hpp"
#include "eulerstat/sv_solver.hpp"

namespace eulerstat {

/// Schema violation; `line` is 1-based, 0 when no single line is at fault.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& source, int line, const std::string& msg)
      : std::runtime_error(source + (line > 0 ? ":" + std::to_string(line) : std::string()) +
                           ": " + msg),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct DiagnosticsRequest {
  bool structure = false;
  std::optional<double> spectrum_gamma;
  std::optional<int> wasserstein_k;
  std::size_t wasserstein_tuples = 0;
  bool cauchy = false;
  bool mean_variance = false;
  std::optional<double> time_regularity_L;

  bool any() const {
    return structure || spectrum_gamma || wasserstein_k || cauchy || mean_variance ||
           time_regularity_L;
  }
};

struct ExperimentConfig {
  std::string name;
  InitialMeasureSpec initial;
  /// rho = rho_coefficient / N when set ("5/N" in the file).
  std::optional<double> rho_coefficient;
  SolverParams solver;
  std::vector<int> resolutions;
  /// m = N when set, otherwise `samples`.
  bool samples_equal_N = false;
  std::size_t samples = 1;
  std::vector<double> output_times;
  DiagnosticsRequest diagnostics;
  std::string output_dir = "out";
  bool tolerate_failures = false;

  std::size_t samples_for(int n) const {
    return samples_equal_N ? static_cast<std::size_t>(n) : samples;
  }
  double rho_for(int n) const { return rho_coefficient ? *rho_coefficient / n : initial.rho; }
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(v);
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class T>
std::optional<T> parse_number(const std::string& s) {
  T v{};
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end) return std::nullopt;
  return v;
}

inline std::optional<bool> parse_bool(const std::string& s) {
  if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
  if (s == "false" || s == "no" || s == "off" || s == "0") return false;
  return std::nullopt;
}

}  // namespace detail

/// Parses the `[section]` / `key = value` format. Comments start with '#' or ';'.
inline ExperimentConfig parse_config(std::istream& is, const std::string& source = "config") {
  ExperimentConfig cfg;
  std::string section;
  std::string raw;
  int lineno = 0;
  std::map<std::string, int> seen;

  while (std::getline(is, raw)) {
    ++lineno;
    std::string line = detail::trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    auto fail = [&](const std::string& msg) { throw ConfigError(source, lineno, msg); };
    if (line.front() == '[') {
      if (line.back() != ']') fail("malformed section header");
      section = detail::trim(std::string_view(line).substr(1, line.size() - 2));
      if (section != "experiment" && section != "initial" && section != "solver" &&
          section != "diagnostics")
        fail("unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected 'key = value'");
    const std::string key = detail::trim(std::string_view(line).substr(0, eq));
    const std::string value = detail::trim(std::string_view(line).substr(eq + 1));
    if (section.empty()) fail("key '" + key + "' outside of a section");
    if (key.empty()) fail("empty key");
    const std::string qualified = section + "." + key;
    if (seen.count(qualified))
      fail("duplicate key '" + key + "' (first set on line " + std::to_string(seen[qualified]) +
           ")");
    seen[qualified] = lineno;

    auto real = [&]() {
      auto v = detail::parse_number<double>(value);
      if (!v) fail("'" + key + "' expects a number, got '" + value + "'");
      return *v;
    };
    auto integer = [&]() {
      auto v = detail::parse_number<long long>(value);
      if (!v) fail("'" + key + "' expects an integer, got '" + value + "'");
      return *v;
    };
    auto boolean = [&]() {
      auto v = detail::parse_bool(value);
      if (!v) fail("'" + key + "' expects true or false, got '" + value + "'");
      return *v;
    };
    auto unknown = [&]() { fail("unknown key '" + key + "' in [" + section + "]"); };

    if (section == "experiment") {
      if (key == "name") {
        cfg.name = value;
      } else if (key == "output_dir") {
        if (value.empty()) fail("output_dir must not be empty");
        cfg.output_dir = value;
      } else if (key == "base_seed") {
        auto v = detail::parse_number<std::uint64_t>(value);
        if (!v) fail("'base_seed' expects an unsigned integer, got '" + value + "'");
        cfg.initial.base_seed = *v;
      } else if (key == "resolutions") {
        for (const auto& item : detail::split_list(value)) {
          auto v = detail::parse_number<int>(item);
          if (!v) fail("resolution '" + item + "' is not an integer");
          if (*v < 8 || *v % 2 != 0) fail("resolution " + item + " must be even and >= 8");
          if (!cfg.resolutions.empty() && *v <= cfg.resolutions.back())
            fail("resolutions must be sorted ascending without repeats");
          cfg.resolutions.push_back(*v);
        }
        if (cfg.resolutions.empty()) fail("resolutions list is empty");
      } else if (key == "samples") {
        if (value == "N") {
          cfg.samples_equal_N = true;
        } else {
          const long long v = integer();
          if (v < 1) fail("samples must be >= 1 or 'N'");
          cfg.samples = static_cast<std::size_t>(v);
        }
      } else if (key == "output_times") {
        for (const auto& item : detail::split_list(value)) {
          auto v = detail::parse_number<double>(item);
          if (!v) fail("output time '" + item + "' is not a number");
          if (*v < 0.0) fail("output times must be >= 0");
          if (!cfg.output_times.empty() && *v <= cfg.output_times.back())
            fail("output times must be strictly increasing");
          cfg.output_times.push_back(*v);
        }
        if (cfg.output_times.empty()) fail("output_times list is empty");
      } else if (key == "tolerate_failures") {
        cfg.tolerate_failures = boolean();
      } else {
        unknown();
      }
    } else if (section == "initial") {
      if (key == "family") {
        try {
          cfg.initial.family = family_from_string(value);
        } catch (const ArgumentError& e) {
          fail(e.what());
        }
      } else if (key == "rho") {
        if (value.size() > 2 && value.ends_with("/N")) {
          auto v = detail::parse_number<double>(detail::trim(value.substr(0, value.size() - 2)));
          if (!v || *v <= 0.0) fail("rho expects a number or 'c/N' with c > 0");
          cfg.rho_coefficient = *v;
        } else {
          cfg.initial.rho = real();
          if (cfg.initial.rho < 0.0) fail("rho must be >= 0");
        }
      } else if (key == "delta") {
        cfg.initial.delta = real();
        if (cfg.initial.delta < 0.0) fail("delta must be >= 0");
      } else if (key == "q") {
        const long long v = integer();
        if (v < 0) fail("q must be >= 0");
        cfg.initial.q = static_cast<int>(v);
      } else if (key == "d") {
        cfg.initial.d = real();
      } else if (key == "Q") {
        const long long v = integer();
        if (v < 1) fail("Q must be >= 1");
        cfg.initial.Q = static_cast<int>(v);
      } else if (key == "H") {
        cfg.initial.H = real();
        if (!(cfg.initial.H > 0.0 && cfg.initial.H < 1.0)) fail("H must lie in (0, 1)");
      } else {
        unknown();
      }
    } else if (section == "solver") {
      if (key == "s") {
        const long long v = integer();
        if (v < 1) fail("s must be >= 1");
        cfg.solver.s = static_cast<int>(v);
      } else if (key == "eps") {
        cfg.solver.eps = real();
        if (cfg.solver.eps < 0.0) fail("eps must be >= 0");
      } else if (key == "mN") {
        cfg.solver.mN = real();
      } else if (key == "multiplier") {
        if (value == "sphinx") cfg.solver.multiplier = Multiplier::sphinx;
        else if (value == "general") cfg.solver.multiplier = Multiplier::general;
        else fail("multiplier must be 'sphinx' or 'general'");
      } else if (key == "cfl") {
        cfg.solver.cfl = real();
        if (!(cfg.solver.cfl > 0.0)) fail("cfl must be positive");
      } else if (key == "visc_safety") {
        cfg.solver.visc_safety = real();
        if (!(cfg.solver.visc_safety > 0.0)) fail("visc_safety must be positive");
      } else if (key == "dealias") {
        cfg.solver.dealias = real();
        if (cfg.solver.dealias < 1.0) fail("dealias must be >= 1");
      } else if (key == "nonlinear") {
        cfg.solver.nonlinear = boolean();
      } else {
        unknown();
      }
    } else {
      if (key == "structure") {
        cfg.diagnostics.structure = boolean();
      } else if (key == "spectrum") {
        cfg.diagnostics.spectrum_gamma = real();
      } else if (key == "wasserstein") {
        const long long v = integer();
        if (v < 1 || v > 3) fail("wasserstein order must be 1, 2 or 3");
        cfg.diagnostics.wasserstein_k = static_cast<int>(v);
      } else if (key == "wasserstein_tuples") {
        const long long v = integer();
        if (v < 1) fail("wasserstein_tuples must be >= 1");
        cfg.diagnostics.wasserstein_tuples = static_cast<std::size_t>(v);
      } else if (key == "cauchy") {
        cfg.diagnostics.cauchy = boolean();
      } else if (key == "mean_variance") {
        cfg.diagnostics.mean_variance = boolean();
      } else if (key == "time_regularity") {
        const double L = real();
        if (!(L > 0.0)) fail("time_regularity L must be positive");
        cfg.diagnostics.time_regularity_L = L;
      } else {
        unknown();
      }
    }
  }

  if (cfg.name.empty()) throw ConfigError(source, 0, "missing [experiment] name");
  if (cfg.resolutions.empty()) throw ConfigError(source, 0, "missing [experiment] resolutions");
  if (cfg.output_times.empty()) throw ConfigError(source, 0, "missing [experiment] output_times");
  if (cfg.initial.family == Family::sinusoidal_sheet && !cfg.rho_coefficient &&
      cfg.initial.rho <= 0.0) {
    const int line = seen.count("initial.rho") ? seen["initial.rho"] : 0;
    throw ConfigError(source, line, "sinusoidal sheet requires rho > 0");
  }
  return cfg;
}

inline ExperimentConfig parse_config_string(const std::string& text,
                                            const std::string& source = "config") {
  std::istringstream is(text);
  return parse_config(is, source);
}

/// Canonical text of a parsed config; parse_config(serialize_config(c)) == c.
inline std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream os;
  auto list = [&](const auto& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) s += ", ";
      if constexpr (std::is_same_v<std::decay_t<decltype(v[0])>, double>)
        s += format_double(v[i]);
      else
        s += std::to_string(v[i]);
    }
    return s;
  };
  os << "[experiment]\n";
  os << "name = " << c.name << '\n';
  os << "output_dir = " << c.output_dir << '\n';
  os << "base_seed = " << c.initial.base_seed << '\n';
  os << "resolutions = " << list(c.resolutions) << '\n';
  os << "samples = " << (c.samples_equal_N ? std::string("N") : std::to_string(c.samples)) << '\n';
  os << "output_times = " << list(c.output_times) << '\n';
  os << "tolerate_failures = " << (c.tolerate_failures ? "true" : "false") << '\n';
  os << "\n[initial]\n";
  os << "family = " << to_string(c.initial.family) << '\n';
  if (c.rho_coefficient)
    os << "rho = " << format_double(*c.rho_coefficient) << "/N\n";
  else
    os << "rho = " << format_double(c.initial.rho) << '\n';
  os << "delta = " << format_double(c.initial.delta) << '\n';
  os << "q = " << c.initial.q << '\n';
  os << "d = " << format_double(c.initial.d) << '\n';
  os << "Q = " << c.initial.Q << '\n';
  os << "H = " << format_double(c.initial.H) << '\n';
  os << "\n[solver]\n";
  os << "s = " << c.solver.s << '\n';
  os << "eps = " << format_double(c.solver.eps) << '\n';
  os << "mN = " << format_double(c.solver.mN) << '\n';
  os << "multiplier = " << (c.solver.multiplier == Multiplier::sphinx ? "sphinx" : "general")
     << '\n';
  os << "cfl = " << format_double(c.solver.cfl) << '\n';
  os << "visc_safety = " << format_double(c.solver.visc_safety) << '\n';
  os << "dealias = " << format_double(c.solver.dealias) << '\n';
  os << "nonlinear = " << (c.solver.nonlinear ? "true" : "false") << '\n';
  const auto& d = c.diagnostics;
  os << "\n[diagnostics]\n";
  os << "structure = " << (d.structure ? "true" : "false") << '\n';
  if (d.spectrum_gamma) os << "spectrum = " << format_double(*d.spectrum_gamma) << '\n';
  if (d.wasserstein_k) os << "wasserstein = " << *d.wasserstein_k << '\n';
  if (d.wasserstein_tuples) os << "wasserstein_tuples = " << d.wasserstein_tuples << '\n';
  os << "cauchy = " << (d.cauchy ? "true" : "false") << '\n';
  os << "mean_variance = " << (d.mean_variance ? "true" : "false") << '\n';
  if (d.time_regularity_L) os << "time_regularity = " << format_double(*d.time_regularity_L) << '\n';
  return os.str();
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Manifest for the run at resolution n. The hash ignores output_dir.
inline RunManifest resolve_manifest(const ExperimentConfig& c, int n) {
  RunManifest m;
  m.spec = c.initial;
  m.spec.N = n;
  m.spec.rho = c.rho_for(n);
  m.solver = c.solver;
  m.solver.N = n;
  m.m = c.samples_for(n);
  m.output_times = c.output_times;
  m.tolerate_failures = c.tolerate_failures;
  ExperimentConfig keyed = c;
  keyed.output_dir = "-";
  m.hash = fnv1a(serialize_config(keyed) + "\nN = " + std::to_string(n) + '\n');
  return m;
}

struct Preset {
  std::string name;
  std::string description;
  std::string text;
};

namespace detail {

inline std::string flat_sheet_text(const std::string& name, const std::string& rho,
                                   const std::string& delta, const std::string& resolutions,
                                   const std::string& diagnostics) {
  return "[experiment]\nname = " + name + "\noutput_dir = runs/" + name +
         "\nbase_seed = 1\nresolutions = " + resolutions +
         "\nsamples = 32\noutput_times = 0, 0.4\n\n[initial]\nfamily = flat_sheet\nrho = " + rho +
         "\ndelta = " + delta + "\nq = 10\n\n[solver]\ns = 1\neps = 0.05\n\n[diagnostics]\n" +
         diagnostics;
}

inline std::string fbm_text(const std::string& name, const std::string& H) {
  return "[experiment]\nname = " + name + "\noutput_dir = runs/" + name +
         "\nbase_seed = 1\nresolutions = 64, 128\nsamples = 32\noutput_times = 0, 0.5, 1\n\n"
         "[initial]\nfamily = fbm\nH = " +
         H +
         "\n\n[solver]\ns = 1\neps = 0.05\n\n[diagnostics]\nstructure = true\nspectrum = 2\n"
         "wasserstein = 1\ncauchy = true\n";
}

}  // namespace detail

/// Built-in experiments, in a fixed order.
inline const std::vector<Preset>& presets() {
  static const std::vector<Preset> list = [] {
    std::vector<Preset> v;
    v.push_back({"taylor_green_check", "Taylor-Green vortex, steady under the scheme",
                 "[experiment]\nname = taylor_green_check\noutput_dir = runs/taylor_green_check\n"
                 "base_seed = 1\nresolutions = 32\nsamples = 1\noutput_times = 0, 1\n\n"
                 "[initial]\nfamily = taylor_green\n\n[solver]\ns = 1\neps = 0.05\n\n"
                 "[diagnostics]\nstructure = false\n"});
    v.push_back({"flat_sheet_smooth", "smooth flat vortex sheet, rho = 0.1",
                 detail::flat_sheet_text("flat_sheet_smooth", "0.1", "0.025", "64, 128",
                                         "structure = true\nspectrum = 2\nwasserstein = 1\n"
                                         "cauchy = true\nmean_variance = true\n")});
    v.push_back({"flat_sheet_discontinuous", "discontinuous flat vortex sheet, rho = 0",
                 detail::flat_sheet_text("flat_sheet_discontinuous", "0", "0.025", "64, 128",
                                         "structure = true\nspectrum = 2\nwasserstein = 1\n"
                                         "cauchy = true\n")});
    v.push_back({"sinusoidal_sheet", "sinusoidal vortex sheet, rho = 5/N, d = 0.2",
                 "[experiment]\nname = sinusoidal_sheet\noutput_dir = runs/sinusoidal_sheet\n"
                 "base_seed = 1\nresolutions = 64, 128\nsamples = 32\n"
                 "output_times = 0, 0.6, 1.2\n\n[initial]\nfamily = sinusoidal_sheet\n"
                 "rho = 5/N\ndelta = 0.003125\nq = 10\nd = 0.2\nQ = 400\n\n[solver]\ns = 1\n"
                 "eps = 0.01\n\n[diagnostics]\nstructure = true\nspectrum = 2\n"
                 "wasserstein = 1\ncauchy = true\ntime_regularity = 2\n"});
    v.push_back({"fbm_h015", "fractional Brownian motion initial data, H = 0.15",
                 detail::fbm_text("fbm_h015", "0.15")});
    v.push_back({"fbm_h05", "fractional Brownian motion initial data, H = 0.5",
                 detail::fbm_text("fbm_h05", "0.5")});
    v.push_back({"fbm_h075", "fractional Brownian motion initial data, H = 0.75",
                 detail::fbm_text("fbm_h075", "0.75")});
    const char* deltas[] = {"0.05", "0.025", "0.0125", "0.00625", "0.003125", "0.0015625"};
    for (int j = 0; j < 6; ++j) {
      const std::string name = "delta_sweep_j" + std::to_string(j);
      v.push_back({name,
                   std::string("discontinuous flat sheet, delta = 0.05/2^") + std::to_string(j),
                   detail::flat_sheet_text(name, "0", deltas[j], "128",
                                           "structure = true\nspectrum = 2\n")});
    }
    return v;
  }();
  return list;
}

inline const Preset* find_preset(std::string_view name) {
  for (const auto& p : presets())
    if (p.name == name) return &p;
  return nullptr;
}

}  // namespace eulerstat
