#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "eulerstat/config.hpp"
#include "eulerstat/diagnostics.hpp"
#include "eulerstat/ensemble.hpp"
#include "eulerstat/snapshot_io.hpp"
#include "eulerstat/transport.hpp"

namespace eulerstat {

enum ExitCode : int { exit_ok = 0, exit_failure = 1, exit_usage = 2, exit_blow_up = 3 };

inline constexpr int desk_max_N = 256;
inline constexpr std::size_t desk_max_samples = 64;

struct RunOptions {
  bool force = false;
  unsigned workers = 1;
  bool large = false;
  /// Raw value of EULER_STAT_SEED, if set.
  std::optional<std::string> seed_override;
};

struct DiagnoseOptions {
  DiagnosticsRequest request;
  std::string out_dir = "diagnostics";
};

class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

namespace fs = std::filesystem;

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw OutputError("cannot write '" + path.string() + "'");
  os << text;
  os.flush();
  if (!os) throw OutputError("write to '" + path.string() + "' failed");
}

inline void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw OutputError("cannot create directory '" + dir.string() + "'" +
                      (ec ? ": " + ec.message() : std::string()));
}

inline std::string provenance_header() {
  return "# prng = " + std::string(prng_algorithm) +
         "\n# format_version = " + std::to_string(snapshot_format_version) + '\n';
}

inline std::string snapshot_name(int n, std::size_t t) {
  return "snapshot_N" + std::to_string(n) + "_t" + std::to_string(t) + ".euss";
}

struct Loaded {
  std::string path;
  std::string stem;
  EnsembleSnapshot snap;
};

inline std::string curve_text(const ScalarCurve& c) {
  std::ostringstream os;
  write_curve_csv(os, c);
  return os.str();
}

/// Per-snapshot diagnostics, explicit (coarse, fine) pairs, then per-resolution
/// trajectories. Returns the summary CSV text.
inline std::string run_diagnostics(const std::vector<Loaded>& snaps,
                                   const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                                   const DiagnosticsRequest& req, const fs::path& out) {
  make_dir(out);
  std::ostringstream summary;
  summary << "diagnostic,input,N,time,m,quantity,value\n";
  auto row = [&](const std::string& diag, const std::string& input, int n, double t,
                 std::size_t m, const std::string& q, double v) {
    summary << diag << ',' << input << ',' << n << ',' << format_double(t) << ',' << m << ','
            << q << ',' << format_double(v) << '\n';
  };

  for (const auto& s : snaps) {
    if (req.structure) {
      const ScalarCurve c = structure_function(s.snap);
      write_text(out / ("structure_" + s.stem + ".csv"), curve_text(c));
      const auto [lo, hi] = default_structure_fit_range(s.snap.N);
      double exponent = std::nan("");
      try {
        exponent = fit_exponent(c, lo, hi).exponent;
      } catch (const std::invalid_argument&) {
      } catch (const std::domain_error&) {
      }
      row("structure", s.stem, s.snap.N, s.snap.time, s.snap.size(), "exponent", exponent);
      row("structure", s.stem, s.snap.N, s.snap.time, s.snap.size(), "fit_r_min", lo);
      row("structure", s.stem, s.snap.N, s.snap.time, s.snap.size(), "fit_r_max", hi);
    }
    if (req.spectrum_gamma) {
      const ScalarCurve c = compensated_spectrum(energy_spectrum(s.snap), *req.spectrum_gamma);
      write_text(out / ("spectrum_" + s.stem + ".csv"), curve_text(c));
      row("spectrum", s.stem, s.snap.N, s.snap.time, s.snap.size(), "gamma", *req.spectrum_gamma);
      row("spectrum", s.stem, s.snap.N, s.snap.time, s.snap.size(), "K_max",
          static_cast<double>(c.size()));
    }
    if (req.mean_variance) {
      const SpectralField mean = mean_field(s.snap);
      const std::size_t m = default_grid_points(s.snap.N);
      const VectorGrid mg = to_physical(mean, m);
      const ScalarGrid var = variance_field(s.snap, m);
      std::ostringstream os;
      os << "# mean_variance," << format_double(s.snap.time) << ',' << s.snap.N << ','
         << s.snap.size() << ',' << m << '\n';
      os << "x1,x2,mean_u1,mean_u2,variance\n";
      for (std::size_t j1 = 0; j1 < m; ++j1)
        for (std::size_t j2 = 0; j2 < m; ++j2) {
          const std::size_t i = j1 * m + j2;
          os << format_double(grid_coordinate(j1, m)) << ',' << format_double(grid_coordinate(j2, m))
             << ',' << format_double(mg.u1[i]) << ',' << format_double(mg.u2[i]) << ','
             << format_double(var.v[i]) << '\n';
        }
      write_text(out / ("meanvar_" + s.stem + ".csv"), os.str());
      row("mean_variance", s.stem, s.snap.N, s.snap.time, s.snap.size(), "mean_l2",
          l2_norm(mean));
    }
  }

  for (const auto& [ia, ib] : pairs) {
    const Loaded& a = snaps[ia];
    const Loaded& b = snaps[ib];
    const std::string tag = a.stem + "__" + b.stem;
    if (req.wasserstein_k) {
      const auto r =
          marginal_w1(a.snap, b.snap, *req.wasserstein_k, req.wasserstein_tuples);
      std::ostringstream os;
      write_report_csv(os, r);
      write_text(out / ("wasserstein_k" + std::to_string(r.k) + '_' + tag + ".csv"), os.str());
      row("wasserstein", tag, b.snap.N, b.snap.time, b.snap.size(), "k", r.k);
      row("wasserstein", tag, b.snap.N, b.snap.time, b.snap.size(), "value", r.value);
      row("wasserstein", tag, b.snap.N, b.snap.time, b.snap.size(), "mean_distance",
          r.mean_distance);
    }
    if (req.cauchy) {
      const double mean = cauchy_rate(a.snap, b.snap, CauchyStatistic::mean);
      const double var = cauchy_rate(a.snap, b.snap, CauchyStatistic::variance);
      const double sample = cauchy_rate(a.snap, b.snap, CauchyStatistic::sample, 0);
      std::ostringstream os;
      os << "# cauchy," << format_double(a.snap.time) << ',' << a.snap.N << ',' << b.snap.N
         << '\n';
      os << "statistic,value\n";
      os << "mean," << format_double(mean) << '\n';
      os << "variance," << format_double(var) << '\n';
      os << "sample0," << format_double(sample) << '\n';
      write_text(out / ("cauchy_" + tag + ".csv"), os.str());
      row("cauchy", tag, a.snap.N, a.snap.time, a.snap.size(), "mean", mean);
      row("cauchy", tag, a.snap.N, a.snap.time, a.snap.size(), "variance", var);
      row("cauchy", tag, a.snap.N, a.snap.time, a.snap.size(), "sample0", sample);
    }
  }

  if (req.time_regularity_L) {
    const double L = *req.time_regularity_L;
    std::vector<int> order;
    for (const auto& s : snaps)
      if (std::find(order.begin(), order.end(), s.snap.N) == order.end())
        order.push_back(s.snap.N);
    for (int n : order) {
      std::vector<EnsembleSnapshot> traj;
      for (const auto& s : snaps)
        if (s.snap.N == n) traj.push_back(s.snap);
      std::stable_sort(traj.begin(), traj.end(),
                       [](const auto& x, const auto& y) { return x.time < y.time; });
      if (traj.size() < 2)
        throw ArgumentError("time regularity needs two or more snapshots at N = " +
                            std::to_string(n));
      std::size_t m = traj.front().size();
      for (const auto& t : traj)
        if (t.size() != m)
          throw ArgumentError("time regularity snapshots at N = " + std::to_string(n) +
                              " have different sample counts");
      std::ostringstream os;
      os << "# time_regularity," << format_double(L) << ',' << n << ',' << m << '\n';
      os << "sample,ratio\n";
      double worst = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        const double r = time_regularity_ratio(traj, i, L);
        worst = std::max(worst, r);
        os << i << ',' << format_double(r) << '\n';
      }
      write_text(out / ("time_regularity_N" + std::to_string(n) + ".csv"), os.str());
      row("time_regularity", "N" + std::to_string(n), n, traj.back().time, m, "max_ratio", worst);
    }
  }

  const std::string text = summary.str();
  write_text(out / "summary.csv", text);
  return text;
}

inline std::optional<std::string> read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) return std::nullopt;
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

}  // namespace detail

/// `run <config>`: config is a file path or a preset name.
inline int cmd_run(const std::string& config_ref, const RunOptions& opt, std::ostream& out,
                   std::ostream& err) {
  namespace fs = std::filesystem;
  std::string text;
  std::string source = config_ref;
  if (auto t = detail::read_file(config_ref); t && !fs::is_directory(config_ref)) {
    text = std::move(*t);
  } else if (const Preset* p = find_preset(config_ref)) {
    text = p->text;
    source = "preset:" + p->name;
  } else {
    err << "error: cannot read config '" << config_ref << "'\n";
    return exit_usage;
  }

  ExperimentConfig cfg;
  try {
    cfg = parse_config_string(text, source);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  }
  if (opt.seed_override) {
    auto v = detail::parse_number<std::uint64_t>(detail::trim(*opt.seed_override));
    if (!v) {
      err << "error: EULER_STAT_SEED='" << *opt.seed_override << "' is not an unsigned integer\n";
      return exit_usage;
    }
    cfg.initial.base_seed = *v;
  }
  if (!opt.large) {
    for (int n : cfg.resolutions) {
      if (n > desk_max_N) {
        err << "error: " << source << ": N = " << n << " exceeds the desk limit " << desk_max_N
            << " (pass --large)\n";
        return exit_usage;
      }
      if (cfg.samples_for(n) > desk_max_samples) {
        err << "error: " << source << ": m = " << cfg.samples_for(n)
            << " exceeds the desk limit " << desk_max_samples << " (pass --large)\n";
        return exit_usage;
      }
    }
  }
  std::vector<RunManifest> manifests;
  try {
    for (int n : cfg.resolutions) {
      manifests.push_back(resolve_manifest(cfg, n));
      manifests.back().validate();
    }
  } catch (const std::invalid_argument& e) {
    err << "error: " << source << ": " << e.what() << '\n';
    return exit_usage;
  }

  const fs::path root(cfg.output_dir);
  const std::string resolved = serialize_config(cfg);
  try {
    detail::make_dir(root);
    detail::write_text(root / "config.cfg", detail::provenance_header() + resolved);
  } catch (const OutputError& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  }

  std::vector<detail::Loaded> loaded;
  std::vector<std::vector<std::size_t>> by_time(cfg.output_times.size());
  for (const RunManifest& man : manifests) {
    const int n = man.solver.N;
    const fs::path dir = root / ("N" + std::to_string(n));
    bool complete = fs::exists(dir / "manifest.cfg");
    for (std::size_t t = 0; t < man.output_times.size(); ++t)
      complete = complete && fs::exists(dir / detail::snapshot_name(n, t));

    std::vector<EnsembleSnapshot> snaps;
    if (complete && !opt.force) {
      out << "N = " << n << ": outputs exist, skipping (use --force to overwrite)\n";
      try {
        for (std::size_t t = 0; t < man.output_times.size(); ++t)
          snaps.push_back(load_snapshot((dir / detail::snapshot_name(n, t)).string()));
      } catch (const FormatError& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
      }
    } else {
      out << "N = " << n << ": running " << man.m << " samples to t = "
          << man.output_times.back() << '\n';
      EnsembleRun run;
      try {
        run = run_ensemble(man, opt.workers);
      } catch (const SampleBlowUp& e) {
        const auto& f = e.failure();
        err << "error: blow-up at N = " << n << ", sample " << f.index << " (seed "
            << sample_seed(man.spec.base_seed, f.index) << "), t = " << format_double(f.time)
            << ": " << f.message << '\n';
        return exit_blow_up;
      } catch (const BlowUpError& e) {
        err << "error: blow-up at N = " << n << ": " << e.what() << '\n';
        return exit_blow_up;
      }
      try {
        detail::make_dir(dir);
        for (std::size_t t = 0; t < run.snapshots.size(); ++t) {
          const fs::path p = dir / detail::snapshot_name(n, t);
          std::ostringstream os;
          write_snapshot(os, run.snapshots[t]);
          detail::write_text(p, os.str());
        }
        std::ostringstream energy;
        energy << "sample,time,E,D,E0,balance_error,max_step_growth,steps\n";
        for (std::size_t i = 0; i < run.ledgers.size(); ++i)
          for (const auto& l : run.ledgers[i])
            energy << run.sample_indices[i] << ',' << format_double(l.t) << ','
                   << format_double(l.E) << ',' << format_double(l.D) << ','
                   << format_double(l.E0) << ',' << format_double(l.balance_error()) << ','
                   << format_double(l.max_step_growth) << ',' << l.steps << '\n';
        detail::write_text(dir / "energy.csv", energy.str());
        if (!run.failures.empty()) {
          std::ostringstream fails;
          fails << "sample,time,message\n";
          for (const auto& f : run.failures)
            fails << f.index << ',' << format_double(f.time) << ",\"" << f.message << "\"\n";
          detail::write_text(dir / "failures.csv", fails.str());
        }
        std::ostringstream mf;
        mf << detail::provenance_header() << "# N = " << n << "\n# m = " << run.sample_indices.size()
           << "\n# manifest_hash = " << man.hash << '\n'
           << resolved;
        detail::write_text(dir / "manifest.cfg", mf.str());
      } catch (const OutputError& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
      }
      snaps = std::move(run.snapshots);
    }
    for (std::size_t t = 0; t < snaps.size(); ++t) {
      by_time[t].push_back(loaded.size());
      const std::string name = detail::snapshot_name(n, t);
      loaded.push_back({(dir / name).string(), fs::path(name).stem().string(), std::move(snaps[t])});
    }
  }

  if (cfg.diagnostics.any()) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (const auto& group : by_time)
      for (std::size_t i = 1; i < group.size(); ++i) pairs.emplace_back(group[i - 1], group[i]);
    const fs::path diag = root / "diagnostics";
    try {
      detail::make_dir(diag);
      detail::write_text(diag / "config.cfg", detail::provenance_header() + resolved);
      detail::run_diagnostics(loaded, pairs, cfg.diagnostics, diag);
    } catch (const OutputError& e) {
      err << "error: " << e.what() << '\n';
      return exit_usage;
    } catch (const std::invalid_argument& e) {
      err << "error: diagnostics: " << e.what() << '\n';
      return exit_usage;
    }
  }
  out << "done: " << root.string() << '\n';
  return exit_ok;
}

/// `diagnose <files...>`: pair diagnostics use consecutive files in argument
/// order, (f0, f1), (f1, f2), ...
inline int cmd_diagnose(const std::vector<std::string>& files, const DiagnoseOptions& opt,
                        std::ostream& out, std::ostream& err) {
  namespace fs = std::filesystem;
  if (files.empty()) {
    err << "error: no snapshot files given\n";
    return exit_usage;
  }
  const auto& req = opt.request;
  if (!req.any()) {
    err << "error: no diagnostic selected\n";
    return exit_usage;
  }
  std::vector<detail::Loaded> loaded;
  try {
    for (const auto& f : files) loaded.push_back({f, fs::path(f).stem().string(), load_snapshot(f)});
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  }
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  if (req.wasserstein_k || req.cauchy) {
    if (loaded.size() < 2) {
      err << "error: Wasserstein and Cauchy diagnostics need at least two snapshots\n";
      return exit_usage;
    }
    for (std::size_t i = 1; i < loaded.size(); ++i) pairs.emplace_back(i - 1, i);
  }
  try {
    const fs::path dir(opt.out_dir);
    detail::make_dir(dir);
    std::ostringstream inputs;
    inputs << detail::provenance_header();
    for (const auto& l : loaded)
      inputs << "# input = " << l.path << ", N = " << l.snap.N << ", m = " << l.snap.size()
             << ", time = " << format_double(l.snap.time)
             << ", manifest_hash = " << l.snap.manifest_hash << '\n';
    detail::write_text(dir / "inputs.cfg", inputs.str());
    detail::run_diagnostics(loaded, pairs, req, dir);
  } catch (const OutputError& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const std::invalid_argument& e) {
    err << "error: incompatible snapshots: " << e.what() << '\n';
    return exit_usage;
  }
  out << "wrote diagnostics to " << opt.out_dir << '\n';
  return exit_ok;
}

inline int cmd_presets(std::ostream& out) {
  for (const auto& p : presets()) {
    out << "== " << p.name << ": " << p.description << '\n' << p.text << '\n';
  }
  return exit_ok;
}

}  // namespace eulerstat
