#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "eulerstat/errors.hpp"
#include "eulerstat/init_data.hpp"
#include "eulerstat/spectral_field.hpp"
#include "eulerstat/sv_solver.hpp"

namespace eulerstat {

inline constexpr std::uint32_t snapshot_format_version = 1;

/// The empirical measure (1/m) sum_i delta_{u_i} at one time.
struct EnsembleSnapshot {
  double time = 0.0;
  int N = 0;
  std::vector<SpectralField> fields;
  std::vector<std::uint64_t> sample_seeds;
  std::optional<SolverParams> scheme_params;
  std::uint64_t manifest_hash = 0;

  std::size_t size() const { return fields.size(); }
};

struct RunManifest {
  InitialMeasureSpec spec;
  std::size_t m = 1;
  std::vector<double> output_times;
  SolverParams solver;
  std::uint32_t format_version = snapshot_format_version;
  /// Drop samples that blow up instead of aborting the run.
  bool tolerate_failures = false;
  std::uint64_t hash = 0;

  void validate() const {
    if (m < 1) throw ArgumentError("sample count must be >= 1");
    if (output_times.empty()) throw ArgumentError("at least one output time is required");
    if (output_times.front() < 0.0) throw ArgumentError("output times must be >= 0");
    for (std::size_t i = 1; i < output_times.size(); ++i)
      if (!(output_times[i] > output_times[i - 1]))
        throw ArgumentError("output times must be strictly increasing");
    if (spec.N != solver.N) throw ArgumentError("initial-data and solver resolutions differ");
    spec.validate();
    solver.validate();
  }
};

struct SampleFailure {
  std::size_t index = 0;
  double time = 0.0;
  std::string message;
};

/// Aborted ensemble: carries the failing sample.
class SampleBlowUp : public BlowUpError {
 public:
  SampleBlowUp(SampleFailure f)
      : BlowUpError(f.time, "sample " + std::to_string(f.index) + ": " + f.message),
        failure_(std::move(f)) {}
  const SampleFailure& failure() const { return failure_; }

 private:
  SampleFailure failure_;
};

struct EnsembleRun {
  /// One snapshot per output time.
  std::vector<EnsembleSnapshot> snapshots;
  /// ledgers[i][t]: energy ledger of the i-th retained sample at output t.
  std::vector<std::vector<EnergyLedger>> ledgers;
  std::vector<std::size_t> sample_indices;
  std::vector<SampleFailure> failures;
};

/// Generates m samples, evolves each to every output time. Samples are
/// distributed over `workers` threads; results do not depend on scheduling.
inline EnsembleRun run_ensemble(const RunManifest& manifest, unsigned workers = 1) {
  manifest.validate();
  const std::size_t m = manifest.m;
  const std::size_t nt = manifest.output_times.size();

  struct Trajectory {
    std::vector<SpectralField> states;
    std::vector<EnergyLedger> ledgers;
    std::optional<SampleFailure> failure;
  };
  std::vector<Trajectory> traj(m);

  auto evolve_sample = [&](std::size_t i) {
    Trajectory& tr = traj[i];
    try {
      SpectralViscositySolver solver(manifest.solver);
      const SpectralField u0 = generate_sample(manifest.spec, i);
      EnergyLedger ledger;
      solver.evolve(
          u0, manifest.output_times,
          [&](double, const SpectralField& u, const EnergyLedger& l) {
            tr.states.push_back(u);
            tr.ledgers.push_back(l);
          },
          ledger);
    } catch (const BlowUpError& e) {
      tr.failure = SampleFailure{i, e.time(), e.what()};
    }
  };

  workers = std::max(1u, workers);
  if (workers == 1) {
    for (std::size_t i = 0; i < m; ++i) evolve_sample(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < m; i = next++) {
          try {
            evolve_sample(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        }
      });
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
  }

  EnsembleRun run;
  for (std::size_t i = 0; i < m; ++i) {
    if (traj[i].failure) {
      if (!manifest.tolerate_failures) throw SampleBlowUp(*traj[i].failure);
      run.failures.push_back(*traj[i].failure);
      continue;
    }
    run.sample_indices.push_back(i);
  }
  if (run.sample_indices.empty()) throw BlowUpError(0.0, "every sample failed");

  run.snapshots.resize(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    EnsembleSnapshot& snap = run.snapshots[t];
    snap.time = manifest.output_times[t];
    snap.N = manifest.solver.N;
    snap.scheme_params = manifest.solver;
    snap.manifest_hash = manifest.hash;
    for (std::size_t i : run.sample_indices) {
      snap.fields.push_back(traj[i].states[t]);
      snap.sample_seeds.push_back(sample_seed(manifest.spec.base_seed, i));
    }
  }
  for (std::size_t i : run.sample_indices) run.ledgers.push_back(std::move(traj[i].ledgers));
  return run;
}

/// Coefficient-wise sample mean.
inline SpectralField mean_field(const EnsembleSnapshot& snap) {
  if (snap.fields.empty()) throw ArgumentError("empty ensemble");
  SpectralField mean(snap.fields.front().resolution());
  for (const auto& f : snap.fields) mean += f;
  mean *= 1.0 / static_cast<double>(snap.fields.size());
  return mean;
}

/// Pointwise population variance across samples, summed over components.
/// Two passes (mean, then squared deviations) over re-synthesized samples.
inline ScalarGrid variance_field(const EnsembleSnapshot& snap, std::size_t grid_points) {
  if (snap.fields.empty()) throw ArgumentError("empty ensemble");
  const double inv_m = 1.0 / static_cast<double>(snap.fields.size());
  const VectorGrid mean = to_physical(mean_field(snap), grid_points);
  ScalarGrid var(grid_points);
  for (const auto& f : snap.fields) {
    const VectorGrid g = to_physical(f, grid_points);
    for (std::size_t i = 0; i < var.v.size(); ++i) {
      const double d1 = g.u1[i] - mean.u1[i], d2 = g.u2[i] - mean.u2[i];
      var.v[i] += d1 * d1 + d2 * d2;
    }
  }
  for (auto& v : var.v) v *= inv_m;
  return var;
}

inline ScalarGrid variance_field(const EnsembleSnapshot& snap) {
  return variance_field(snap, default_grid_points(snap.N));
}

}  // namespace eulerstat
