#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "eulerstat/diagnostics.hpp"
#include "eulerstat/ensemble.hpp"
#include "eulerstat/errors.hpp"
#include "eulerstat/random.hpp"
#include "eulerstat/spectral_field.hpp"

namespace eulerstat {

/// m points in R^d with uniform weights 1/m, stored row-major.
class PointCloud {
 public:
  PointCloud(std::size_t dim) : d_(dim) {
    if (dim < 1) throw ArgumentError("point dimension must be >= 1");
  }

  std::size_t dim() const { return d_; }
  std::size_t size() const { return data_.size() / d_; }
  const double* point(std::size_t i) const { return data_.data() + i * d_; }

  void add(std::span<const double> p) {
    if (p.size() != d_) throw ArgumentError("point has wrong dimension");
    for (double v : p)
      if (!std::isfinite(v)) throw ArgumentError("point cloud entries must be finite");
    data_.insert(data_.end(), p.begin(), p.end());
  }

 private:
  std::size_t d_;
  std::vector<double> data_;
};

inline double euclidean(const PointCloud& a, std::size_t i, const PointCloud& b, std::size_t j) {
  const double* p = a.point(i);
  const double* q = b.point(j);
  double s = 0.0;
  for (std::size_t c = 0; c < a.dim(); ++c) s += (p[c] - q[c]) * (p[c] - q[c]);
  return std::sqrt(s);
}

/// Minimum-cost perfect matching on a square cost matrix (row-major n x n),
/// Hungarian method with potentials, O(n^3). Returns col_of_row.
inline std::vector<std::size_t> solve_assignment(const std::vector<double>& cost, std::size_t n) {
  const double inf = std::numeric_limits<double>::infinity();
  // 1-based rows/columns; column 0 is the virtual start.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<std::size_t> row_of_col(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    row_of_col[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = row_of_col[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[row_of_col[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (row_of_col[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      row_of_col[j0] = row_of_col[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> col_of_row(n);
  for (std::size_t j = 1; j <= n; ++j) col_of_row[row_of_col[j] - 1] = j - 1;
  return col_of_row;
}

/// W1 between equal-size uniform point clouds:
/// (1/m) min_pi sum_i |A_i - B_pi(i)|, solved exactly as an assignment.
inline double w1_exact(const PointCloud& a, const PointCloud& b) {
  if (a.size() != b.size())
    throw ArgumentError("W1 requires clouds with equal sample counts");
  if (a.dim() != b.dim()) throw ArgumentError("W1 requires clouds of equal dimension");
  const std::size_t m = a.size();
  if (m == 0) throw ArgumentError("empty point cloud");
  std::vector<double> cost(m * m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) cost[i * m + j] = euclidean(a, i, b, j);
  const auto match = solve_assignment(cost, m);
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) total += cost[i * m + match[i]];
  return total / static_cast<double>(m);
}

struct MarginalDistanceReport {
  int k = 1;
  std::size_t num_x_tuples = 0;
  /// Mean over tuples times `volume_factor`.
  double value = 0.0;
  /// |D|^k = (2pi)^(2k): quadrature weight of the uniform-tuple estimator.
  double volume_factor = 1.0;
  double mean_distance = 0.0;
  std::uint64_t tuple_seed = 0;
  std::size_t grid_points = 0;
  /// Grid-node indices (j1, j2) of each point of each tuple.
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> tuples;
  std::vector<double> per_tuple;
};

inline std::size_t default_tuple_count(int k) {
  switch (k) {
    case 1: return 256;
    case 2: return 128;
    default: return 64;
  }
}

inline constexpr std::uint64_t default_tuple_seed = 0x5eed'7c0fULL;

/// Uniform random k-tuples of nodes on an m-point grid.
inline std::vector<std::vector<std::pair<std::size_t, std::size_t>>> draw_tuples(
    int k, std::size_t count, std::size_t grid_points, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  std::uniform_int_distribution<std::size_t> node(0, grid_points - 1);
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> out(count);
  for (auto& tuple : out)
    for (int p = 0; p < k; ++p) {
      const std::size_t j1 = node(rng);
      const std::size_t j2 = node(rng);
      tuple.emplace_back(j1, j2);
    }
  return out;
}

/// Averaged W1 between the empirical k-point correlation marginals of two
/// ensembles, estimated over random x-tuples of nodes of a grid fine enough
/// for both resolutions.
inline MarginalDistanceReport marginal_w1(const EnsembleSnapshot& a, const EnsembleSnapshot& b,
                                          int k, std::size_t tuple_count = 0,
                                          std::uint64_t seed = default_tuple_seed) {
  if (k < 1) throw ArgumentError("correlation order must be >= 1");
  if (k > 3) throw ArgumentError("correlation orders above 3 are unsupported");
  if (std::abs(a.time - b.time) > 1e-12 * std::max(1.0, std::abs(a.time)))
    throw ArgumentError("snapshots are at different times");
  if (a.size() != b.size()) throw ArgumentError("ensembles must have equal sample counts");
  if (a.fields.empty()) throw ArgumentError("empty ensemble");
  if (tuple_count == 0) tuple_count = default_tuple_count(k);

  MarginalDistanceReport report;
  report.k = k;
  report.num_x_tuples = tuple_count;
  report.tuple_seed = seed;
  report.grid_points = default_grid_points(std::max(a.N, b.N));
  report.volume_factor = std::pow(two_pi, 2 * k);
  report.tuples = draw_tuples(k, tuple_count, report.grid_points, seed);

  const std::size_t m = report.grid_points;
  const std::size_t d = 2 * static_cast<std::size_t>(k);
  // values[s][t * d + c]: component c of the stacked tuple t for sample s
  auto gather = [&](const EnsembleSnapshot& snap) {
    std::vector<std::vector<double>> values;
    for (const auto& f : snap.fields) {
      const VectorGrid g = to_physical(f, m);
      std::vector<double> row;
      row.reserve(tuple_count * d);
      for (const auto& tuple : report.tuples)
        for (const auto& [j1, j2] : tuple) {
          row.push_back(g.u1[j1 * m + j2]);
          row.push_back(g.u2[j1 * m + j2]);
        }
      values.push_back(std::move(row));
    }
    return values;
  };
  const auto va = gather(a);
  const auto vb = gather(b);

  double sum = 0.0;
  for (std::size_t t = 0; t < tuple_count; ++t) {
    PointCloud ca(d), cb(d);
    for (const auto& row : va) ca.add(std::span<const double>(row.data() + t * d, d));
    for (const auto& row : vb) cb.add(std::span<const double>(row.data() + t * d, d));
    const double w = w1_exact(ca, cb);
    report.per_tuple.push_back(w);
    sum += w;
  }
  report.mean_distance = sum / static_cast<double>(tuple_count);
  report.value = report.mean_distance * report.volume_factor;
  return report;
}

/// Per-tuple rows "tuple,distance,nodes" then a "summary" row.
inline void write_report_csv(std::ostream& os, const MarginalDistanceReport& r) {
  os << "# wasserstein,k=" << r.k << ",tuples=" << r.num_x_tuples
     << ",grid_points=" << r.grid_points << ",tuple_seed=" << r.tuple_seed
     << ",volume_factor=" << format_double(r.volume_factor) << '\n';
  os << "tuple,distance,nodes\n";
  for (std::size_t t = 0; t < r.per_tuple.size(); ++t) {
    os << t << ',' << format_double(r.per_tuple[t]) << ',';
    for (std::size_t p = 0; p < r.tuples[t].size(); ++p)
      os << (p ? ";" : "") << r.tuples[t][p].first << ':' << r.tuples[t][p].second;
    os << '\n';
  }
  os << "summary," << format_double(r.value) << ",mean_distance=" << format_double(r.mean_distance)
     << '\n';
}

}  // namespace eulerstat
