#include <gtest/gtest.h>

#include <algorithm>
#include <cstring>
#include <sstream>

#include "eulerstat/ensemble.hpp"
#include "eulerstat/snapshot_io.hpp"
#include "support.hpp"

using namespace eulerstat;

namespace {

RunManifest small_manifest(std::size_t m, std::vector<double> times) {
  RunManifest man;
  man.spec.family = Family::flat_sheet;
  man.spec.N = 16;
  man.spec.rho = 0.1;
  man.spec.delta = 0.05;
  man.spec.base_seed = 99;
  man.solver.N = 16;
  man.m = m;
  man.output_times = std::move(times);
  man.hash = 0x1234;
  return man;
}

EnsembleSnapshot snapshot_of(std::vector<SpectralField> fields) {
  EnsembleSnapshot s;
  s.N = fields.front().resolution();
  s.fields = std::move(fields);
  s.sample_seeds.assign(s.fields.size(), 0);
  return s;
}

}  // namespace

TEST(RunEnsemble, SingleSampleAtTimeZeroIsTheInitialField) {
  const RunManifest man = small_manifest(1, {0.0});
  const EnsembleRun run = run_ensemble(man);
  ASSERT_EQ(run.snapshots.size(), 1u);
  EXPECT_EQ(run.snapshots[0].fields[0], generate_sample(man.spec, 0));
  EXPECT_EQ(run.snapshots[0].sample_seeds[0], sample_seed(99, 0));
  EXPECT_EQ(run.snapshots[0].manifest_hash, 0x1234u);
}

TEST(RunEnsemble, RepeatableAndSchedulingIndependent) {
  const RunManifest man = small_manifest(4, {0.0, 0.2});
  const EnsembleRun a = run_ensemble(man, 1);
  const EnsembleRun b = run_ensemble(man, 1);
  const EnsembleRun c = run_ensemble(man, 3);
  for (std::size_t t = 0; t < 2; ++t)
    for (std::size_t i = 0; i < 4; ++i) {
      EXPECT_EQ(a.snapshots[t].fields[i], b.snapshots[t].fields[i]);
      EXPECT_EQ(a.snapshots[t].fields[i], c.snapshots[t].fields[i]);
    }
}

TEST(RunEnsemble, EnergyAndL2BoundsHold) {
  RunManifest man = small_manifest(4, {0.0, 0.4});
  man.spec.N = man.solver.N = 32;
  man.spec.rho = 0.0;
  const EnsembleRun run = run_ensemble(man);
  double max0 = 0.0, max1 = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    const double e0 = run.snapshots[0].fields[i].energy();
    const double e1 = run.snapshots[1].fields[i].energy();
    EXPECT_LE(e1, e0);
    max0 = std::max(max0, l2_norm(run.snapshots[0].fields[i]));
    max1 = std::max(max1, l2_norm(run.snapshots[1].fields[i]));
    EXPECT_LE(run.ledgers[i][1].balance_error(), 1e-4);
  }
  EXPECT_LE(max1, max0);
}

TEST(RunEnsemble, InvalidManifestsAreRejected) {
  RunManifest man = small_manifest(2, {0.2, 0.1});
  EXPECT_THROW(run_ensemble(man), ArgumentError);
  man = small_manifest(2, {0.1});
  man.solver.N = 32;
  EXPECT_THROW(run_ensemble(man), ArgumentError);
  man = small_manifest(0, {0.1});
  EXPECT_THROW(run_ensemble(man), ArgumentError);
}

TEST(RunEnsemble, BlowUpAbortsOrIsTolerated) {
  // explicit-diffusion bound violated by a factor of ~100
  RunManifest man = small_manifest(2, {2000.0});
  man.solver.visc_safety = 100.0;
  man.solver.cfl = 1e9;
  try {
    run_ensemble(man);
    FAIL() << "expected a blow-up";
  } catch (const SampleBlowUp& e) {
    EXPECT_EQ(e.failure().index, 0u);
    EXPECT_GT(e.failure().time, 0.0);
  }
  man.tolerate_failures = true;
  EXPECT_THROW(run_ensemble(man), BlowUpError);
}

TEST(MeanField, Examples) {
  const SpectralField u = testing_support::random_field(8, 40, 1);
  EXPECT_EQ(mean_field(snapshot_of({u})), u);
  EXPECT_EQ(mean_field(snapshot_of({u, -1.0 * u})).energy(), 0.0);
  EXPECT_LE(testing_support::max_abs_diff(mean_field(snapshot_of({u, u, u})), u), 1e-15);
}

TEST(VarianceField, Examples) {
  const SpectralField u = testing_support::random_field(8, 40, 1);
  const SpectralField v = testing_support::random_field(8, 40, 2);
  const ScalarGrid z = variance_field(snapshot_of({u}));
  for (double x : z.v) EXPECT_EQ(x, 0.0);

  const ScalarGrid pm = variance_field(snapshot_of({u, -1.0 * u}));
  const VectorGrid g = to_physical(u, pm.m);
  for (std::size_t i = 0; i < pm.v.size(); ++i)
    EXPECT_NEAR(pm.v[i], g.u1[i] * g.u1[i] + g.u2[i] * g.u2[i], 1e-12);

  const ScalarGrid a = variance_field(snapshot_of({u, v, u + v}));
  const ScalarGrid b = variance_field(snapshot_of({u + v, u, v}));
  for (std::size_t i = 0; i < a.v.size(); ++i) EXPECT_NEAR(a.v[i], b.v[i], 1e-14 * a.v[i]);
}

TEST(Snapshot, RoundTripIsBitExact) {
  const EnsembleRun run = run_ensemble(small_manifest(3, {0.0, 0.05}));
  std::stringstream buf;
  write_snapshot(buf, run.snapshots[1]);
  const std::string bytes = buf.str();
  const EnsembleSnapshot back = read_snapshot(buf);
  EXPECT_EQ(back.N, 16);
  EXPECT_EQ(back.time, 0.05);
  EXPECT_EQ(back.manifest_hash, 0x1234u);
  EXPECT_EQ(back.sample_seeds, run.snapshots[1].sample_seeds);
  ASSERT_EQ(back.fields.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(back.fields[i], run.snapshots[1].fields[i]);
  std::stringstream again;
  write_snapshot(again, back);
  EXPECT_EQ(again.str(), bytes);
}

TEST(Snapshot, ByteLayout) {
  SpectralField f(1);
  f.at(-1, -1) = {complex(1.5, -2.0), complex(0.25, 3.0)};
  EnsembleSnapshot s = snapshot_of({f});
  s.time = 0.5;
  s.manifest_hash = 0x0102030405060708ULL;
  s.sample_seeds = {0xAABBCCDDEEFF0011ULL};
  std::stringstream buf;
  write_snapshot(buf, s);
  const std::string b = buf.str();
  // 4 + 4 + 4 + 4 + 8 + 8 header, 8 seed, 9 modes x 2 components x 16 bytes
  ASSERT_EQ(b.size(), 32u + 8u + 9u * 32u);
  EXPECT_EQ(b.substr(0, 4), "EUSS");
  auto u32 = [&](std::size_t off) {
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[off + i]);
    return v;
  };
  auto u64 = [&](std::size_t off) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[off + i]);
    return v;
  };
  auto f64 = [&](std::size_t off) {
    const std::uint64_t bits = u64(off);
    double d;
    std::memcpy(&d, &bits, 8);
    return d;
  };
  EXPECT_EQ(u32(4), 1u);
  EXPECT_EQ(u32(8), 1u);
  EXPECT_EQ(u32(12), 1u);
  EXPECT_EQ(f64(16), 0.5);
  EXPECT_EQ(u64(24), 0x0102030405060708ULL);
  EXPECT_EQ(u64(32), 0xAABBCCDDEEFF0011ULL);
  // first mode is k = (-1, -1): component 1 then 2, (re, im) each
  EXPECT_EQ(f64(40), 1.5);
  EXPECT_EQ(f64(48), -2.0);
  EXPECT_EQ(f64(56), 0.25);
  EXPECT_EQ(f64(64), 3.0);
}

TEST(Snapshot, CorruptInputIsRejected) {
  std::stringstream bad("EUSX0000");
  EXPECT_THROW(read_snapshot(bad), FormatError);
  const EnsembleRun run = run_ensemble(small_manifest(1, {0.0}));
  std::stringstream buf;
  write_snapshot(buf, run.snapshots[0]);
  std::string bytes = buf.str();
  bytes[4] = 2;  // unknown format version
  std::stringstream v2(bytes);
  EXPECT_THROW(read_snapshot(v2), FormatError);
  std::stringstream truncated(buf.str().substr(0, 100));
  EXPECT_THROW(read_snapshot(truncated), FormatError);
}
