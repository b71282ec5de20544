#include <gtest/gtest.h>

#include <cmath>

#include "eulerstat/spectral_field.hpp"
#include "support.hpp"

using namespace eulerstat;
using testing_support::random_field;
using testing_support::random_raw_field;
using testing_support::random_scalar;

namespace {

const complex I(0.0, 1.0);

SpectralField cos_x1_in_u2(int n) {
  SpectralField f(n);
  f.at(1, 0) = {0.0, 0.5};
  f.at(-1, 0) = {0.0, 0.5};
  return f;
}

}  // namespace

TEST(ToPhysical, SingleModeSynthesizesCosine) {
  const std::size_t m = 17;
  const VectorGrid g = to_physical(cos_x1_in_u2(4), m);
  for (std::size_t j1 = 0; j1 < m; ++j1)
    for (std::size_t j2 = 0; j2 < m; ++j2) {
      EXPECT_NEAR(g.u1[j1 * m + j2], 0.0, 1e-15);
      EXPECT_NEAR(g.u2[j1 * m + j2], std::cos(grid_coordinate(j1, m)), 1e-14);
    }
}

TEST(ToPhysical, ZeroFieldGivesZeroGrid) {
  const VectorGrid g = to_physical(SpectralField(6));
  for (double v : g.u1) EXPECT_EQ(v, 0.0);
  for (double v : g.u2) EXPECT_EQ(v, 0.0);
}

TEST(ToPhysical, RejectsUnderResolvedGrid) {
  EXPECT_THROW(to_physical(SpectralField(8), 16), ResolutionError);
  EXPECT_NO_THROW(to_physical(SpectralField(8), 17));
}

TEST(ToPhysical, MatchesDirectSummationOffAndOnGrid) {
  const SpectralField f = random_raw_field(5, 11);
  const std::size_t m = 13;
  const VectorGrid g = to_physical(f, m);
  for (std::size_t j1 : {0u, 3u, 7u, 12u})
    for (std::size_t j2 : {0u, 5u, 11u}) {
      // oracle: naive double sum written out here
      double u1 = 0.0, u2 = 0.0;
      const double x1 = grid_coordinate(j1, m), x2 = grid_coordinate(j2, m);
      f.for_each([&](int k1, int k2, const Vec2c& c) {
        const complex e = std::exp(I * (k1 * x1 + k2 * x2));
        u1 += (c.x * e).real();
        u2 += (c.y * e).real();
      });
      EXPECT_NEAR(g.u1[j1 * m + j2], u1, 1e-12);
      EXPECT_NEAR(g.u2[j1 * m + j2], u2, 1e-12);
      const auto [e1, e2] = evaluate_at(f, x1, x2);
      EXPECT_NEAR(e1, u1, 1e-12);
      EXPECT_NEAR(e2, u2, 1e-12);
    }
}

TEST(FromPhysical, CosineGridGivesSingleMode) {
  const std::size_t m = 24;
  VectorGrid g(m);
  for (std::size_t j1 = 0; j1 < m; ++j1)
    for (std::size_t j2 = 0; j2 < m; ++j2) g.u2[j1 * m + j2] = std::cos(grid_coordinate(j1, m));
  const SpectralField f = from_physical(g, 8);
  f.for_each([&](int k1, int k2, const Vec2c& c) {
    const bool hit = k2 == 0 && std::abs(k1) == 1;
    EXPECT_NEAR(std::abs(c.x), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(c.y - complex(hit ? 0.5 : 0.0)), 0.0, 1e-15);
  });
}

TEST(FromPhysical, ConstantGridGivesZeroField) {
  VectorGrid g(12);
  std::fill(g.u1.begin(), g.u1.end(), 3.0);
  std::fill(g.u2.begin(), g.u2.end(), -1.5);
  const SpectralField f = from_physical(g, 4);
  EXPECT_EQ(f.energy(), 0.0);
}

TEST(FromPhysical, RejectsNonSquareGrid) {
  VectorGrid g(12);
  g.u1.resize(12 * 11);
  EXPECT_THROW(from_physical(g, 4), ShapeError);
  ScalarGrid s(12);
  s.v.pop_back();
  EXPECT_THROW(from_physical(s, 4), ShapeError);
}

TEST(FromPhysical, RoundTripIsIdentityOnBandLimitedFields) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const SpectralField f = random_raw_field(7, seed);
    for (std::size_t m : {15u, 21u, 32u}) {
      const SpectralField back = from_physical(to_physical(f, m), 7);
      EXPECT_LE(testing_support::max_abs_diff(f, back), 1e-13);
    }
  }
}

TEST(FromPhysical, ParsevalAgainstGridQuadrature) {
  const SpectralField f = random_raw_field(9, 3);
  const std::size_t m = 27;
  const VectorGrid g = to_physical(f, m);
  double quad = 0.0;
  for (std::size_t i = 0; i < m * m; ++i) quad += g.u1[i] * g.u1[i] + g.u2[i] * g.u2[i];
  quad /= static_cast<double>(m * m);
  EXPECT_NEAR(quad / f.energy(), 1.0, 1e-12);
}

TEST(SpectralField, InvariantsAfterArithmetic) {
  const SpectralField a = random_raw_field(6, 1);
  const SpectralField b = random_raw_field(6, 2);
  EXPECT_TRUE(testing_support::hermitian(a + b, 1e-15));
  EXPECT_TRUE(testing_support::hermitian(2.5 * a - b, 1e-15));
  EXPECT_THROW(SpectralField(0), ArgumentError);
  EXPECT_THROW(a + SpectralField(5), std::invalid_argument);
}

TEST(Leray, GradientModeIsAnnihilated) {
  SpectralField f(4);
  f.at(1, 0) = {1.0, 0.0};
  f.at(-1, 0) = {1.0, 0.0};
  const SpectralField p = leray_project(f);
  EXPECT_EQ(p.at(1, 0), (Vec2c{0.0, 0.0}));
}

TEST(Leray, SolenoidalModeIsKept) {
  SpectralField f(4);
  f.at(0, 1) = {1.0, 0.0};
  f.at(0, -1) = {1.0, 0.0};
  const SpectralField p = leray_project(f);
  EXPECT_EQ(p.at(0, 1), (Vec2c{1.0, 0.0}));
}

TEST(Leray, IdempotentSelfAdjointAndDivergenceFree) {
  const SpectralField u = random_raw_field(8, 4);
  const SpectralField v = random_raw_field(8, 5);
  const SpectralField pu = leray_project(u);
  EXPECT_LE(testing_support::max_abs_diff(leray_project(pu), pu), 1e-15);
  EXPECT_LE(max_divergence(pu), 1e-12 * std::sqrt(u.energy()));
  complex lhs{}, rhs{};
  const SpectralField pv = leray_project(v);
  for (std::size_t i = 0; i < u.size(); ++i) {
    lhs += std::conj(pu.coeffs()[i].x) * v.coeffs()[i].x + std::conj(pu.coeffs()[i].y) * v.coeffs()[i].y;
    rhs += std::conj(u.coeffs()[i].x) * pv.coeffs()[i].x + std::conj(u.coeffs()[i].y) * pv.coeffs()[i].y;
  }
  EXPECT_NEAR(std::abs(lhs - rhs), 0.0, 1e-12 * std::abs(lhs));
}

TEST(Vorticity, CurlOfShearFlow) {
  // u = (sin x2, 0)
  SpectralField u(4);
  u.at(0, 1) = {-0.5 * I, 0.0};
  u.at(0, -1) = {0.5 * I, 0.0};
  const ScalarSpectralField w = vorticity(u);
  // -cos x2
  EXPECT_NEAR(std::abs(w.at(0, 1) - complex(-0.5)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(w.at(0, -1) - complex(-0.5)), 0.0, 1e-15);
  double rest = 0.0;
  w.for_each([&](int k1, int k2, const complex& c) {
    if (!(k1 == 0 && std::abs(k2) == 1)) rest += std::norm(c);
  });
  EXPECT_EQ(rest, 0.0);
  EXPECT_EQ(vorticity(SpectralField(4)).energy(), 0.0);
}

TEST(Vorticity, VelocityFromVorticityInvertsCurl) {
  ScalarSpectralField w(4);
  w.at(0, 1) = -0.5;
  w.at(0, -1) = -0.5;
  const SpectralField u = velocity_from_vorticity(w);
  EXPECT_NEAR(std::abs(u.at(0, 1).x - (-0.5 * I)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(u.at(0, -1).x - (0.5 * I)), 0.0, 1e-15);
  EXPECT_EQ(velocity_from_vorticity(ScalarSpectralField(4)).energy(), 0.0);
}

TEST(Vorticity, RandomRoundTripIsExact) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const ScalarSpectralField w = random_scalar(10, 200, seed);
    const SpectralField u = velocity_from_vorticity(w);
    EXPECT_LE(max_divergence(u), 1e-12);
    const ScalarSpectralField back = vorticity(u);
    for (std::size_t i = 0; i < w.size(); ++i)
      EXPECT_NEAR(std::abs(back.coeffs()[i] - w.coeffs()[i]), 0.0, 1e-12);
    const SpectralField v = random_field(10, 200, seed + 10);
    const SpectralField v2 = velocity_from_vorticity(vorticity(v));
    EXPECT_LE(testing_support::max_abs_diff(v, v2), 1e-12);
  }
}

TEST(Vorticity, NonzeroMeanIsRejected) {
  ScalarSpectralField w(3);
  w.at(0, 0) = 1.0;
  EXPECT_THROW(velocity_from_vorticity(w), DomainError);
}

TEST(Sobolev, SingleModeValues) {
  const double a = 0.3;
  SpectralField f(4);
  f.at(1, 0) = {a, 0.0};
  f.at(-1, 0) = {a, 0.0};
  EXPECT_NEAR(sobolev_norm(f, 0.0), two_pi * a * std::sqrt(2.0), 1e-15);
  EXPECT_EQ(l2_norm(SpectralField(4)), 0.0);
  SpectralField g(4);
  g.at(1, 1) = g.at(-1, -1) = {0.0, a};  // |k|^2 = 2
  // |k|^2 = 3 is not a lattice norm; check (1 + |k|^2)^e at |k|^2 = 2 and 5
  EXPECT_NEAR(sobolev_norm(g, -2.0), l2_norm(g) / 3.0, 1e-15);
  SpectralField q(4);
  q.at(2, 1) = q.at(-2, -1) = {a, a};
  EXPECT_NEAR(sobolev_norm(q, -2.0), l2_norm(q) / 6.0, 1e-15);
  EXPECT_NEAR(sobolev_norm(q, 1.0), l2_norm(q) * std::sqrt(6.0), 1e-14);
}

TEST(Truncate, IdentityDropAndContraction) {
  const SpectralField f = random_raw_field(8, 9);
  EXPECT_EQ(truncate_to(f, 8), f);
  SpectralField g(8);
  g.at(5, 2) = g.at(-5, -2) = {1.0, 1.0};
  EXPECT_EQ(truncate_to(g, 4).energy(), 0.0);
  EXPECT_LE(l2_norm(truncate_to(f, 4)), l2_norm(f));
  EXPECT_THROW(truncate_to(f, 9), ArgumentError);
  EXPECT_EQ(truncate_to(embed_into(f, 12), 8), f);
}
