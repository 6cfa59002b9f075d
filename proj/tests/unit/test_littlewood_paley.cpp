#include <gtest/gtest.h>

#include <numbers>

#include "helpers.hpp"
#include "zk/bump.hpp"
#include "zk/mixed_norm.hpp"
#include "zk/norms.hpp"
#include "zk/picard.hpp"
#include "zk/projection.hpp"
#include "zk/xt_norm.hpp"
#include "zk/initial_data.hpp"

using namespace zk;
using zk::testing::random_band;
using zk::testing::random_real;
using zk::testing::rel_diff;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

TEST(Bump, ProfileValues) {
  EXPECT_EQ(bump_value(0.5), 1.0);
  EXPECT_EQ(bump_value(1.0), 1.0);
  EXPECT_EQ(bump_value(3.0), 0.0);
  EXPECT_EQ(bump_value(2.0), 0.0);
  EXPECT_EQ(delta_value(0.5), 0.0);
  EXPECT_NEAR(bump_value(1.5), 0.5, 1e-15);  // the glue is symmetric about the midpoint
  double prev = 1.0;
  for (double r = 1.0; r <= 2.0; r += 0.01) {
    EXPECT_LE(bump_value(r), prev);
    prev = bump_value(r);
  }
}

TEST(Bump, Telescopes) {
  double sum = bump_value(1.5);
  for (int k = 0; k <= 4; ++k) sum += delta_value(1.5 / std::ldexp(1.0, k));
  EXPECT_NEAR(sum, bump_value(1.5 / 32.0), 1e-15);
  const DyadicBump b;
  for (double r : {0.3, 1.7, 5.0, 20.0, 63.0}) {
    double s = b.p(r);
    for (int k = 0; k <= 5; ++k) s += b.delta_k(r, k);
    EXPECT_NEAR(s, b.p_k(r, 6), 1e-15);
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(Bump, DeltaSupport) {
  const DyadicBump b;
  EXPECT_EQ(b.delta_k(2.0, 1), 0.0);
  EXPECT_EQ(b.delta_k(8.0, 1), 0.0);
  EXPECT_GT(b.delta_k(2.1, 1), 0.0);
  EXPECT_GT(b.delta_k(7.9, 1), 0.0);
}

TEST(Bump, MaxShell) {
  EXPECT_EQ(max_shell(make_grid(8, 100.0)), -1);
  const auto g = make_grid(16, kTwoPi);  // max radius 8 sqrt 3 = 13.9
  EXPECT_EQ(max_shell(g), 3);
}

TEST(Projection, P0IsIdentityInsideUnitBall) {
  const auto g = make_grid(16, 4.0 * std::numbers::pi);  // dual spacing 1/2
  Field s(g, Representation::spectral);
  s(g.index(0, 1), 0, 0) = 1.0;  // |xi| = 0.5
  s(g.index(0, -1), 0, 0) = 1.0;
  EXPECT_LT(rel_diff(project(s, Projector::P, 0), s), 1e-15);
}

TEST(Projection, SingleModeScaledByDelta) {
  const auto g = make_grid(32, kTwoPi);
  for (int k : {0, 1, 2}) {
    Field s(g, Representation::spectral);
    const int m = static_cast<int>(1.5 * std::ldexp(1.0, k));
    s(g.index(0, m), 0, 0) = 1.0;
    const Field p = project(s, Projector::Delta, k);
    EXPECT_NEAR(p(g.index(0, m), 0, 0).real(), delta_value(m / std::ldexp(1.0, k)), 1e-15);
  }
  EXPECT_GT(delta_value(1.5), 0.0);
  EXPECT_LT(delta_value(1.5), 1.0);
}

TEST(Projection, PartitionOfUnityOnBandLimitedData) {
  const auto g = make_grid(32, kTwoPi);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Field u = random_band(g, 8.0, seed);  // |xi| <= 2^3
    Field sum = project(u, Projector::P, 0);
    for (int k = 0; k <= 3; ++k) sum += project(u, Projector::Delta, k);
    EXPECT_LT(rel_diff(sum, u), 1e-12);
    EXPECT_LT(rel_diff(sum, project(u, Projector::P, 4)), 1e-12);
  }
}

TEST(Projection, AlmostOrthogonality) {
  const auto g = make_grid(32, kTwoPi);
  const Field u = forward(random_real(g, 1));
  const double total = l2_norm(u);
  for (int j = 0; j <= 4; ++j)
    for (int k = j + 2; k <= 4; ++k) {
      const Field a = project(u, Projector::Delta, j), b = project(u, Projector::Delta, k);
      Complex dot{};
      for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * std::conj(b[i]);
      EXPECT_LT(std::abs(dot) * g.dual_cell_volume(), 1e-12 * total * total);
    }
  // Sum of squares of a partition of unity with at most two overlaps lies in [1/2, 1]
  const auto d = shell_decomposition(u);
  const Field inside = project(u, Projector::P, max_shell(g) + 1);
  double sq = d.p0 * d.p0;
  for (double v : d.shells) sq += v * v;
  EXPECT_LE(sq, l2_norm(inside) * l2_norm(inside) * (1 + 1e-12));
  EXPECT_GE(sq, 0.5 * l2_norm(inside) * l2_norm(inside));
}

TEST(Projection, AxisProjectorsAndLesssim) {
  const auto g = make_grid(32, kTwoPi);
  const Field u = random_band(g, 10.0, 4);
  Field sum = project(u, Projector::Px, 0);
  for (int k = 0; k <= 3; ++k) sum += project(u, Projector::Deltax, k);
  EXPECT_LT(rel_diff(sum, project(u, Projector::Px, 4)), 1e-12);
  EXPECT_LT(rel_diff(project(u, Projector::PLesssim, 1), project(u, Projector::P, 1 + kLesssimMargin + 1)), 1e-15);
}

TEST(Projection, RejectsNegativeBallIndexAndFlagsEmpty) {
  const auto g = make_grid(8, kTwoPi);
  const Field u = random_real(g, 2);
  EXPECT_THROW(project(u, Projector::P, -1), InvalidArgument);
  ProjectionFlags f;
  const Field p = project(u, Projector::Delta, 10, &f);
  EXPECT_TRUE(f.out_of_band);
  EXPECT_EQ(l2_norm(p), 0.0);
  EXPECT_TRUE(p.is_physical());
}

TEST(Norms, ZeroAndConstant) {
  const auto g = make_grid(8, kTwoPi);
  const Field z(g, Representation::physical);
  EXPECT_EQ(sobolev_norm(z, 1.0), 0.0);
  EXPECT_EQ(besov_norm(z, 1.0), 0.0);
  Field s(g, Representation::spectral);
  s[0] = 0.75;
  for (double sv : {0.0, 1.0, 2.5}) EXPECT_NEAR(sobolev_norm(s, sv), 0.75 * std::sqrt(g.dual_cell_volume()), 1e-15);
}

TEST(Norms, SobolevOfSingleModeMatchesClosedForm) {
  const auto g = make_grid(16, kTwoPi);
  const Field f = Field::from_function(g, [](double x, double y, double) { return std::cos(3 * x + 4 * y); });
  // ||cos||_{L2}^2 = L^3 / 2, weight (1 + 25)^s
  const double l2 = std::sqrt(std::pow(kTwoPi, 3) / 2);
  EXPECT_NEAR(l2_norm(f), l2, 1e-10 * l2);
  EXPECT_NEAR(sobolev_norm(f, 1.0), std::sqrt(26.0) * l2, 1e-10 * l2);
}

TEST(Norms, DyadicAgainstDirectWithinFour) {
  const auto g = make_grid(16, kTwoPi / 0.75);
  double worst = 1.0;
  for (double s : {0.0, 1.0, 1.5}) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const Field u = random_band(g, 7.0, 1000 + seed);
      const double r = sobolev_norm_dyadic(u, s) / sobolev_norm(u, s);
      worst = std::max({worst, r, 1.0 / r});
    }
  }
  RecordProperty("measured_C", std::to_string(worst));
  EXPECT_LE(worst, 4.0);
}

TEST(Norms, BesovSingleShell) {
  const auto g = make_grid(32, kTwoPi);
  Field s(g, Representation::spectral);
  s(g.index(0, 6), 0, 0) = 1.0;  // |xi| = 6: delta_1 and delta_2 active
  s(g.index(0, -6), 0, 0) = 1.0;
  const double a = delta_value(3.0), b = delta_value(1.5);
  const double unit = std::sqrt(2 * g.dual_cell_volume());
  EXPECT_NEAR(besov_norm(s, 1.0), (2 * a + 4 * b) * unit, 1e-14);
  EXPECT_NEAR(a + b, 1.0, 1e-15);
}

TEST(Norms, EmbeddingChainRatiosBounded) {
  const auto g = make_grid(16, kTwoPi);
  double lo1 = 1e300, hi1 = 0, lo2 = 1e300, hi2 = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Field u = random_band(g, 7.0, 50 + seed);
    const double h1 = sobolev_norm(u, 1.0), b = besov_norm(u, 1.0), hs = sobolev_norm(u, 1.2);
    lo1 = std::min(lo1, b / h1), hi1 = std::max(hi1, b / h1);
    lo2 = std::min(lo2, hs / b), hi2 = std::max(hi2, hs / b);
  }
  EXPECT_GT(lo1, 0.25);
  EXPECT_LT(hi1 / lo1, 2.0);
  EXPECT_LT(hi2 / lo2, 2.0);
}

static Trajectory constant_trajectory(const FourierGrid& g, double c, int frames, double dt) {
  Trajectory t(g, 0.0, dt);
  for (int m = 0; m < frames; ++m) t.push_back(Field::from_function(g, [=](double, double, double) { return c; }));
  return t;
}

TEST(MixedNorm, ConstantFieldMaximal) {
  const auto g = make_grid({8, 8, 8}, {3.0, 2.0, 5.0});
  const auto t = constant_trajectory(g, 0.7, 5, 0.1);
  EXPECT_NEAR(mixed_norm(t, maximal_norm_spec()), 0.7 * std::sqrt(3.0), 1e-14);
  EXPECT_NEAR(mixed_norm(t, kernel_norm_spec()), 0.7 * 3.0, 1e-14);
  EXPECT_NEAR(mixed_norm(t, energy_norm_spec()), 0.7 * std::sqrt(30.0), 1e-13);
}

TEST(MixedNorm, SingleFrameSmoothing) {
  const auto g = make_grid(8, 2.0);
  const Field f = random_real(g, 3);
  Trajectory t(g, 0.0, 0.05);
  t.push_back(f);
  double best = 0;
  for (int ix = 0; ix < 8; ++ix) {
    double s = 0;
    for (int iz = 0; iz < 8; ++iz)
      for (int iy = 0; iy < 8; ++iy) s += std::norm(f(ix, iy, iz));
    best = std::max(best, std::sqrt(s * 0.25 * 0.25 * 0.05));
  }
  EXPECT_NEAR(mixed_norm(t, smoothing_norm_spec()), best, 1e-14 * best);
}

TEST(MixedNorm, WeightClosedForm) {
  const auto g = make_grid(8, 2.0);
  const Field f = random_real(g, 4);
  const double dt = 0.1;
  Trajectory t(g, 0.0, dt);
  for (int m = 0; m < 11; ++m) t.push_back(f);
  const double alpha = 0.375;
  double w2 = 0.0;
  for (int m = 0; m < 11; ++m) w2 += std::pow(m * dt, 2 * alpha);
  MixedNormSpec weighted = smoothing_norm_spec();
  weighted.weight_alpha = alpha;
  EXPECT_NEAR(mixed_norm(t, weighted), mixed_norm(t, smoothing_norm_spec()) * std::sqrt(w2 / 11.0), 1e-13);
  EXPECT_NEAR(mixed_norm(t, maximal_norm_spec(alpha)), mixed_norm(t, maximal_norm_spec()) * std::pow(1.0, alpha),
              1e-13);
  EXPECT_NEAR(mixed_norm(t, kernel_norm_spec(0.25)), mixed_norm(t, kernel_norm_spec()), 1e-13);
}

TEST(MixedNorm, InnerSupOverTime) {
  const auto g = make_grid(8, 2.0);
  Trajectory t(g, 0.0, 0.5);
  t.push_back(Field::from_function(g, [](double, double, double) { return 1.0; }));
  t.push_back(Field::from_function(g, [](double, double, double) { return -3.0; }));
  t.push_back(Field::from_function(g, [](double, double, double) { return 2.0; }));
  EXPECT_NEAR(mixed_norm(t, maximal_norm_spec()), 3.0 * std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(mixed_norm(t, maximal_norm_spec(0.5)), 3.0 * std::sqrt(0.5) * std::sqrt(2.0), 1e-14);
}

TEST(MixedNorm, RejectsBadSpecs) {
  const auto g = make_grid(8, 2.0);
  EXPECT_THROW(MixedNormAccumulator(g, {kAxisX, Exponent::two, kAxisY, Exponent::two, {}}, 0.1), InvalidArgument);
  EXPECT_THROW(MixedNormAccumulator(g, maximal_norm_spec(), 0.0), InvalidArgument);
  EXPECT_THROW(mixed_norm(Trajectory(g, 0.0, 0.1), maximal_norm_spec()), InvalidArgument);
}

TEST(XtNorm, ZeroTrajectory) {
  const auto g = make_grid(8, kTwoPi);
  const auto t = constant_trajectory(g, 0.0, 4, 0.1);
  const XtNorm x = xt_norm(t, XtFlavor::besov(), 0.375);
  EXPECT_EQ(x.N, 0.0);
  EXPECT_EQ(x.T, 0.0);
  EXPECT_EQ(x.M, 0.0);
  EXPECT_EQ(x.total, 0.0);
}

TEST(XtNorm, ParameterChecks) {
  const auto g = make_grid(8, kTwoPi);
  const auto t = constant_trajectory(g, 0.0, 4, 0.1);
  EXPECT_THROW(xt_norm(t, XtFlavor::besov(), 0.3), InvalidArgument);
  EXPECT_THROW(xt_norm(t, XtFlavor::besov(), 0.5), InvalidArgument);
  EXPECT_THROW(xt_norm(t, XtFlavor::sobolev(1.5, 0.6), 0.4), InvalidArgument);
  EXPECT_NO_THROW(xt_norm(t, XtFlavor::sobolev(1.5, 0.25), 0.4));
}

// Energy per shell is constant under the free flow, so N reduces to the Besov norm.
TEST(XtNorm, EnergyComponentOfFreeEvolution) {
  const auto g = make_grid(16, kTwoPi);
  const Field phi = random_band(g, 7.0, 12);
  const Trajectory t = free_trajectory(phi, 0.5, 17);
  const XtNorm b = xt_norm(t, XtFlavor::besov(), 0.375);
  EXPECT_NEAR(b.N, besov_norm(phi, 1.0), 1e-10 * b.N);
  const XtNorm s = xt_norm(t, XtFlavor::sobolev(1.5, 0.25), 0.375);
  EXPECT_NEAR(s.N, sobolev_norm_dyadic(phi, 1.5), 1e-10 * s.N);
  EXPECT_NEAR(b.total, b.N + b.T + b.M, 1e-14 * b.total);
  EXPECT_EQ(b.truncation_index, max_shell(g));
}

TEST(XtNorm, MaximalComponentBoundedAcrossShells) {
  std::vector<double> ratios;
  for (int k = 0; k <= 3; ++k) {
    const auto g = make_grid(16, std::numbers::pi * 16 / std::ldexp(4.0, k));
    const Field phi = inverse(random_shell_spectral(g, k, 3));
    const Trajectory t = free_trajectory(phi, 0.5, 33);
    const XtNorm x = xt_norm(t, XtFlavor::besov(), 0.375);
    ratios.push_back(x.shells.maximal[k + 1] / (std::ldexp(1.0, k) * l2_norm(project(phi, Projector::Delta, k))));
  }
  const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  EXPECT_LT(*hi / *lo, 4.0);
}
