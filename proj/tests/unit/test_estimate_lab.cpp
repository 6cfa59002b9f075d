#include <gtest/gtest.h>

#include <numbers>
#include <sstream>

#include "helpers.hpp"
#include "zk/estimates.hpp"
#include "zk/oscillatory.hpp"
#include "zk/report.hpp"

using namespace zk;
using zk::testing::random_band;

constexpr double kPi = std::numbers::pi;

static Field zero_mean_band(const FourierGrid& g, double radius, std::uint64_t seed) {
  Field s = forward(random_band(g, radius, seed));
  s[0] = 0.0;
  return s;
}

// Per-column L^2_{yzt} profile by direct mode sums: partial Plancherel in (y, z), then the
// left-endpoint time sum of |sum_xi c(xi) exp(i (x xi + t omega))|^2.
TEST(Kato, ProfileMatchesDirectModeSum) {
  const auto g = make_grid({8, 8, 8}, {2 * kPi, 3.0, 4.0});
  const Field s = zero_mean_band(g, 3.0, 5);
  const double window = 0.3;
  const int n_t = 12;
  const KatoResult k = kato_smoothing(s, window, n_t);
  const double dt = window / n_t;
  const double pre = g.dual_spacing(0) / std::sqrt(2 * kPi);
  for (int ix = 0; ix < 8; ++ix) {
    const double x = g.coordinate(0, ix);
    double acc = 0.0;
    for (int j = 0; j < n_t; ++j) {
      const double t = -0.5 * window + j * dt;
      for (int iz = 0; iz < 8; ++iz)
        for (int iy = 0; iy < 8; ++iy) {
          Complex col{};
          for (int jx = 0; jx < 8; ++jx) {
            const double xi = g.frequency(0, jx);
            const double w = symbol_omega(g.odd_frequency(0, jx), g.frequency(1, iy), g.frequency(2, iz));
            col += s(jx, iy, iz) * std::polar(1.0, x * xi + t * w);
          }
          acc += std::norm(pre * col) * g.dual_spacing(1) * g.dual_spacing(2) * dt;
        }
    }
    EXPECT_NEAR(k.profile[ix], std::sqrt(acc), 1e-12 * std::sqrt(acc));
  }
}

// Long-window limit: per column, (1/W) int |U(t) phi|^2 dt dy dz -> sum over (eta, mu) of the
// diagonal in xi, i.e. dx-independent; the CV goes to 0 like the distinct-omega sinc tails.
TEST(Kato, CoefficientOfVariationFallsUnderDoubling) {
  const auto g = make_grid(16, 2 * kPi);
  const Field phi = random_shell(g, 1, 3);
  const auto r = kato_smoothing_check(phi, 0.25, 3);
  EXPECT_EQ(r.verdict, Verdict::pass) << r.reason;
  ASSERT_EQ(r.samples.size(), 4u);
  EXPECT_LT(r.samples.back().ratio, r.samples.front().ratio);
  EXPECT_LT(r.metrics.at("unitarity_drift"), 1e-12);
}

TEST(Kato, ZeroDataAndNonZeroMean) {
  const auto g = make_grid(8, 2 * kPi);
  const KatoResult z = kato_smoothing(Field(g, Representation::physical), 0.5, 8);
  EXPECT_EQ(z.ratio, 0.0);
  EXPECT_EQ(z.cv, 0.0);
  for (double v : z.profile) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(kato_smoothing_check(Field(g, Representation::physical), 0.5).verdict, Verdict::skip);
  EXPECT_THROW(kato_smoothing(gaussian(g, 0.5, 1.0), 0.5, 8), SingularMultiplier);
  EXPECT_THROW(kato_smoothing(random_shell(g, 1, 1), 0.0, 8), InvalidArgument);
}

TEST(Kato, DefaultSamplesResolvePhase) {
  const auto g = make_grid(16, 2 * kPi);
  const Field s = random_shell_spectral(g, 1, 2);
  const int n = kato_default_samples(s, 1.0);
  EXPECT_GE(n, 16);
  EXPECT_GE(n, static_cast<int>(std::ceil(omega_span(s) / kPi)));
}

TEST(Maximal, ZeroShellIsSkipMarked) {
  const auto g = maximal_grid(16, 1);
  EXPECT_FALSE(maximal_ratio_for(Field(g, Representation::physical), 1, 0.375, 0.5, 9).has_value());
  EXPECT_FALSE(maximal_ratio_p0(Field(g, Representation::physical), 0.5, 9).has_value());
}

TEST(Maximal, ParameterPreconditions) {
  EXPECT_THROW(check_maximal_parameters(0.2, 0.5, false), InvalidArgument);
  EXPECT_THROW(check_maximal_parameters(0.375, 1.5, false), InvalidArgument);
  EXPECT_NO_THROW(check_maximal_parameters(0.2, 0.5, true));
  try {
    maximal_ratio(0, 2, 0.2, 0.5, 1);
    FAIL();
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("3/8"), std::string::npos);
  }
}

TEST(Maximal, ShellGridCoversSupport) {
  for (int k = 0; k <= 4; ++k) {
    const auto g = maximal_grid(16, k);
    EXPECT_NEAR(g.nyquist(0), std::ldexp(4.0, k), 1e-12);
  }
}

TEST(Maximal, WeightIsMonotoneInAlpha) {
  const auto g = maximal_grid(16, 1);
  const Field phi = random_shell(g, 1, 4);
  const double a = *maximal_ratio_for(phi, 1, 0.375, 0.5, 17);
  const double b = *maximal_ratio_for(phi, 1, 0.45, 0.5, 17);
  EXPECT_LT(b, a);  // t^alpha decreases in alpha on (0, 1)
}

TEST(Maximal, SmallScanAndExploratoryFlag) {
  MaximalOptions o;
  o.n = 16;
  o.n_t = 17;
  const auto r = maximal_ratio(0, 2, 0.375, 0.5, 2, o);
  EXPECT_EQ(r.aggregate.size(), 3u);
  EXPECT_TRUE(r.fitted_slope.has_value());
  o.exploratory = true;
  const auto e = maximal_ratio(0, 2, 0.0, 0.5, 2, o);
  EXPECT_EQ(e.verdict, Verdict::inconclusive);
  EXPECT_FALSE(e.flags.empty());
}

TEST(Sharpness, ResolutionGuard) {
  EXPECT_THROW(require_sharpness_resolution(make_grid(16, 2 * kPi), 2), GridTooCoarse);
  EXPECT_NO_THROW(require_sharpness_resolution(sharpness_grid(2), 2));
}

TEST(Sharpness, ExponentsSlopeAndPhaseBound) {
  const auto r = sharpness_witness(1, 3, 0.5, 0.375);
  EXPECT_EQ(r.verdict, Verdict::pass) << r.reason;
  for (double s : {0.5, 1.0, 1.5}) EXPECT_NEAR(r.metrics.at("hs_exponent_s" + format_double(s)), s, 0.1);
  ASSERT_TRUE(r.fitted_slope.has_value());
  EXPECT_GE(*r.fitted_slope, 0.8);
  EXPECT_LE(r.metrics.at("phase_max_k2"), r.metrics.at("phase_bound_k2"));
}

TEST(Hs, ShellZeroReducesToP0Ratio) {
  const auto g = make_grid(16, 8 * kPi);
  const Field phi = inverse(random_bandlimited_spectral(g, 1.0, 3, [](double) { return 1.0; }));
  Field p = phi;
  p.make_real();
  const double hs = *hs_maximal_ratio(p, 1.2, 0.5, 17);
  const double p0 = *maximal_ratio_p0(p, 0.5, 17);
  EXPECT_NEAR(hs * sobolev_norm(p, 1.2) / l2_norm(p), p0, 1e-12 * p0);
  EXPECT_LT(*hs_maximal_ratio(p, 2.0, 0.5, 17), hs);
}

TEST(Hs, Preconditions) {
  EXPECT_THROW(hs_maximal_check(1.0, 0.5, 2), InvalidArgument);
  EXPECT_THROW(hs_maximal_check(1.2, 0.0, 2), InvalidArgument);
  EXPECT_FALSE(hs_maximal_ratio(Field(make_grid(8, 1.0), Representation::physical), 1.2, 0.5, 9).has_value());
}

TEST(Hs, MultishellIsGridIndependent) {
  const auto a = make_grid(16, 2 * kPi), b = make_grid(32, 2 * kPi);
  const Field fa = random_multishell(a, 2, 9), fb = random_multishell(b, 2, 9);
  EXPECT_NEAR(l2_norm(fa), l2_norm(fb), 1e-12 * l2_norm(fa));
}

// Independent oracle: 4 pi int_0^2 r^2 p(r) dr with composite Simpson on [1, 2].
static double ball_integral() {
  const int n = 20000;
  const double h = 1.0 / n;
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double r = 1.0 + i * h;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    s += w * r * r * bump_value(r);
  }
  return 4.0 * kPi * (1.0 / 3.0 + s * h / 3.0);
}

TEST(Oscillatory, I0AtOriginIsBallIntegral) {
  const double want = ball_integral();
  EXPECT_GT(want, 0.0);
  const Complex q = oscillatory_quadrature(OscillatoryKernel::i0(), 0.0, {0, 0, 0});
  EXPECT_NEAR(q.real(), want, 1e-8 * want);
  EXPECT_NEAR(q.imag(), 0.0, 1e-10);
  const Complex f = oscillatory_fft_at(OscillatoryKernel::i0(), 0.0, {0, 0, 0});
  EXPECT_NEAR(std::abs(f - q) / want, 0.0, 1e-6);
}

TEST(Oscillatory, I0BoundedByBallIntegral) {
  const double bound = ball_integral();
  Rng rng(4);
  for (int j = 0; j < 3; ++j) {
    const double t = 0.3 * rng.uniform();
    const std::array<double, 3> x{2 * rng.normal(), 2 * rng.normal(), 2 * rng.normal()};
    EXPECT_LE(std::abs(oscillatory_quadrature(OscillatoryKernel::i0(), t, x)), bound * (1 + 1e-9));
  }
}

TEST(Oscillatory, IkAtOriginFactorises) {
  // int p_k = int delta_k = 3 2^k for the symmetric profile, so I_k(0, 0) = 27 * 8^k.
  for (int k : {1, 2}) {
    for (int axis : {0, 1}) {
      const auto K = OscillatoryKernel::ik(axis, k);
      const Complex q = oscillatory_quadrature(K, 0.0, {0, 0, 0});
      EXPECT_NEAR(q.real(), 27.0 * std::pow(8.0, k), 1e-9 * 27.0 * std::pow(8.0, k));
    }
  }
}

TEST(Oscillatory, FftModeAgreesWithQuadrature) {
  SpotCheckOptions o;
  o.spots = 2;
  const auto r = oscillatory_spot_checks({OscillatoryKernel::i0(), OscillatoryKernel::ik(0, 1), OscillatoryKernel::ik(2, 2)}, o);
  EXPECT_EQ(r.verdict, Verdict::pass) << r.metrics.at("max_rel_error");
  EXPECT_LT(r.metrics.at("max_rel_error"), 1e-6);
}

TEST(Oscillatory, SymbolNeedsResolvedSupport) {
  EXPECT_THROW(kernel_symbol(OscillatoryKernel::ik(0, 3), make_grid(16, 2 * kPi)), GridTooCoarse);
  EXPECT_THROW(OscillatoryKernel::ik(3, 1), InvalidArgument);
  EXPECT_THROW(OscillatoryKernel::ik(0, 0), InvalidArgument);
  EXPECT_EQ(OscillatoryKernel::ik(1, 3).name(), "I3_y");
}

TEST(Report, CsvSchemaAndSlope) {
  EstimateReport r;
  r.name = "demo";
  r.samples = {{0, 0, 1.0}, {1, 0, 2.0}, {2, 0, 4.0}};
  r.aggregate = {{0, 1.0}, {1, 2.0}, {2, 4.0}};
  r.fit_slope();
  ASSERT_TRUE(r.fitted_slope.has_value());
  EXPECT_NEAR(*r.fitted_slope, 1.0, 1e-14);
  EXPECT_NEAR(r.aggregate_spread(), 4.0, 1e-14);
  r.verdict = Verdict::pass;
  r.config_hash = 0xabcull;
  std::ostringstream os;
  write_report_csv(os, r);
  const std::string csv = os.str();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "k,trial,ratio,slope,verdict,config_hash");
  EXPECT_NE(csv.find("max"), std::string::npos);
  EXPECT_NE(csv.find("0000000000000abc"), std::string::npos);
}

TEST(Report, FormatRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 12345.678}) EXPECT_EQ(std::stod(format_double(v)), v);
  EXPECT_THROW(ols_slope({1, 2}, {1, 2}), InvalidArgument);
}
