#include "repairpred/errors.hpp"
#include "repairpred/scaled_predictor.hpp"
#include "repairpred/twoparam_predictor.hpp"
#include "reference_values.hpp"
#include "test_data.hpp"
#include "twoparam_checks.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace repairpred;
using namespace repairpred::twoparam;

namespace {

PredictiveContext toy(int m, int k) { return PredictiveContext::make(testdata::toy_sample(), {0.0, 0.5}, {m, k}); }

PredictiveContext scheme1(int m, int k) { return PredictiveContext::make(testdata::scheme1(), {0.0, 0.5}, {m, k}); }

}  // namespace

TEST(Hyperparams, Validation) {
  EXPECT_THROW((Hyperparams{0.0, 0.0}).validate(), std::invalid_argument);
  EXPECT_THROW((Hyperparams{0.0, -1.0}).validate(), std::invalid_argument);
  EXPECT_NO_THROW((Hyperparams{3.0, 1e-6}).validate());
  const auto none = HybridSample::from_failures({}, {5, 3, 1.0});
  EXPECT_THROW(Posterior(none, {0.0, 0.5}), ImproperPosteriorError);
}

TEST(GKernel, ToyValues) {
  const auto ctx = toy(1, 1);
  EXPECT_NEAR(g_kernel(0.0, 1.0, 1, ctx), 0.002, 1e-16);
  EXPECT_NEAR(g_kernel(0.0, 0.0, 0, ctx), 2.0 / 81.0, 1e-16);
  const double t = -0.7;
  const double ds = delta_star(t, ctx.sample());
  EXPECT_NEAR(g_kernel(t, t, 0, ctx), std::exp(-0.5 * t * t) * (1 - t) * (2 - t) / (ds * ds), 1e-15);
  EXPECT_EQ(g_kernel(t, t, 2, ctx), 0.0);
  EXPECT_THROW(g_kernel(1.0, 2.0, 1, ctx), std::domain_error);
  EXPECT_THROW(g_kernel(0.0, -1.0, 1, ctx), std::domain_error);
}

TEST(NormalizingConstant, IndependentQuadrature) {
  EXPECT_NEAR(normalizing_constant(testdata::toy_sample(), {0.0, 0.5}) / 22.984360490428028, 1.0, 1e-9);
  EXPECT_NEAR(normalizing_constant(testdata::scheme1(), {0.0, 0.5}) / 1.4195472698173719e+27, 1.0, 1e-9);
}

TEST(NormalizingConstant, StableUnderTighterTolerance) {
  const auto s = testdata::scheme2();
  const double a = normalizing_constant(s, {0.0, 0.5}, {1e-8, 1e-14, 200});
  const double b = normalizing_constant(s, {0.0, 0.5}, {1e-13, 1e-300, 2000});
  EXPECT_NEAR(a / b, 1.0, 1e-8);
}

TEST(NormalizingConstant, LaplaceLimit) {
  const auto s = testdata::toy_sample();
  const double tau = 1e6;
  // sqrt(pi / tau) f(0) (1 + f''(0) / (4 tau f(0))) with f(0) = prod x_i / delta*(0)^d = 2 / 81.
  const double laplace = std::sqrt(std::numbers::pi / tau) * 2.0 / 81.0 * (1.0 + 0.40740740740740743 / (4.0 * tau));
  const double a1 = normalizing_constant(s, {0.0, tau});
  EXPECT_NEAR(a1 * laplace, 1.0, 1e-9);
  EXPECT_NEAR(a1 / 22849.675806408551, 1.0, 1e-9);
}

TEST(Posterior, JointDensityIntegratesToOne) {
  // sigma integrates out in closed form; check the mu-marginal against its own quadrature.
  const Posterior post(testdata::scheme1(), {0.0, 0.5});
  EXPECT_NEAR(post.integrate([](double) { return 1.0; }, post.sample().first()), 1.0, 1e-9);
  EXPECT_NEAR(post.mass_above(post.lower_limit()), 1.0, 1e-9);
  EXPECT_EQ(post.density(post.sample().first()), 0.0);
}

TEST(PredictivePdf, IndependentValues) {
  const auto ctx = toy(2, 1);
  EXPECT_NEAR(predictive_pdf(-0.5, ctx) / 0.00094655311806041147, 1.0, 1e-7);
  EXPECT_NEAR(predictive_pdf(0.5, ctx) / 0.019989395027639321, 1.0, 1e-7);
  EXPECT_NEAR(predictive_pdf(1.5, ctx) / 0.20689699929599271, 1.0, 1e-7);
  EXPECT_NEAR(predictive_pdf(3.0, ctx) / 0.24847546691344263, 1.0, 1e-7);
  EXPECT_LT(predictive_pdf(-20.0, ctx), 1e-30);
}

TEST(PredictiveSurvival, IndependentValues) {
  const auto ctx = toy(2, 1);
  EXPECT_NEAR(predictive_survival(0.5, ctx), 0.993273932101161, 1e-9);
  EXPECT_NEAR(predictive_survival(1.5, ctx), 0.902831728576541, 1e-9);
  EXPECT_NEAR(predictive_survival(3.0, ctx), 0.480429483793045, 1e-9);
  EXPECT_DOUBLE_EQ(predictive_survival(-50.0, ctx), 1.0);
  EXPECT_LT(predictive_survival(1e4, ctx), 1e-12);
}

TEST(PredictiveLaw, NormalizationAcrossTargets) {
  for (int m = 1; m <= 4; ++m) {
    for (int k = 1; k <= 3; ++k) {
      SCOPED_TRACE(::testing::Message() << "m=" << m << " k=" << k);
      EXPECT_NEAR(checks::total_mass(scheme1(m, k)), 1.0, 1e-6);
    }
  }
  EXPECT_NEAR(checks::total_mass(toy(2, 1)), 1.0, 1e-6);
}

TEST(PredictiveLaw, SurvivalConsistentWithDensity) {
  for (const auto& ctx : {scheme1(1, 1), scheme1(3, 2), toy(2, 1), toy(1, 3)}) {
    EXPECT_LT(checks::branch_gap(ctx), 1e-6);
    EXPECT_LT(checks::derivative_mismatch(ctx), 1e-5);
  }
}

TEST(PredictiveLaw, DensityDerivative) {
  const auto ctx = scheme1(2, 1);
  for (double u : {0.2, 0.5, 0.9, 1.4, 2.2}) {
    const double h = 1e-4;
    const double fd = (predictive_pdf(u + h, ctx) - predictive_pdf(u - h, ctx)) / (2 * h);
    EXPECT_NEAR(predictive_pdf_derivative(u, ctx), fd, 1e-6);
  }
}

TEST(PredictiveLaw, CompositionSamplingAgrees) {
  // mu from an inverse-cdf grid on the marginal, sigma | mu ~ InvGamma(d, delta*/2), then U.
  const auto ctx = scheme1(2, 1);
  const auto& post = ctx.posterior();
  const auto& s = ctx.sample();
  const int grid = 20000;
  const double lo = post.lower_limit(), hi = s.first();
  std::vector<double> cdf(grid + 1, 0.0);
  for (int i = 1; i <= grid; ++i) {
    const double a = lo + (hi - lo) * (i - 1) / grid, b = lo + (hi - lo) * i / grid;
    cdf[i] = cdf[i - 1] + 0.5 * (b - a) * (post.density(a) + post.density(b));
  }
  auto rng = make_stream(99, 0);
  std::gamma_distribution<double> gamma(s.d(), 1.0);
  const int draws = 40000;
  const double zs[] = {0.2, 0.35, 0.5, 0.65, 0.8, 1.0, 1.2, 1.4, 1.7, 2.0};
  std::vector<int> above(10, 0);
  for (int i = 0; i < draws; ++i) {
    const double target = uniform_open(rng) * cdf.back();
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), target);
    const int j = std::max<int>(1, static_cast<int>(it - cdf.begin()));
    const double frac = (target - cdf[j - 1]) / (cdf[j] - cdf[j - 1]);
    const double mu = lo + (hi - lo) * (j - 1 + frac) / grid;
    const double sigma = 0.5 * delta_star(mu, s) / gamma(rng);
    const double u = sample_krecord({mu, sigma}, ctx.target(), rng);
    for (int z = 0; z < 10; ++z) above[z] += u > zs[z];
  }
  for (int z = 0; z < 10; ++z) {
    const double p = predictive_survival(zs[z], ctx);
    const double se = std::sqrt(p * (1 - p) / draws);
    EXPECT_NEAR(static_cast<double>(above[z]) / draws, p, 3.0 * se) << "z=" << zs[z];
  }
}

TEST(Intervals, DefiningEquations) {
  for (const auto& ctx : {scheme1(1, 1), scheme1(4, 3), toy(2, 1)}) {
    for (double alpha : {0.05, 0.1}) {
      const auto r = checks::interval_residuals(ctx, alpha);
      EXPECT_LT(r.equi_lower, 1e-8);
      EXPECT_LT(r.equi_upper, 1e-8);
      EXPECT_LT(r.hpd_density, 1e-8);
      EXPECT_LT(r.hpd_coverage, 1e-7);
    }
    EXPECT_LE(hpd_pi(ctx, 0.05).width(), equitailed_pi(ctx, 0.05).width());
  }
}

TEST(Intervals, ReferenceExamples) {
  const auto eq = equitailed_pi(scheme1(1, 1), 0.05);
  EXPECT_NEAR(eq.lower, 0.1575, 0.002);
  EXPECT_NEAR(eq.upper, 1.5235, 0.002);
  const auto hpd = hpd_pi(scheme1(1, 1), 0.05);
  EXPECT_NEAR(hpd.lower, 0.1004, 0.003);
  EXPECT_NEAR(hpd.upper, 1.4219, 0.003);
  const auto s2 = PredictiveContext::make(testdata::scheme2(), {0.0, 0.5}, {2, 2});
  const auto eq2 = equitailed_pi(s2, 0.05);
  EXPECT_NEAR(eq2.lower, 0.2947, 0.002);
  EXPECT_NEAR(eq2.upper, 1.4011, 0.002);
  const auto hpd2 = hpd_pi(s2.with_target({4, 3}), 0.05);
  EXPECT_NEAR(hpd2.lower, 0.4504, 0.003);
  EXPECT_NEAR(hpd2.upper, 1.4101, 0.003);
}

TEST(PointPredictors, IndependentMeans) {
  EXPECT_NEAR(point_sel(toy(2, 1)), 3.57391748855261, 1e-8);
  EXPECT_NEAR(point_sel(toy(1, 2)), 1.67252392059604, 1e-8);
}

TEST(PointPredictors, DefiningProperties) {
  for (const auto& ctx : {scheme1(1, 1), scheme1(2, 3), toy(2, 1)}) {
    const auto p = point_predictions(ctx);
    EXPECT_NEAR(p.sel, checks::direct_mean(ctx), 1e-4);
    EXPECT_NEAR(predictive_survival(p.ael, ctx), 0.5, 1e-9);
    const double h = predictive_pdf(p.mode, ctx);
    EXPECT_LT(std::abs(predictive_pdf_derivative(p.mode, ctx)), 1e-5 * h);
    const double step = 1e-4;
    EXPECT_LT(std::abs(predictive_pdf(p.mode + step, ctx) - predictive_pdf(p.mode - step, ctx)) / (2 * step), 1e-5 * h);
    EXPECT_GE(h, predictive_pdf(p.mode + 0.01, ctx));
    EXPECT_GE(h, predictive_pdf(p.mode - 0.01, ctx));
  }
}

TEST(PointPredictors, ReferenceExamples) {
  const auto p = point_predictions(scheme1(1, 1));
  EXPECT_NEAR(p.sel, 0.7111, 0.002);
  EXPECT_NEAR(p.ael, 0.6663, 0.002);
  EXPECT_NEAR(p.mode, 0.5692, 0.002);
  EXPECT_NEAR(point_mode(scheme1(2, 3)), 0.5693, 0.002);
  const auto s2 = PredictiveContext::make(testdata::scheme2(), {0.0, 0.5}, {4, 3});
  EXPECT_NEAR(point_sel(s2), 0.9103, 0.002);
  EXPECT_NEAR(point_ael(s2.with_target({3, 2})), 0.9263, 0.002);
}

TEST(PointPredictors, ReferenceRowsSchemeTwo) {
  const auto base = PredictiveContext::make(testdata::scheme2(), {0.0, 0.5}, {1, 1});
  for (const auto& row : refvals::kScheme2) {
    if (row.m != row.k && row.m != 4) continue;
    SCOPED_TRACE(::testing::Message() << "k=" << row.k << " m=" << row.m);
    const auto ctx = base.with_target({row.m, row.k});
    const auto p = point_predictions(ctx);
    EXPECT_NEAR(p.sel, row.sel, 0.003);
    EXPECT_NEAR(p.ael, row.ael, 0.003);
    EXPECT_NEAR(p.mode, row.mode, 0.003);
  }
}

TEST(PointPredictors, LargeTauApproachesKnownLocation) {
  // With mu pinned at xi = 0 the law is the scaled one on the same data.
  const auto s = testdata::scheme1();
  const PredictionTarget t{2, 1};
  const auto ctx = PredictiveContext::make(s, {0.0, 1e4}, t);
  const auto scaled = scaled::scaled_point_predictions(s, t);
  EXPECT_NEAR(point_sel(ctx), scaled.sel, 2e-3 * scaled.sel);
  EXPECT_NEAR(point_ael(ctx), scaled.ael, 2e-3 * scaled.ael);
}

TEST(Equivariance, ShiftAndScale) {
  const auto s = testdata::scheme1();
  const Hyperparams h{0.0, 0.5};
  EXPECT_LT(checks::equivariance_error(s, h, {1, 1}, 0.75, 1.0), 1e-10);
  EXPECT_LT(checks::equivariance_error(s, h, {3, 2}, -0.15, 1.0), 1e-10);
  EXPECT_LT(checks::equivariance_error(s, h, {1, 1}, 0.0, 3.0), 1e-10);
  EXPECT_LT(checks::equivariance_error(s, h, {2, 3}, 1.5, 0.2), 1e-10);
}

TEST(Sensitivity, StabilizesForInformativeTau) {
  const auto curve = sensitivity_curve(testdata::scheme1(), {1, 1}, 0.0, {-2, -1, 0, 1, 2});
  ASSERT_EQ(curve.size(), 5u);
  for (const auto& p : curve) {
    EXPECT_TRUE(std::isfinite(p.sel));
    EXPECT_DOUBLE_EQ(p.tau, 0.5 * std::pow(10.0, -p.l));
  }
  for (int i = 1; i <= 2; ++i) {
    EXPECT_LT(std::abs(curve[i].sel - curve[i - 1].sel), 0.005 * curve[i].sel);
  }
}
