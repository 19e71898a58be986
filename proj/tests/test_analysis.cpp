#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "imsm/analysis.hpp"
#include "imsm/errors.hpp"
#include "imsm/statistics.hpp"

namespace {

using namespace imsm;

SamplePath path_of(std::size_t n, double a, double b, const std::function<double(double)>& f) {
  SamplePath p;
  for (std::size_t j = 0; j < n; ++j) {
    const double t = a + (b - a) * static_cast<double>(j) / static_cast<double>(n - 1);
    p.grid.push_back(t);
    p.values.push_back(f(t));
  }
  return p;
}

SamplePath brownian(std::size_t n, std::uint32_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  const double dt = 1.0 / static_cast<double>(n - 1);
  double w = 0.0;
  return path_of(n, 0.0, 1.0, [&](double t) {
    if (t > 0.0) w += std::sqrt(dt) * z(gen);
    return w;
  });
}

TEST(UniformExponent, CuspPower) {
  // Cusp on a dyadic point: the worst piece at every level ends at it, so
  // M_j = 2^(-0.4 j) exactly.
  const auto p = path_of(8193, 0.0, 1.0, [](double t) { return std::pow(std::fabs(t - 0.5), 0.4); });
  const auto e = estimate_uniform_exponent(p, 0.0, 1.0);
  EXPECT_NEAR(e.estimate, 0.4, 1e-9);
  EXPECT_GE(e.fit_scales.size(), 4u);
  EXPECT_EQ(e.method, "dyadic_oscillation");
  EXPECT_GE(e.stderr_, 0.0);
}

TEST(UniformExponent, WeierstrassFunction) {
  // sum 2^(-0.5 k) cos(2^k t) has uniform exponent 0.5.
  const auto p = path_of(16385, 0.0, 1.0, [](double t) {
    double s = 0.0;
    for (int k = 0; k < 30; ++k) s += std::pow(2.0, -0.5 * k) * std::cos(std::ldexp(1.0, k) * t);
    return s;
  });
  EXPECT_NEAR(estimate_uniform_exponent(p, 0.0, 1.0).estimate, 0.5, 0.06);
}

TEST(UniformExponent, BrownianFollowsLevyModulus) {
  // Brownian oscillation over pieces of length L scales like
  // sqrt(L log(1/L)), so over finite levels the fitted slope sits below 1/2
  // by the log correction. The oracle fits that modulus on the same scales.
  std::vector<double> est;
  ExponentEstimate last;
  for (std::uint32_t s = 0; s < 21; ++s) {
    last = estimate_uniform_exponent(brownian(16385, s), 0.0, 1.0);
    est.push_back(last.estimate);
  }
  std::vector<double> xs, ys;
  for (double L : last.fit_scales) {
    xs.push_back(std::log2(L));
    ys.push_back(std::log2(std::sqrt(L * std::log(1.0 / L))));
  }
  const double oracle = ols(xs, ys).slope;
  EXPECT_NEAR(median(est), oracle, 0.04);
}

TEST(UniformExponent, SubintervalUsesOnlyItsPoints) {
  // Rough on [0, 0.5], linear on [0.5, 1], continuous at 0.5.
  const double joint = std::pow(0.25, 0.3);
  const auto p = path_of(16385, 0.0, 1.0, [joint](double t) {
    return t <= 0.5 ? std::pow(std::fabs(t - 0.25), 0.3) : joint + 0.1 * (t - 0.5);
  });
  EXPECT_NEAR(estimate_uniform_exponent(p, 0.5, 1.0).estimate, 1.0, 1e-9);
  EXPECT_NEAR(estimate_uniform_exponent(p, 0.0, 0.5).estimate, 0.3, 1e-9);
}

TEST(UniformExponent, ConstantPathIsInfinite) {
  const auto p = path_of(1025, 0.0, 1.0, [](double) { return 2.0; });
  EXPECT_TRUE(std::isinf(estimate_uniform_exponent(p, 0.0, 1.0).estimate));
}

TEST(UniformExponent, RejectsShortOrUnevenGrids) {
  EXPECT_THROW(estimate_uniform_exponent(path_of(300, 0.0, 1.0, [](double t) { return t; }), 0.0, 1.0),
               InputError);
  auto p = path_of(2049, 0.0, 1.0, [](double t) { return t; });
  p.grid[100] += 1e-4;
  EXPECT_THROW(estimate_uniform_exponent(p, 0.0, 1.0), InputError);
}

TEST(PointwiseExponent, PowerLawEnsemble) {
  std::vector<SamplePath> ens;
  for (int i = 1; i <= 5; ++i) {
    ens.push_back(path_of(2049, 0.0, 1.0, [i](double t) {
      return i * std::pow(std::fabs(t - 0.25), 0.6);
    }));
  }
  const auto e = estimate_pointwise_exponent(ens, 0.25, {0.5, 2, 9});
  EXPECT_NEAR(e.estimate, 0.6, 1e-9);
  EXPECT_EQ(e.location_lo, 0.25);
  EXPECT_EQ(e.location_hi, 0.25);
}

TEST(PointwiseExponent, OffGridPointRejected) {
  std::vector<SamplePath> ens{path_of(1025, 0.0, 1.0, [](double t) { return t; })};
  EXPECT_THROW(estimate_pointwise_exponent(ens, 0.3333), InputError);
}

TEST(MomentScaling, BrownianSlopeAndTarget) {
  std::vector<SamplePath> ens;
  for (std::uint32_t s = 0; s < 2000; ++s) ens.push_back(brownian(1025, 1000 + s));
  std::vector<double> ts;
  for (int k = 2; k <= 8; ++k) ts.push_back(0.25 + std::ldexp(1.0, -k));
  const auto h = HurstFunction::constant(0.8);
  // E|B(t) - B(s)|^p grows like |t - s|^(p/2).
  const auto r = moment_scaling_check(ens, 0.25, ts, 1.2, 0.05, h, 1.8);
  EXPECT_NEAR(r.fitted_slope, 0.6, 0.05);
  EXPECT_DOUBLE_EQ(r.target_slope, 1.0 + 1.2 * (0.8 - 1.0 / 1.8 - 0.05));
  EXPECT_FALSE(r.p_in_stated_range);  // 1.8 / 1.045 > 1.2
  const auto q = moment_scaling_check(ens, 0.25, ts, 1.75, 0.05, h, 1.8);
  EXPECT_TRUE(q.p_in_stated_range);
}

TEST(MomentScaling, InfiniteMomentRejected) {
  std::vector<SamplePath> ens{brownian(1025, 1)};
  EXPECT_THROW(moment_scaling_check(ens, 0.0, {0.5}, 1.8, 0.05, HurstFunction::constant(0.8), 1.8),
               ParameterError);
}

TEST(Tangent, RejectsSmallEnsembles) {
  TangentSetup s;
  s.h_list = {0.1};
  s.r_grid = {1.0};
  s.n_rep = 100;
  EXPECT_THROW(tangent_process_check(s), InputError);
}

TEST(Figures, ConstantHurstGivesEqualEstimates) {
  FigureSetup s;
  s.alpha = 1.8;
  s.hurst = HurstFunction::constant(0.8);
  s.window = {-5.0, 1.0, 0.02};
  for (int j = 0; j <= 1024; ++j) s.grid.push_back(j / 1024.0);
  s.replicates = 3;
  const auto r = figure_reproduction(s);
  EXPECT_EQ(r.x_estimates, r.y_estimates);
  EXPECT_EQ(r.x_paths[1].values, r.y_paths[1].values);
  EXPECT_EQ(r.hurst_values.size(), s.grid.size());
  EXPECT_DOUBLE_EQ(r.report()["gap"].get<double>(), 0.0);
}

TEST(Report, EnvelopeFields) {
  ExponentEstimate e;
  e.location_lo = 0.0;
  e.location_hi = 1.0;
  e.estimate = 0.3;
  const auto j = analysis_report("dyadic_oscillation", {{"alpha", 1.8}}, {e}, {{"k", 1}}, true, 0.08);
  for (const char* key : {"method", "parameters", "estimates", "fit_diagnostics", "pass", "tolerance"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j["estimates"][0]["location"], nlohmann::json::array({0.0, 1.0}));
}

}  // namespace
