#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "imsm/errors.hpp"
#include "imsm/stable_random.hpp"

namespace {

using namespace imsm;

// Standard SaS CDF by Fourier inversion,
// F(x) = 1/2 + (1/pi) int_0^inf sin(x t) exp(-t^alpha) / t dt,
// with composite Simpson on (0, 200]. Accurate for |x| <= 10.
double sas_cdf_oracle(double x, double alpha) {
  const int n = 200000;
  const double upper = 200.0, h = upper / n;
  auto f = [&](double t) {
    if (t == 0.0) return x;
    return std::sin(x * t) * std::exp(-std::pow(t, alpha)) / t;
  };
  double s = f(0.0) + f(upper);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(i * h);
  return 0.5 + s * h / 3.0 / std::numbers::pi;
}

double one_sample_ks(std::vector<double> v, const std::function<double(double)>& cdf) {
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double f = cdf(v[i]);
    d = std::max({d, f - i / n, (i + 1) / n - f});
  }
  return d;
}

TEST(Oracle, FourierInversionMatchesCauchy) {
  for (double x : {-3.0, -0.4, 0.0, 1.0, 5.0}) {
    EXPECT_NEAR(sas_cdf_oracle(x, 1.0), 0.5 + std::atan(x) / std::numbers::pi, 1e-7);
  }
}

TEST(Pareto, InverseSurvival) {
  EXPECT_DOUBLE_EQ(sample_pareto(2.0, 1.5, 1.0), 2.0);
  // u = (gamma / y)^alpha.
  EXPECT_NEAR(sample_pareto(0.5, 1.2, std::pow(0.5 / 3.0, 1.2)), 3.0, 1e-12);
}

TEST(Rademacher, Halves) {
  EXPECT_EQ(sample_rademacher(0.1), -1);
  EXPECT_EQ(sample_rademacher(0.5), 1);
  EXPECT_EQ(sample_rademacher(0.9), 1);
}

class PoissonMoments : public ::testing::TestWithParam<double> {};

TEST_P(PoissonMoments, MeanAndVarianceMatchLambda) {
  const double lambda = GetParam();
  RngStream rng(11, static_cast<std::uint64_t>(lambda * 10));
  const int n = 200000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double k = static_cast<double>(sample_poisson(lambda, rng));
    s += k;
    s2 += k * k;
  }
  const double m = s / n;
  const double v = s2 / n - m * m;
  EXPECT_NEAR(m, lambda, 5.0 * std::sqrt(lambda / n));
  // Var of the sample variance is about (mu4 - sigma^4) / n = (lambda + 2 lambda^2) / n.
  EXPECT_NEAR(v, lambda, 5.0 * std::sqrt((lambda + 2.0 * lambda * lambda) / n));
}

INSTANTIATE_TEST_SUITE_P(Rates, PoissonMoments, ::testing::Values(0.3, 4.0, 9.9, 10.0, 57.0, 3000.0));

TEST(Poisson, PmfAtModerateRate) {
  // PTRS branch against the exact pmf, chi-square over k in [5, 35].
  const double lambda = 20.0;
  RngStream rng(5, 5);
  const int n = 100000;
  std::vector<int> counts(60, 0);
  for (int i = 0; i < n; ++i) {
    const auto k = sample_poisson(lambda, rng);
    if (k < counts.size()) ++counts[k];
  }
  double chi2 = 0.0;
  int cells = 0;
  for (int k = 5; k <= 35; ++k) {
    const double p = std::exp(k * std::log(lambda) - lambda - std::lgamma(k + 1.0));
    const double e = n * p;
    chi2 += (counts[k] - e) * (counts[k] - e) / e;
    ++cells;
  }
  // 31 cells; the 0.999 quantile of chi-square(31) is about 61.1.
  EXPECT_LT(chi2, 61.1) << "cells=" << cells;
}

TEST(Poisson, ZeroRate) {
  RngStream rng(0, 0);
  EXPECT_EQ(sample_poisson(0.0, rng), 0u);
}

TEST(Sas, CauchyAtAlphaOne) {
  RngStream rng(2, 0);
  std::vector<double> v(20000);
  for (auto& x : v) x = sample_sas({1.0, 1.0}, rng);
  const double d = one_sample_ks(v, [](double x) { return 0.5 + std::atan(x) / std::numbers::pi; });
  // Critical value at the 0.001 level is 1.95 / sqrt(n).
  EXPECT_LT(d, 1.95 / std::sqrt(20000.0));
}

class SasLaw : public ::testing::TestWithParam<double> {};

TEST_P(SasLaw, MatchesFourierInversion) {
  const double alpha = GetParam();
  RngStream rng(3, static_cast<std::uint64_t>(alpha * 100));
  const int n = 20000;
  std::vector<double> v(n);
  for (auto& x : v) x = sample_sas({alpha, 1.0}, rng);
  std::sort(v.begin(), v.end());
  for (double x = -6.0; x <= 6.0; x += 0.5) {
    const double p = sas_cdf_oracle(x, alpha);
    const double emp =
        static_cast<double>(std::upper_bound(v.begin(), v.end(), x) - v.begin()) / n;
    EXPECT_NEAR(emp, p, 4.5 * std::sqrt(p * (1.0 - p) / n)) << "x=" << x;
  }
}

INSTANTIATE_TEST_SUITE_P(Alphas, SasLaw, ::testing::Values(0.7, 1.2, 1.5, 1.8, 1.95));

TEST(Sas, ScaleMultiplies) {
  RngStream a(9, 1), b(9, 1);
  for (int i = 0; i < 100; ++i) {
    EXPECT_NEAR(sample_sas({1.3, 2.5}, a), 2.5 * sample_sas({1.3, 1.0}, b), 1e-12);
  }
}

TEST(Sas, GaussianVarianceAtAlphaTwo) {
  RngStream rng(4, 0);
  const int n = 200000;
  double s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = sample_sas({2.0, 1.0}, rng);
    s2 += x * x;
  }
  EXPECT_NEAR(s2 / n, 2.0, 0.03);
}

TEST(Sas, RejectsBadParameters) {
  RngStream rng(0, 0);
  EXPECT_THROW(sample_sas({0.0, 1.0}, rng), ParameterError);
  EXPECT_THROW(sample_sas({2.1, 1.0}, rng), ParameterError);
  EXPECT_THROW(sample_sas({1.5, -1.0}, rng), ParameterError);
}

TEST(LevyMeasureScale, CauchyIsPi) {
  EXPECT_NEAR(levy_measure_scale(1.0), std::numbers::pi, 1e-12);
}

TEST(LevyMeasureScale, MatchesCharacteristicExponentIntegral) {
  // (2 alpha int_0^inf (1 - cos u) u^(-alpha-1) du)^(1/alpha), numerically.
  EXPECT_NEAR(levy_measure_scale(0.8), 3.6824010428303519, 1e-8);
  EXPECT_NEAR(levy_measure_scale(1.5), 2.9291837745461077, 1e-8);
}

TEST(SmallJumps, SecondMomentMatchesMidpointRule) {
  const double gamma = 0.3, alpha = 1.4;
  // 2 int_0^gamma y^2 alpha y^(-alpha-1) dy on a fine midpoint grid.
  const int n = 2000000;
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double y = (i + 0.5) * gamma / n;
    s += alpha * std::pow(y, 1.0 - alpha);
  }
  EXPECT_NEAR(small_jump_second_moment(gamma, alpha), 2.0 * s * gamma / n, 1e-4);
}

}  // namespace
