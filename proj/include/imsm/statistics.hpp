#pragma once

#include <span>
#include <vector>

namespace imsm {

struct KsResult {
  double statistic = 0.0;  // sup |F_a - F_b|
  double p_value = 1.0;
};

/// Complementary Kolmogorov distribution Q(lambda) = P(K > lambda).
double kolmogorov_q(double lambda);

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value
/// Q((sqrt(n_e) + 0.12 + 0.11 / sqrt(n_e)) D), n_e = n m / (n + m).
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
};

/// Ordinary least squares y = intercept + slope x. Needs two distinct x.
LinearFit ols(std::span<const double> x, std::span<const double> y);

/// Sample quantile with linear interpolation between order statistics
/// (position p (n - 1)).
double quantile(std::vector<double> values, double p);
double median(std::vector<double> values);
double mean(std::span<const double> values);
double sample_variance(std::span<const double> values);

/// Log-log slope of the empirical survival function of |values| in the far
/// tail: OLS of log s against log q(1 - s) for s = 10^-2, 10^-2.5, ..., 10^-4.
/// Needs at least 10^5 values.
double tail_survival_slope(std::vector<double> values);

}  // namespace imsm
