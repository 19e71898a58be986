#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "imsm/hurst.hpp"
#include "imsm/simulate.hpp"

namespace imsm {

struct ExponentEstimate {
  double location_lo = 0.0;  // equal bounds for a point estimate
  double location_hi = 0.0;
  double estimate = 0.0;     // +infinity for a constant path
  double stderr_ = 0.0;
  std::string method;        // dyadic_oscillation | quantile_scaling | p_moment
  std::vector<double> fit_scales;
  std::vector<double> fit_values;  // log2 oscillation or log median, per scale

  nlohmann::json to_json() const;
};

struct UniformExponentOptions {
  // Coarsest dyadic level in the fit; negative selects the finer half of the
  // available levels, max(2, finest / 2), since coarse maxima are pre-asymptotic.
  int min_level = -1;
  int finest_dropped = 2;  // levels removed from the finest available end
};

/// Dyadic oscillation estimate of the uniform Holder exponent on [a, b].
/// Level j splits [a, b] into 2^j closed pieces; M_j is the largest
/// max - min of the path inside one piece, and the estimate is the OLS slope
/// of log2 M_j against -j. Needs >= 2^9 uniformly spaced points in [a, b].
ExponentEstimate estimate_uniform_exponent(const SamplePath& path, double a, double b,
                                           const UniformExponentOptions& options = {});

struct PointwiseExponentOptions {
  double h0 = 1.0;
  int k_min = 4;  // lags h0 2^-k for k in [k_min, k_max]
  int k_max = 10;
};

/// Slope of log median_i |X_i(t0 + h) - X_i(t0)| against log h over dyadic
/// lags. All paths share one grid containing t0 and every t0 + h.
ExponentEstimate estimate_pointwise_exponent(const std::vector<SamplePath>& ensemble,
                                             double t0,
                                             const PointwiseExponentOptions& options = {});

struct ScalingReport {
  double p = 0.0;
  double alpha = 0.0;
  double delta = 0.0;
  double s = 0.0;
  double min_hurst = 0.0;
  std::vector<std::pair<double, double>> pairs;  // (|t - s|, mean |X(t) - X(s)|^p)
  double fitted_slope = 0.0;
  double slope_stderr = 0.0;
  double target_slope = 0.0;  // 1 + p (min H - 1/alpha - delta)
  double tolerance = 0.1;
  bool p_in_stated_range = false;  // alpha / (1 + alpha delta / 2) < p < alpha
  bool pass = false;               // fitted_slope >= target_slope - tolerance

  nlohmann::json to_json() const;
};

/// Empirical p-th moments of X(t) - X(s) over the ensemble for each t in
/// t_list; the report passes when the fitted log-log decay slope clears the
/// one-sided bound. Throws ParameterError for p >= alpha.
ScalingReport moment_scaling_check(const std::vector<SamplePath>& ensemble, double s,
                                   const std::vector<double>& t_list, double p,
                                   double delta, const HurstFunction& hurst, double alpha,
                                   double tolerance = 0.1);

struct TangentSetup {
  double alpha = 1.8;
  HurstFunction hurst = HurstFunction::constant(0.85);
  PathMode mode = PathMode::ito_msm;
  TruncationWindow window;
  std::uint64_t seed = 0;
  double t0 = 0.5;
  std::vector<double> h_list;
  std::vector<double> r_grid;
  std::size_t n_rep = 2000;
  unsigned threads = 0;
  double p_threshold = 0.01;
  double accept_fraction = 0.8;
};

struct TangentReport {
  double t0 = 0.0;
  double hurst_at_t0 = 0.0;
  std::vector<double> h_values;
  std::vector<double> r_grid;
  std::vector<std::vector<double>> ks_stats;  // [h][r]
  std::vector<std::vector<double>> p_values;  // [h][r]
  std::vector<double> median_ks;              // per h
  std::vector<double> accept_fraction;        // per h, share of cells with p > threshold
  bool monotone_decrease = false;
  bool pass = false;
  nlohmann::json reference;

  nlohmann::json to_json() const;
};

/// Compares (X(t0 + h r) - X(t0)) / h^H(t0) with an independent lfsm of
/// exponent H(t0). Replicate i of the process uses stream i; the reference
/// for the k-th h uses streams (k + 1) n_rep + i, with its truncation mapped
/// through x -> (x - t0) / h, gamma -> gamma h^(-1/alpha), which is the
/// image of the process window under the rescaling. Needs n_rep >= 500 and
/// a deterministic H.
TangentReport tangent_process_check(const TangentSetup& setup);

struct FigureSetup {
  double alpha = 1.8;
  HurstFunction hurst = HurstFunction::constant(0.85);
  TruncationWindow window;
  std::vector<double> grid;
  double a = 0.0;  // estimation interval
  double b = 1.0;
  std::size_t replicates = 1;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  EvalMethod method = EvalMethod::automatic;
  UniformExponentOptions estimator;
};

struct FigureResult {
  std::vector<SamplePath> x_paths;  // ito_msm
  std::vector<SamplePath> y_paths;  // classical_msm on the same atoms
  std::vector<double> hurst_values; // H on the grid
  std::vector<double> x_estimates;
  std::vector<double> y_estimates;
  double median_x = 0.0;
  double median_y = 0.0;

  nlohmann::json report() const;
};

/// Matched-atom X (H at the jump time) and Y (H at the observation time)
/// ensembles with their uniform-exponent estimates on [a, b].
FigureResult figure_reproduction(const FigureSetup& setup);

/// AnalysisReport envelope: {method, parameters, estimates, fit_diagnostics,
/// pass, tolerance}.
nlohmann::json analysis_report(const std::string& method, const nlohmann::json& parameters,
                               const std::vector<ExponentEstimate>& estimates,
                               const nlohmann::json& fit_diagnostics, bool pass,
                               double tolerance);

}  // namespace imsm
