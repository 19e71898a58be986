#include "imsm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "imsm/errors.hpp"
#include "imsm/parallel.hpp"
#include "imsm/statistics.hpp"

namespace imsm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Index of the grid point equal to t up to rounding, or npos.
std::size_t find_on_grid(const std::vector<double>& grid, double t) {
  const auto it = std::lower_bound(grid.begin(), grid.end(), t);
  const double tol = 1e-9 * std::max(1.0, std::fabs(t));
  std::size_t best = std::string::npos;
  double best_d = kInf;
  for (auto c : {it, it == grid.begin() ? it : it - 1}) {
    if (c == grid.end()) continue;
    const double d = std::fabs(*c - t);
    if (d <= tol && d < best_d) {
      best_d = d;
      best = static_cast<std::size_t>(c - grid.begin());
    }
  }
  return best;
}

nlohmann::json finite_or_string(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

}  // namespace

nlohmann::json ExponentEstimate::to_json() const {
  nlohmann::json loc = location_lo == location_hi
                           ? nlohmann::json(location_lo)
                           : nlohmann::json::array({location_lo, location_hi});
  return {{"location", loc},
          {"value", finite_or_string(estimate)},
          {"stderr", finite_or_string(stderr_)},
          {"method", method},
          {"fit_range", fit_scales},
          {"fit_values", fit_values}};
}

ExponentEstimate estimate_uniform_exponent(const SamplePath& path, double a, double b,
                                           const UniformExponentOptions& options) {
  if (!(b > a)) throw InputError("estimation interval must have b > a");
  if (path.grid.size() != path.values.size()) {
    throw InputError("path grid and values differ in length");
  }
  const double tol = 1e-9 * std::max(1.0, std::max(std::fabs(a), std::fabs(b)));
  const auto first = static_cast<std::size_t>(
      std::lower_bound(path.grid.begin(), path.grid.end(), a - tol) - path.grid.begin());
  const auto last = static_cast<std::size_t>(
      std::upper_bound(path.grid.begin(), path.grid.end(), b + tol) - path.grid.begin());
  const std::size_t count = last > first ? last - first : 0;
  if (count < 512) {
    throw InputError("uniform exponent needs at least 2^9 grid points in the interval");
  }
  const std::size_t steps = count - 1;
  const double h = (path.grid[last - 1] - path.grid[first]) / static_cast<double>(steps);
  for (std::size_t i = first + 1; i < last; ++i) {
    if (std::fabs((path.grid[i] - path.grid[i - 1]) - h) > 1e-6 * h) {
      throw InputError("uniform exponent needs a uniform grid");
    }
  }

  int finest = 0;
  while ((std::size_t{1} << (finest + 1)) <= steps) ++finest;
  const int j_lo = options.min_level < 0 ? std::max(2, finest / 2) : options.min_level;
  const int j_hi = finest - options.finest_dropped;
  if (j_hi - j_lo + 1 < 4) throw InputError("uniform exponent fit needs at least 4 levels");

  ExponentEstimate out;
  out.location_lo = a;
  out.location_hi = b;
  out.method = "dyadic_oscillation";
  std::vector<double> xs, ys;
  const double* v = path.values.data() + first;
  for (int j = j_lo; j <= j_hi; ++j) {
    const std::uint64_t pieces = std::uint64_t{1} << j;
    double worst = 0.0;
    for (std::uint64_t k = 0; k < pieces; ++k) {
      // Closed piece [k, k + 1] steps / 2^j, in index units.
      const std::uint64_t lo = (k * steps + pieces - 1) / pieces;
      const std::uint64_t hi = ((k + 1) * steps) / pieces;
      double mn = v[lo], mx = v[lo];
      for (std::uint64_t i = lo + 1; i <= hi; ++i) {
        mn = std::min(mn, v[i]);
        mx = std::max(mx, v[i]);
      }
      worst = std::max(worst, mx - mn);
    }
    out.fit_scales.push_back(std::ldexp(b - a, -j));
    out.fit_values.push_back(worst > 0.0 ? std::log2(worst) : -kInf);
    if (worst > 0.0) {
      xs.push_back(-static_cast<double>(j));
      ys.push_back(std::log2(worst));
    }
  }
  if (xs.size() < 2) {
    out.estimate = kInf;
    return out;
  }
  const LinearFit fit = ols(xs, ys);
  out.estimate = fit.slope;
  out.stderr_ = fit.slope_stderr;
  return out;
}

ExponentEstimate estimate_pointwise_exponent(const std::vector<SamplePath>& ensemble,
                                             double t0,
                                             const PointwiseExponentOptions& options) {
  if (ensemble.empty()) throw InputError("pointwise exponent needs a non-empty ensemble");
  if (options.k_max - options.k_min + 1 < 4) {
    throw InputError("pointwise exponent fit needs at least 4 lags");
  }
  const auto& grid = ensemble.front().grid;
  for (const auto& p : ensemble) {
    if (p.grid != grid) throw InputError("ensemble paths must share one grid");
  }
  const std::size_t i0 = find_on_grid(grid, t0);
  if (i0 == std::string::npos) throw InputError("t0 is not on the grid");

  ExponentEstimate out;
  out.location_lo = out.location_hi = t0;
  out.method = "quantile_scaling";
  std::vector<double> xs, ys;
  std::vector<double> incr(ensemble.size());
  for (int k = options.k_min; k <= options.k_max; ++k) {
    const double h = std::ldexp(options.h0, -k);
    const std::size_t i1 = find_on_grid(grid, t0 + h);
    if (i1 == std::string::npos) throw InputError("lag t0 + h is not on the grid");
    for (std::size_t r = 0; r < ensemble.size(); ++r) {
      incr[r] = std::fabs(ensemble[r].values[i1] - ensemble[r].values[i0]);
    }
    const double med = median(incr);
    out.fit_scales.push_back(h);
    out.fit_values.push_back(med > 0.0 ? std::log(med) : -kInf);
    if (med > 0.0) {
      xs.push_back(std::log(h));
      ys.push_back(std::log(med));
    }
  }
  if (xs.size() < 2) {
    out.estimate = kInf;
    return out;
  }
  const LinearFit fit = ols(xs, ys);
  out.estimate = fit.slope;
  out.stderr_ = fit.slope_stderr;
  return out;
}

nlohmann::json ScalingReport::to_json() const {
  nlohmann::json jp = nlohmann::json::array();
  for (const auto& [lag, m] : pairs) jp.push_back({lag, m});
  return {{"p", p},
          {"alpha", alpha},
          {"delta", delta},
          {"s", s},
          {"min_hurst", min_hurst},
          {"pairs", jp},
          {"fitted_slope", fitted_slope},
          {"slope_stderr", slope_stderr},
          {"target_slope", target_slope},
          {"tolerance", tolerance},
          {"p_in_stated_range", p_in_stated_range},
          {"pass", pass}};
}

ScalingReport moment_scaling_check(const std::vector<SamplePath>& ensemble, double s,
                                   const std::vector<double>& t_list, double p,
                                   double delta, const HurstFunction& hurst, double alpha,
                                   double tolerance) {
  if (!(p > 0.0)) throw ParameterError("moment order p must be positive");
  if (!(p < alpha)) throw ParameterError("p-th moment infinite for p >= alpha");
  if (ensemble.empty()) throw InputError("moment check needs a non-empty ensemble");
  const auto& grid = ensemble.front().grid;
  const std::size_t is = find_on_grid(grid, s);
  if (is == std::string::npos) throw InputError("s is not on the grid");

  ScalingReport rep;
  rep.p = p;
  rep.alpha = alpha;
  rep.delta = delta;
  rep.s = s;
  rep.tolerance = tolerance;
  rep.p_in_stated_range = p > alpha / (1.0 + alpha * delta / 2.0) && p < alpha;
  double lo = s, hi = s;
  for (double t : t_list) {
    lo = std::min(lo, t);
    hi = std::max(hi, t);
  }
  rep.min_hurst = hurst.is_deterministic() ? hurst.min_on(lo, hi) : hurst.h_lo();
  rep.target_slope = 1.0 + p * (rep.min_hurst - 1.0 / alpha - delta);

  std::vector<double> xs, ys;
  for (double t : t_list) {
    const std::size_t it = find_on_grid(grid, t);
    if (it == std::string::npos) throw InputError("t is not on the grid");
    double sum = 0.0;
    for (const auto& path : ensemble) {
      sum += std::pow(std::fabs(path.values[it] - path.values[is]), p);
    }
    const double moment = sum / static_cast<double>(ensemble.size());
    const double lag = std::fabs(t - s);
    rep.pairs.emplace_back(lag, moment);
    if (lag > 0.0 && moment > 0.0) {
      xs.push_back(std::log(lag));
      ys.push_back(std::log(moment));
    }
  }
  if (xs.size() >= 2) {
    const LinearFit fit = ols(xs, ys);
    rep.fitted_slope = fit.slope;
    rep.slope_stderr = fit.slope_stderr;
    rep.pass = rep.fitted_slope >= rep.target_slope - tolerance;
  }
  return rep;
}

nlohmann::json TangentReport::to_json() const {
  return {{"t0", t0},
          {"hurst_at_t0", hurst_at_t0},
          {"h_values", h_values},
          {"r_grid", r_grid},
          {"ks_stats", ks_stats},
          {"p_values", p_values},
          {"median_ks", median_ks},
          {"accept_fraction", accept_fraction},
          {"monotone_decrease", monotone_decrease},
          {"pass", pass},
          {"reference", reference}};
}

TangentReport tangent_process_check(const TangentSetup& setup) {
  if (setup.n_rep < 500) throw InputError("tangent check needs at least 500 replicates");
  if (!setup.hurst.is_deterministic()) {
    throw UnsupportedKindError("tangent check needs a deterministic H");
  }
  if (setup.h_list.empty() || setup.r_grid.empty()) {
    throw InputError("tangent check needs non-empty h and r lists");
  }
  const double hh = setup.hurst(setup.t0);
  const std::size_t nh = setup.h_list.size();
  const std::size_t nr = setup.r_grid.size();

  std::vector<double> grid{setup.t0};
  for (double h : setup.h_list) {
    if (!(h > 0.0)) throw InputError("tangent lags must be positive");
    for (double r : setup.r_grid) grid.push_back(setup.t0 + h * r);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  auto index_of = [&](double t) {
    return static_cast<std::size_t>(std::lower_bound(grid.begin(), grid.end(), t) -
                                    grid.begin());
  };
  const std::size_t i0 = index_of(setup.t0);

  // rescaled[h][r][replicate]
  std::vector<std::vector<std::vector<double>>> rescaled(
      nh, std::vector<std::vector<double>>(nr, std::vector<double>(setup.n_rep)));
  parallel_for(setup.n_rep, setup.threads, [&](std::size_t i) {
    RngStream rng(setup.seed, i);
    const JumpSet jumps = sample_jumps(setup.window, setup.alpha, rng);
    const SamplePath path = path_from_jumps(jumps, setup.hurst, grid, setup.mode);
    for (std::size_t a = 0; a < nh; ++a) {
      const double norm = std::pow(setup.h_list[a], hh);
      for (std::size_t b = 0; b < nr; ++b) {
        const double t = setup.t0 + setup.h_list[a] * setup.r_grid[b];
        rescaled[a][b][i] = (path.values[index_of(t)] - path.values[i0]) / norm;
      }
    }
  });

  std::vector<double> r_sorted(setup.r_grid);
  std::sort(r_sorted.begin(), r_sorted.end());
  r_sorted.erase(std::unique(r_sorted.begin(), r_sorted.end()), r_sorted.end());
  const HurstFunction ref_h = HurstFunction::constant(hh);

  TangentReport rep;
  rep.t0 = setup.t0;
  rep.hurst_at_t0 = hh;
  rep.h_values = setup.h_list;
  rep.r_grid = setup.r_grid;
  rep.reference = {{"kind", "lfsm"},
                   {"hurst", hh},
                   {"alpha", setup.alpha},
                   {"truncation", "process window mapped by x -> (x - t0) / h"}};
  rep.ks_stats.assign(nh, std::vector<double>(nr));
  rep.p_values.assign(nh, std::vector<double>(nr));
  for (std::size_t a = 0; a < nh; ++a) {
    const double h = setup.h_list[a];
    TruncationWindow ref_w{(setup.window.t0 - setup.t0) / h,
                           (setup.window.t_end - setup.t0) / h,
                           setup.window.gamma * std::pow(h, -1.0 / setup.alpha)};
    std::vector<std::vector<double>> ref(nr, std::vector<double>(setup.n_rep));
    parallel_for(setup.n_rep, setup.threads, [&](std::size_t i) {
      RngStream rng(setup.seed, (a + 1) * setup.n_rep + i);
      const JumpSet jumps = sample_jumps(ref_w, setup.alpha, rng);
      const SamplePath path = path_from_jumps(jumps, ref_h, r_sorted, PathMode::lfsm);
      for (std::size_t b = 0; b < nr; ++b) {
        const auto k = static_cast<std::size_t>(
            std::lower_bound(r_sorted.begin(), r_sorted.end(), setup.r_grid[b]) -
            r_sorted.begin());
        ref[b][i] = path.values[k];
      }
    });
    std::vector<double> informative;
    std::size_t accepted = 0;
    for (std::size_t b = 0; b < nr; ++b) {
      const KsResult ks = ks_two_sample(rescaled[a][b], ref[b]);
      rep.ks_stats[a][b] = ks.statistic;
      rep.p_values[a][b] = ks.p_value;
      // r = 0 cells are identically zero on both sides and carry no evidence.
      if (setup.r_grid[b] != 0.0) {
        informative.push_back(ks.statistic);
        if (ks.p_value > setup.p_threshold) ++accepted;
      }
    }
    rep.median_ks.push_back(informative.empty() ? 0.0 : median(informative));
    rep.accept_fraction.push_back(
        informative.empty() ? 1.0
                            : static_cast<double>(accepted) /
                                  static_cast<double>(informative.size()));
  }

  // Order by decreasing h to judge monotone convergence.
  std::vector<std::size_t> order(nh);
  for (std::size_t a = 0; a < nh; ++a) order[a] = a;
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return setup.h_list[x] > setup.h_list[y]; });
  rep.monotone_decrease = true;
  for (std::size_t k = 1; k < nh; ++k) {
    if (!(rep.median_ks[order[k]] < rep.median_ks[order[k - 1]])) {
      rep.monotone_decrease = false;
    }
  }
  rep.pass = rep.monotone_decrease &&
             rep.accept_fraction[order.back()] >= setup.accept_fraction;
  return rep;
}

nlohmann::json FigureResult::report() const {
  return {{"x_estimates", x_estimates},
          {"y_estimates", y_estimates},
          {"median_x", median_x},
          {"median_y", median_y},
          {"gap", median_x - median_y}};
}

FigureResult figure_reproduction(const FigureSetup& setup) {
  if (setup.replicates < 1) throw InputError("figures need at least one replicate");
  FigureResult out;
  out.x_paths.resize(setup.replicates);
  out.y_paths.resize(setup.replicates);
  out.x_estimates.resize(setup.replicates);
  out.y_estimates.resize(setup.replicates);
  parallel_for(setup.replicates, setup.threads, [&](std::size_t i) {
    RngStream rng(setup.seed, i);
    const JumpSet jumps = sample_jumps(setup.window, setup.alpha, rng);
    out.x_paths[i] =
        path_from_jumps(jumps, setup.hurst, setup.grid, PathMode::ito_msm, setup.method);
    out.y_paths[i] = path_from_jumps(jumps, setup.hurst, setup.grid,
                                     PathMode::classical_msm, setup.method);
    out.x_estimates[i] =
        estimate_uniform_exponent(out.x_paths[i], setup.a, setup.b, setup.estimator)
            .estimate;
    out.y_estimates[i] =
        estimate_uniform_exponent(out.y_paths[i], setup.a, setup.b, setup.estimator)
            .estimate;
  });
  out.hurst_values.resize(setup.grid.size());
  if (setup.hurst.is_deterministic()) {
    for (std::size_t j = 0; j < setup.grid.size(); ++j) {
      out.hurst_values[j] = setup.hurst(setup.grid[j]);
    }
  }
  out.median_x = median(out.x_estimates);
  out.median_y = median(out.y_estimates);
  return out;
}

nlohmann::json analysis_report(const std::string& method, const nlohmann::json& parameters,
                               const std::vector<ExponentEstimate>& estimates,
                               const nlohmann::json& fit_diagnostics, bool pass,
                               double tolerance) {
  nlohmann::json est = nlohmann::json::array();
  for (const auto& e : estimates) {
    nlohmann::json loc = e.location_lo == e.location_hi
                             ? nlohmann::json(e.location_lo)
                             : nlohmann::json::array({e.location_lo, e.location_hi});
    est.push_back({{"location", loc},
                   {"value", finite_or_string(e.estimate)},
                   {"stderr", finite_or_string(e.stderr_)}});
  }
  return {{"method", method},
          {"parameters", parameters},
          {"estimates", est},
          {"fit_diagnostics", fit_diagnostics},
          {"pass", pass},
          {"tolerance", tolerance}};
}

}  // namespace imsm
