#include "imsm/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "imsm/errors.hpp"
#include "imsm/kernel.hpp"
#include "imsm/parallel.hpp"
#include "imsm/stable_random.hpp"

namespace imsm {

namespace {

void check_alpha_open(double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw ParameterError("alpha must lie in (0, 2)");
}

void check_grid(std::span<const double> grid) {
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (!std::isfinite(grid[j])) throw InputError("grid contains a non-finite time");
    if (j > 0 && !(grid[j] > grid[j - 1])) {
      throw InputError("grid must be strictly increasing");
    }
  }
}

std::vector<double> exponent_samples(const HurstFunction& hurst, double alpha) {
  const double lo = hurst.h_lo() - 1.0 / alpha;
  const double hi = hurst.h_hi() - 1.0 / alpha;
  if (lo == hi) return {lo};
  std::vector<double> out;
  for (int i = 0; i <= 8; ++i) out.push_back(lo + (hi - lo) * i / 8.0);
  return out;
}

}  // namespace

void TruncationWindow::validate() const {
  if (!std::isfinite(t0) || !std::isfinite(t_end) || !(t0 < t_end)) {
    throw ParameterError("truncation window needs finite t0 < t_end");
  }
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw ParameterError("truncation gamma must be positive");
  }
}

double TruncationWindow::rate(double alpha) const {
  return 2.0 * (t_end - t0) * std::pow(gamma, -alpha);
}

nlohmann::json TruncationWindow::to_json() const {
  return {{"t0", t0}, {"t_end", t_end}, {"gamma", gamma}};
}

TruncationWindow TruncationWindow::from_json(const nlohmann::json& j) {
  for (const auto& [key, _] : j.items()) {
    if (key != "t0" && key != "t_end" && key != "gamma") {
      throw InputError("unknown field '" + key + "' in window");
    }
  }
  TruncationWindow w;
  w.t0 = j.at("t0").get<double>();
  w.t_end = j.at("t_end").get<double>();
  w.gamma = j.at("gamma").get<double>();
  return w;
}

std::string to_string(PathMode mode) {
  switch (mode) {
    case PathMode::ito_msm: return "ito_msm";
    case PathMode::classical_msm: return "classical_msm";
    case PathMode::lfsm: return "lfsm";
  }
  return "unknown";
}

PathMode path_mode_from_string(const std::string& name) {
  for (auto m : {PathMode::ito_msm, PathMode::classical_msm, PathMode::lfsm}) {
    if (to_string(m) == name) return m;
  }
  throw InputError("unknown path mode '" + name + "'");
}

JumpSet sample_jumps(const TruncationWindow& window, double alpha, RngStream& rng,
                     double atom_cap) {
  window.validate();
  check_alpha_open(alpha);
  const double lambda = window.rate(alpha);
  if (!(lambda <= atom_cap)) {
    throw ResourceError("Poisson rate " + std::to_string(lambda) +
                            " exceeds the atom cap; raise gamma or shrink the window",
                        lambda, atom_cap);
  }
  JumpSet out;
  out.window = window;
  out.alpha = alpha;
  out.seed = rng.seed();
  out.stream_id = rng.stream_id();

  const auto m = static_cast<std::size_t>(sample_poisson(lambda, rng));
  std::vector<double> times(m);
  std::vector<double> sizes(m);
  for (std::size_t i = 0; i < m; ++i) {
    times[i] = rng.uniform_left_open(window.t0, window.t_end);
  }
  for (std::size_t i = 0; i < m; ++i) {
    const double sign = sample_rademacher(rng.uniform());
    sizes[i] = sign * sample_pareto(window.gamma, alpha, rng.uniform());
  }

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });
  out.times.resize(m);
  out.sizes.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    out.times[i] = times[order[i]];
    out.sizes[i] = sizes[order[i]];
  }
  // Equal draws keep their draw order; nudge them apart so times stay strict.
  for (std::size_t i = 1; i < m; ++i) {
    if (!(out.times[i] > out.times[i - 1])) {
      out.times[i] = std::nextafter(out.times[i - 1], window.t_end);
    }
  }
  return out;
}

std::vector<double> atom_exponents(const JumpSet& jumps, const HurstFunction& hurst) {
  const double inv_alpha = 1.0 / jumps.alpha;
  std::vector<double> e(jumps.size());
  PathContext ctx;
  for (std::size_t i = 0; i < jumps.size(); ++i) {
    e[i] = hurst(jumps.times[i], ctx) - inv_alpha;
    ctx.accumulated_jump_sum += jumps.sizes[i];
  }
  return e;
}

SamplePath path_from_jumps(const JumpSet& jumps, const HurstFunction& hurst,
                           std::span<const double> grid, PathMode mode,
                           EvalMethod method) {
  check_grid(grid);
  for (double t : grid) {
    if (!(t > jumps.window.t0)) {
      throw DomainError("grid time " + std::to_string(t) +
                        " is not to the right of the window start t0");
    }
    if (t > jumps.window.t_end) {
      throw DomainError("grid time " + std::to_string(t) + " lies beyond the window end");
    }
  }
  if (mode == PathMode::lfsm && !hurst.is_constant()) {
    throw ParameterError("lfsm mode needs a constant Hurst function");
  }

  SamplePath path;
  path.grid.assign(grid.begin(), grid.end());
  path.mode = mode;
  path.provenance = {jumps.seed,   jumps.stream_id, jumps.window, hurst.to_json(),
                     jumps.alpha, "jumps",         0.0};

  if (mode == PathMode::classical_msm && !hurst.is_constant()) {
    // H(t) at each grid point; adapted kinds see the jump sum strictly before t.
    std::vector<double> e_grid(grid.size());
    PathContext ctx;
    std::size_t i = 0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      while (i < jumps.size() && jumps.times[i] < grid[j]) {
        ctx.accumulated_jump_sum += jumps.sizes[i++];
      }
      e_grid[j] = hurst(grid[j], ctx) - 1.0 / jumps.alpha;
    }
    path.values = superpose_per_point(grid, jumps.times, jumps.sizes, e_grid, method);
    return path;
  }
  // Constant H makes all three modes the same sum.
  const std::vector<double> e = atom_exponents(jumps, hurst);
  path.values = superpose_per_atom(grid, jumps.times, jumps.sizes, e, method);
  return path;
}

SamplePath riemann_oracle(std::span<const double> grid, const HurstFunction& hurst,
                          double alpha, double window_t0, double step, RngStream& rng,
                          double motion_scale, PathMode mode, double cell_cap) {
  check_grid(grid);
  check_alpha_open(alpha);
  if (!hurst.is_deterministic()) {
    throw UnsupportedKindError("the Riemann oracle needs a deterministic H");
  }
  if (mode == PathMode::lfsm && !hurst.is_constant()) {
    throw ParameterError("lfsm mode needs a constant Hurst function");
  }
  if (!(step > 0.0)) throw ParameterError("oracle step must be positive");
  if (grid.empty()) return {};
  if (!(grid.front() > window_t0)) {
    throw DomainError("grid must lie to the right of the oracle window start");
  }
  const double right = std::max(grid.back(), 0.0);
  const double cells_real = std::ceil((right - window_t0) / step);
  if ((grid.back() - window_t0) / step < 1000.0) {
    throw ParameterError("oracle step too coarse: fewer than 1000 cells cover the window");
  }
  if (!(cells_real <= cell_cap)) {
    throw ResourceError("oracle cell count exceeds the cap", cells_real, cell_cap);
  }
  const auto cells = static_cast<std::size_t>(cells_real);
  const StableSpec spec{alpha, motion_scale * std::pow(step, 1.0 / alpha)};
  const double inv_alpha = 1.0 / alpha;

  std::vector<double> values(grid.size(), 0.0);
  std::vector<double> e_grid(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) e_grid[j] = hurst(grid[j]) - inv_alpha;
  for (std::size_t k = 0; k < cells; ++k) {
    const double x = window_t0 + static_cast<double>(k) * step;
    const double dl = sample_sas(spec, rng);
    const double ex = hurst(x) - inv_alpha;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const double e = mode == PathMode::classical_msm ? e_grid[j] : ex;
      values[j] += kernel_value(grid[j], x, e) * dl;
    }
  }

  SamplePath path;
  path.grid.assign(grid.begin(), grid.end());
  path.values = std::move(values);
  path.mode = mode;
  path.provenance = {rng.seed(), rng.stream_id(), {window_t0, right, 0.0},
                     hurst.to_json(), alpha, "riemann_oracle", step};
  return path;
}

TruncationError truncation_error_bound(const TruncationWindow& window, double grid_max_t,
                                       const HurstFunction& hurst, double alpha) {
  window.validate();
  check_alpha_open(alpha);
  if (!(grid_max_t > window.t0)) throw DomainError("grid must lie right of t0");
  const double moment = small_jump_second_moment(window.gamma, alpha);
  TruncationError out;
  for (double e : exponent_samples(hurst, alpha)) {
    if (!(2.0 * e > -1.0)) {
      throw ParameterError("kernel is not square integrable for this exponent range");
    }
    const double l2 = quad_kernel_power_norm(grid_max_t, e, 2.0, window.t0,
                                             std::max(grid_max_t, 0.0));
    const double la = quad_kernel_power_norm(
        grid_max_t, e, alpha, -std::numeric_limits<double>::infinity(), window.t0);
    out.small_jump_l2 = std::max(out.small_jump_l2, moment * l2);
    out.far_past_lambda_alpha = std::max(out.far_past_lambda_alpha, la);
  }
  return out;
}

double marginal_scale(double t, double h, double alpha) {
  check_alpha_open(alpha);
  const double e = h - 1.0 / alpha;
  const double norm = quad_kernel_power_norm(
      t, e, alpha, -std::numeric_limits<double>::infinity(), std::max(t, 0.0));
  return levy_measure_scale(alpha) * std::pow(norm, 1.0 / alpha);
}

AutoWindow auto_window(std::span<const double> grid, const HurstFunction& hurst,
                       double alpha, double atom_budget) {
  check_grid(grid);
  check_alpha_open(alpha);
  if (grid.empty()) throw InputError("auto window needs a non-empty grid");
  const double left = std::min(grid.front(), 0.0);
  const double right = std::max(grid.back(), 0.0);
  const double span = right - left > 0.0 ? right - left : 1.0;
  AutoWindow out;
  out.window.t0 = left - 10.0 * span;
  out.window.t_end = right;

  // Reference scale at the grid point farthest from 0, smallest exponent.
  const double t_ref = std::fabs(grid.front()) > std::fabs(grid.back()) ? grid.front()
                                                                         : grid.back();
  const double t_use = t_ref == 0.0 ? span : t_ref;
  double worst_l2 = 0.0;
  double scale = std::numeric_limits<double>::infinity();
  for (double e : exponent_samples(hurst, alpha)) {
    worst_l2 = std::max(worst_l2, quad_kernel_power_norm(t_use, e, 2.0, out.window.t0,
                                                         std::max(t_use, 0.0)));
    scale = std::min(scale, marginal_scale(t_use, e + 1.0 / alpha, alpha));
  }
  out.target_l2 = 1e-4 * scale * scale;
  // 2 alpha gamma^(2 - alpha) / (2 - alpha) * worst_l2 = target_l2
  const double gamma_fid =
      std::pow(out.target_l2 * (2.0 - alpha) / (2.0 * alpha * worst_l2), 1.0 / (2.0 - alpha));
  const double gamma_budget =
      std::pow(2.0 * (out.window.t_end - out.window.t0) / atom_budget, 1.0 / alpha);
  out.window.gamma = std::max(gamma_fid, gamma_budget);
  out.gamma_limited_by_budget = gamma_budget > gamma_fid;
  return out;
}

std::vector<SamplePath> simulate_ensemble(const EnsembleSpec& spec) {
  std::vector<SamplePath> out(spec.replicates);
  parallel_for(spec.replicates, spec.threads, [&](std::size_t i) {
    RngStream rng(spec.seed, spec.first_stream + i);
    const JumpSet jumps = sample_jumps(spec.window, spec.alpha, rng, spec.atom_cap);
    out[i] = path_from_jumps(jumps, spec.hurst, spec.grid, spec.mode, spec.method);
  });
  return out;
}

}  // namespace imsm
