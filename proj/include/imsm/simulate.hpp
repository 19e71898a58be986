#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "imsm/hurst.hpp"
#include "imsm/path_evaluator.hpp"
#include "imsm/rng.hpp"

namespace imsm {

inline constexpr double kDefaultAtomCap = 1e8;

/// Jumps are kept for times in (t0, t_end] and sizes |y| >= gamma.
struct TruncationWindow {
  double t0 = -10.0;
  double t_end = 1.0;
  double gamma = 0.1;

  void validate() const;
  /// Poisson rate 2 (t_end - t0) gamma^(-alpha) of retained atoms.
  double rate(double alpha) const;

  nlohmann::json to_json() const;
  static TruncationWindow from_json(const nlohmann::json& j);
  bool operator==(const TruncationWindow&) const = default;
};

struct JumpSet {
  std::vector<double> times;  // strictly increasing after generation
  std::vector<double> sizes;  // aligned with times, |size| >= gamma
  TruncationWindow window;
  double alpha = 1.5;
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;

  std::size_t size() const { return times.size(); }
};

enum class PathMode { ito_msm, classical_msm, lfsm };
std::string to_string(PathMode mode);
PathMode path_mode_from_string(const std::string& name);

struct Provenance {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
  TruncationWindow window;
  nlohmann::json hurst;
  double alpha = 1.5;
  std::string generator;  // "jumps" or "riemann_oracle"
  double oracle_step = 0.0;
};

struct SamplePath {
  std::vector<double> grid;
  std::vector<double> values;
  PathMode mode = PathMode::ito_msm;
  Provenance provenance;
};

/// Draws the atoms of the truncated Poisson point process on the window:
/// m ~ Poisson(rate), times uniform on (t0, t_end], sizes Rademacher x
/// Pareto(gamma, alpha). Times and sizes are sorted jointly by time with the
/// draw index breaking ties. Throws ResourceError when the rate exceeds
/// atom_cap.
JumpSet sample_jumps(const TruncationWindow& window, double alpha, RngStream& rng,
                     double atom_cap = kDefaultAtomCap);

/// Per-atom exponents H(x_i) - 1/alpha. Adapted kinds see the sum of the
/// sizes of strictly earlier atoms.
std::vector<double> atom_exponents(const JumpSet& jumps, const HurstFunction& hurst);

/// X(t) = sum_i y_i F_t(x_i) with F evaluated at H(x_i) (ito_msm), H(t)
/// (classical_msm) or the constant H (lfsm). Grid points must lie in
/// (t0, t_end] and be strictly increasing.
SamplePath path_from_jumps(const JumpSet& jumps, const HurstFunction& hurst,
                           std::span<const double> grid, PathMode mode,
                           EvalMethod method = EvalMethod::automatic);

/// Riemann-sum approximant sum_k F_t(x_k) dL_k over cells [x_k, x_k + step)
/// covering [window_t0, max(grid max, 0)), with the kernel at the left
/// endpoint and dL_k i.i.d. symmetric stable of scale motion_scale step^(1/alpha).
/// motion_scale = 1 is the unit-time standardization; levy_measure_scale(alpha)
/// matches the motion the jump representation sums.
SamplePath riemann_oracle(std::span<const double> grid, const HurstFunction& hurst,
                          double alpha, double window_t0, double step, RngStream& rng,
                          double motion_scale = 1.0, PathMode mode = PathMode::ito_msm,
                          double cell_cap = kDefaultAtomCap);

struct TruncationError {
  double small_jump_l2 = 0.0;
  double far_past_lambda_alpha = 0.0;  // up to the unstated constant C(alpha), reported as 1
};

/// small_jump_l2 = (int_{|y|<gamma} y^2 dmu) sup_e int_{t0}^{max(t,0)} F_t(x)^2 dx
/// far_past_lambda_alpha = sup_e int_{-inf}^{t0} |F_t(x)|^alpha dx
/// with t = grid_max_t and e ranging over constant exponents in
/// [h_lo - 1/alpha, h_hi - 1/alpha].
TruncationError truncation_error_bound(const TruncationWindow& window, double grid_max_t,
                                       const HurstFunction& hurst, double alpha);

/// Marginal scale of X(t) for a constant exponent under the jump
/// representation's Levy measure: levy_measure_scale(alpha) (int |F_t|^alpha)^(1/alpha).
double marginal_scale(double t, double h, double alpha);

struct AutoWindow {
  TruncationWindow window;
  double target_l2 = 0.0;
  bool gamma_limited_by_budget = false;
};

/// Default truncation for a grid: t0 = min(grid min, 0) - 10 span,
/// t_end = max(grid max, 0), gamma the largest cutoff with small_jump_l2 <=
/// 1e-4 (marginal scale)^2, raised if needed so the rate stays within atom_budget.
AutoWindow auto_window(std::span<const double> grid, const HurstFunction& hurst,
                       double alpha, double atom_budget = 1e6);

/// Replicates sharing one configuration; replicate i uses stream
/// first_stream + i of the base seed.
struct EnsembleSpec {
  double alpha = 1.5;
  HurstFunction hurst = HurstFunction::constant(0.8);
  PathMode mode = PathMode::ito_msm;
  TruncationWindow window;
  std::vector<double> grid;
  std::uint64_t seed = 0;
  std::uint64_t first_stream = 0;
  std::size_t replicates = 1;
  unsigned threads = 0;
  EvalMethod method = EvalMethod::automatic;
  double atom_cap = kDefaultAtomCap;
};

std::vector<SamplePath> simulate_ensemble(const EnsembleSpec& spec);

}  // namespace imsm
