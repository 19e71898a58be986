#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

namespace imsm {

enum class HurstKind {
  constant,
  smooth_catalog,
  rough_weierstrass,
  piecewise_linear,
  adapted_to_path,
};

std::string to_string(HurstKind kind);
HurstKind hurst_kind_from_string(const std::string& name);

/// Modulus of continuity w with w(0) = 0: either c d^rho or c / (1 + |log d|).
struct Modulus {
  enum class Kind { holder, log_inverse };
  Kind kind = Kind::holder;
  double exponent = 1.0;  // holder only
  double constant = 1.0;

  static Modulus holder(double exponent, double constant) {
    return {Kind::holder, exponent, constant};
  }
  static Modulus log_inverse(double constant) {
    return {Kind::log_inverse, 0.0, constant};
  }
  double operator()(double distance) const;
  bool operator==(const Modulus&) const = default;
};

/// Filtration information visible to an adapted Hurst function at x: the
/// truncated big-jump sum strictly before x.
struct PathContext {
  double accumulated_jump_sum = 0.0;
};

/// An exponent function H(.) with values clamped into [h_lo, h_hi].
///
/// Catalog members:
///   constant            H(x) = value
///   smooth_catalog      mid + half sin(2 pi f x + phase)
///   rough_weierstrass   mid + amplitude half W(x) / W(0),
///                       W(x) = sum_{k=0}^{K} a^k cos(b^k omega x)
///   piecewise_linear    linear interpolation of knots, flat outside
///   adapted_to_path     mid + half tanh(kappa S), S the jump sum before x
/// where mid = (h_lo + h_hi) / 2 and half = (h_hi - h_lo) / 2.
class HurstFunction {
 public:
  struct Constant {
    double value;
    bool operator==(const Constant&) const = default;
  };
  struct Sine {
    double frequency;
    double phase;
    bool operator==(const Sine&) const = default;
  };
  struct Weierstrass {
    double a;
    double b;
    int terms;
    double amplitude;
    double omega;
    bool operator==(const Weierstrass&) const = default;
  };
  struct PiecewiseLinear {
    std::vector<std::pair<double, double>> knots;
    bool operator==(const PiecewiseLinear&) const = default;
  };
  struct Adapted {
    double kappa;
    bool operator==(const Adapted&) const = default;
  };
  using Params = std::variant<Constant, Sine, Weierstrass, PiecewiseLinear, Adapted>;

  static HurstFunction constant(double value);
  static HurstFunction sine(double h_lo, double h_hi, double frequency,
                            double phase = 0.0);
  static HurstFunction weierstrass(double h_lo, double h_hi, double a, double b,
                                   int terms, double amplitude = 1.0,
                                   double omega = 1.0);
  static HurstFunction piecewise_linear(
      double h_lo, double h_hi, std::vector<std::pair<double, double>> knots);
  static HurstFunction adapted_to_path(double h_lo, double h_hi, double kappa);

  HurstKind kind() const;
  bool is_deterministic() const { return kind() != HurstKind::adapted_to_path; }
  bool is_constant() const { return kind() == HurstKind::constant; }
  double h_lo() const { return h_lo_; }
  double h_hi() const { return h_hi_; }
  const Params& params() const { return params_; }

  /// Known modulus of continuity of the catalog member, if any.
  std::optional<Modulus> modulus_hint() const;

  /// H(x); deterministic kinds ignore ctx.
  double operator()(double x, const PathContext& ctx = {}) const;

  /// Minimum over [a, b] from a uniform scan with the given number of samples
  /// (exact for constant and piecewise-linear kinds).
  double min_on(double a, double b, std::size_t samples = 20001) const;

  nlohmann::json to_json() const;
  static HurstFunction from_json(const nlohmann::json& j);

  bool operator==(const HurstFunction&) const = default;

 private:
  HurstFunction(double h_lo, double h_hi, Params params);
  void validate() const;
  double raw(double x, const PathContext& ctx) const;

  double h_lo_ = 0.5;
  double h_hi_ = 0.5;
  Params params_ = Constant{0.5};
};

struct ModulusCheck {
  bool holds = true;
  double worst_ratio = 0.0;
};

/// Checks |H(t) - H(s)| <= w(|t - s|) over all pairs of the uniform grid
/// window.first + k grid_step inside the window with |t - s| <= 1.
ModulusCheck verify_modulus(const HurstFunction& h, const Modulus& w,
                            double grid_step, std::pair<double, double> window);

}  // namespace imsm
