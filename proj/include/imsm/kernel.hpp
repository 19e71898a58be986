#pragma once

#include <cmath>
#include <limits>

#include "imsm/hurst.hpp"

namespace imsm {

/// One evaluation of the moving-average kernel
///   F_t(x) = (t - x)_+^e - (-x)_+^e,   e = h_at_x - 1/alpha.
/// h_at_x is H(x) for the Ito process and H(t) for the classical one.
struct KernelPoint {
  double t = 0.0;
  double x = 0.0;
  double h_at_x = 0.5;
  double alpha = 1.5;

  double exponent() const { return h_at_x - 1.0 / alpha; }
};

struct KernelValue {
  double value = 0.0;
  // A positive part hit exactly 0 with e <= 0; value is +infinity.
  bool singular = false;
};

/// z_+^e with 0^e = 0 for e > 0 and +infinity for e <= 0.
inline double positive_power(double z, double e) {
  if (z > 0.0) return std::pow(z, e);
  if (z == 0.0 && e <= 0.0) return std::numeric_limits<double>::infinity();
  return 0.0;
}

/// F_t(x) for a precomputed exponent. t = 0 gives exactly 0.
inline double kernel_value(double t, double x, double e) {
  if (t == 0.0) return 0.0;
  return positive_power(t - x, e) - positive_power(-x, e);
}

KernelValue eval_kernel(const KernelPoint& p);

/// Region of the increment norm int |F_{t+h}(x) - F_t(x)|^alpha dx.
///   far_past:  x in (-inf, t - epsilon)
///   near_past: x in [t - epsilon, t)
///   new_mass:  x in [t, t + h)
struct KernelRegion {
  enum class Kind { far_past, near_past, new_mass };
  Kind kind = Kind::new_mass;
  double epsilon = 0.0;

  static KernelRegion far_past(double epsilon) { return {Kind::far_past, epsilon}; }
  static KernelRegion near_past(double epsilon) { return {Kind::near_past, epsilon}; }
  static KernelRegion new_mass() { return {Kind::new_mass, 0.0}; }
};

/// Adaptive quadrature (relative tolerance rel_tol) of the increment norm over
/// one region, with H evaluated at the integration variable. Requires
/// h in (0, 1/2), epsilon in (0, 1) for the past regions, and a deterministic
/// H. The far-past integral is summed over geometrically growing panels and
/// closed with the power-law tail estimate once the tail falls below
/// rel_tol of the running total.
double quad_kernel_diff_alpha_norm(double t, double h, KernelRegion region,
                                   const HurstFunction& hurst, double alpha,
                                   double rel_tol = 1e-6);

/// Quadrature of
///   int |[(h-x)_+^{a(x)-1/alpha} - (-x)_+^{a(x)-1/alpha}]
///        - [(h-x)_+^{b(x)-1/alpha} - (-x)_+^{b(x)-1/alpha}]|^alpha dx
/// over the real line. Requires h in (0, 1/e) and deterministic a, b.
double quad_exponent_swap_norm(double h, const HurstFunction& a,
                               const HurstFunction& b, double alpha,
                               double rel_tol = 1e-6);

/// int_lo^hi |F_t(x)|^p dx for constant exponent e, by the same quadrature
/// (lo may be -infinity). Used for truncation and variance bounds.
double quad_kernel_power_norm(double t, double e, double p, double lo, double hi,
                              double rel_tol = 1e-6);

}  // namespace imsm
