#include "imsm/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "imsm/errors.hpp"
#include "imsm/quadrature.hpp"

namespace imsm {

namespace {

// (b + d)^e - b^e for b > 0, b + d > 0, without cancellation when |d| << b.
double power_difference(double b, double d, double e) {
  return std::pow(b, e) * std::expm1(e * std::log1p(d / b));
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0)) {
    throw ParameterError("kernel quadrature needs alpha in (0, 2)");
  }
}

// int_start^inf f(u) du for f decaying like u^(-1-q). Panels double in
// width; the remainder past the last panel is closed with f(D) D / q once it
// falls below rel_tol of the running total.
double integrate_to_infinity(const std::function<double(double)>& f, double start,
                             double first_width, double q, double rel_tol) {
  if (!(q > 0.0)) throw ParameterError("tail exponent must be positive");
  QuadOptions opts;
  opts.rel_tol = rel_tol;
  double total = 0.0;
  double lo = start;
  double width = first_width;
  for (int panel = 0; panel < 600; ++panel) {
    const double hi = lo + width;
    opts.abs_tol = 0.25 * rel_tol * std::fabs(total);
    total += integrate(f, lo, hi, opts).value;
    const double tail = f(hi) * hi / q;
    if (tail <= rel_tol * std::fabs(total) || (total == 0.0 && tail == 0.0)) {
      return total + tail;
    }
    lo = hi;
    width = hi - start;
  }
  throw NumericalError("far-past tail did not fall below tolerance", rel_tol);
}

}  // namespace

KernelValue eval_kernel(const KernelPoint& p) {
  const double e = p.exponent();
  const double v = kernel_value(p.t, p.x, e);
  return {v, std::isinf(v)};
}

double quad_kernel_diff_alpha_norm(double t, double h, KernelRegion region,
                                   const HurstFunction& hurst, double alpha,
                                   double rel_tol) {
  check_alpha(alpha);
  if (!(h > 0.0 && h < 0.5)) throw ParameterError("h must lie in (0, 1/2)");
  if (!hurst.is_deterministic()) {
    throw UnsupportedKindError("increment norm quadrature needs a deterministic H");
  }
  const double inv_alpha = 1.0 / alpha;
  QuadOptions opts;
  opts.rel_tol = rel_tol;

  if (region.kind == KernelRegion::Kind::new_mass) {
    // v = t + h - x in (0, h)
    auto f = [&](double v) { return std::pow(v, alpha * hurst(t + h - v) - 1.0); };
    return integrate(f, 0.0, h, opts).value;
  }
  if (!(region.epsilon > 0.0 && region.epsilon < 1.0)) {
    throw ParameterError("epsilon must lie in (0, 1)");
  }
  // u = t - x; the (-x)_+ parts of F_{t+h} and F_t cancel.
  auto f = [&](double u) {
    const double e = hurst(t - u) - inv_alpha;
    return std::pow(std::fabs(power_difference(u, h, e)), alpha);
  };
  if (region.kind == KernelRegion::Kind::near_past) {
    return integrate(f, 0.0, region.epsilon, opts).value;
  }
  const double q = alpha * (1.0 - hurst.h_hi());
  return integrate_to_infinity(f, region.epsilon, region.epsilon, q, rel_tol);
}

double quad_exponent_swap_norm(double h, const HurstFunction& a,
                               const HurstFunction& b, double alpha,
                               double rel_tol) {
  check_alpha(alpha);
  if (!(h > 0.0 && h < std::exp(-1.0))) throw ParameterError("h must lie in (0, 1/e)");
  if (!a.is_deterministic() || !b.is_deterministic()) {
    throw UnsupportedKindError("exponent swap norm needs deterministic exponents");
  }
  const double inv_alpha = 1.0 / alpha;
  QuadOptions opts;
  opts.rel_tol = rel_tol;

  // x in (0, h): only the first positive part survives; v = h - x.
  auto inner = [&](double v) {
    const double x = h - v;
    const double ea = a(x) - inv_alpha;
    const double eb = b(x) - inv_alpha;
    return std::pow(std::fabs(std::pow(v, ea) - std::pow(v, eb)), alpha);
  };
  // x < 0: u = -x.
  auto outer = [&](double u) {
    const double ea = a(-u) - inv_alpha;
    const double eb = b(-u) - inv_alpha;
    return std::pow(
        std::fabs(power_difference(u, h, ea) - power_difference(u, h, eb)), alpha);
  };
  if (a == b) return 0.0;
  const double first = integrate(inner, 0.0, h, opts).value;
  const double q = alpha * (1.0 - std::max(a.h_hi(), b.h_hi()));
  const double second = integrate_to_infinity(outer, 0.0, h, q, rel_tol);
  return first + second;
}

double quad_kernel_power_norm(double t, double e, double p, double lo, double hi,
                              double rel_tol) {
  if (!(p > 0.0)) throw ParameterError("norm power must be positive");
  if (!(hi > lo)) return 0.0;
  if (t == 0.0) return 0.0;
  // |F_t(x)|^p in u = max(t, 0) - x, so the interior singularities sit at
  // u = 0 and u = |t|.
  const double top = std::max(t, 0.0);
  const double gap = std::fabs(t);
  auto f = [&](double u) {
    const double x = top - u;
    double v;
    if (x < std::min(t, 0.0)) {
      v = t > 0.0 ? power_difference(-x, t, e) : -power_difference(t - x, -t, e);
    } else {
      v = kernel_value(t, x, e);
    }
    return std::pow(std::fabs(v), p);
  };
  const double u_lo = std::max(0.0, top - hi);
  QuadOptions opts;
  opts.rel_tol = rel_tol;
  double total = 0.0;
  // Finite pieces split at u = gap where the second power switches on.
  auto finite_piece = [&](double a, double b) {
    if (b > a) total += integrate(f, a, b, opts).value;
  };
  if (std::isfinite(lo)) {
    const double u_hi = top - lo;
    finite_piece(u_lo, std::min(u_hi, gap));
    finite_piece(std::max(u_lo, gap), u_hi);
    return total;
  }
  finite_piece(u_lo, std::max(u_lo, gap));
  const double start = std::max(u_lo, gap);
  const double q = p * (1.0 - e);
  if (!(q > 1.0)) throw ParameterError("kernel power norm diverges at -infinity");
  // Integrand decays like u^(p(e-1)) = u^(-1-(q-1)).
  return total + integrate_to_infinity(f, start, std::max(gap, 1.0), q - 1.0, rel_tol);
}

}  // namespace imsm
