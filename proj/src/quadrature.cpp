#include "imsm/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "imsm/errors.hpp"

namespace imsm {

namespace {

// Kronrod abscissae on [0, 1); odd indices are the 7-point Gauss nodes.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment gauss_kronrod(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  double fv1[7], fv2[7];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    fv1[j] = f(center - dx);
    fv2[j] = f(center + dx);
    kronrod += kWgk[j] * (fv1[j] + fv2[j]);
    if (j % 2 == 1) gauss += kWg[j / 2] * (fv1[j] + fv2[j]);
  }
  // Error scaling as in QUADPACK's qk15.
  const double mean = 0.5 * kronrod;
  double asc = kWgk[7] * std::fabs(fc - mean);
  for (int j = 0; j < 7; ++j) {
    asc += kWgk[j] * (std::fabs(fv1[j] - mean) + std::fabs(fv2[j] - mean));
  }
  asc *= std::fabs(half);
  double err = std::fabs((kronrod - gauss) * half);
  if (asc != 0.0 && err != 0.0) {
    err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
  }
  return {a, b, kronrod * half, err};
}

}  // namespace

QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     const QuadOptions& options) {
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw ParameterError("integration limits must be finite");
  }
  if (a == b) return {};
  if (b < a) {
    QuadResult r = integrate(f, b, a, options);
    r.value = -r.value;
    return r;
  }

  std::priority_queue<Segment> heap;
  Segment first = gauss_kronrod(f, a, b);
  double total = first.value;
  double error = first.error;
  heap.push(first);
  int intervals = 1;

  auto target = [&] {
    return std::max(options.abs_tol, options.rel_tol * std::fabs(total));
  };
  while (error > target()) {
    if (!std::isfinite(total)) {
      throw NumericalError("integrand produced a non-finite value",
                           std::numeric_limits<double>::infinity());
    }
    const Segment worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    const bool exhausted = intervals >= options.max_intervals;
    const bool resolution =
        mid <= worst.a || mid >= worst.b ||
        (worst.b - worst.a) <= 4.0 * std::numeric_limits<double>::epsilon() *
                                   std::max(std::fabs(worst.a), std::fabs(worst.b));
    if (exhausted || resolution) {
      const double achieved = total != 0.0 ? error / std::fabs(total) : error;
      throw NumericalError("adaptive quadrature did not reach the requested tolerance",
                           achieved);
    }
    heap.pop();
    const Segment left = gauss_kronrod(f, worst.a, mid);
    const Segment right = gauss_kronrod(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++intervals;
  }

  // Recompute the sums from the leaves to shed accumulated update rounding.
  double value = 0.0;
  double err = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  return {value, err, intervals};
}

}  // namespace imsm
