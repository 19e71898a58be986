#pragma once

#include <functional>

namespace imsm {

struct QuadOptions {
  double rel_tol = 1e-6;
  double abs_tol = 0.0;
  int max_intervals = 4000;
};

struct QuadResult {
  double value = 0.0;
  double abs_error = 0.0;
  int intervals = 0;
};

/// Globally adaptive 7/15-point Gauss-Kronrod integration of f over [a, b].
/// The rule never samples the endpoints, so integrable endpoint singularities
/// are handled by bisection towards them. Throws NumericalError (carrying the
/// achieved relative tolerance) when the interval budget runs out or the
/// subdivision reaches machine resolution before the target is met.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     const QuadOptions& options = {});

}  // namespace imsm
