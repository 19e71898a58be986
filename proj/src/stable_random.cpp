#include "imsm/stable_random.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "imsm/errors.hpp"

namespace imsm {

void StableSpec::validate() const {
  if (!(alpha > 0.0 && alpha <= 2.0)) {
    throw ParameterError("stable alpha must lie in (0, 2], got " +
                         std::to_string(alpha));
  }
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw ParameterError("stable scale must be positive, got " +
                         std::to_string(scale));
  }
}

double sample_pareto(double gamma, double alpha, double u) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw ParameterError("pareto gamma must be positive");
  }
  if (!(alpha > 0.0 && alpha < 2.0)) {
    throw ParameterError("pareto alpha must lie in (0, 2)");
  }
  if (!(u > 0.0 && u <= 1.0)) {
    throw ParameterError("pareto u must lie in (0, 1]");
  }
  return gamma * std::pow(u, -1.0 / alpha);
}

namespace {

std::uint64_t poisson_inversion(double lambda, RngStream& rng) {
  // Sequential search on the CDF; expected lambda + 1 steps.
  const double u = rng.uniform();
  double p = std::exp(-lambda);
  double cdf = p;
  std::uint64_t k = 0;
  while (u > cdf) {
    ++k;
    p *= lambda / static_cast<double>(k);
    cdf += p;
    // Rounding can leave the accumulated CDF just below u near u = 1.
    if (static_cast<double>(k) > lambda && p < 1e-18) break;
  }
  return k;
}

std::uint64_t poisson_ptrs(double lambda, RngStream& rng) {
  const double slam = std::sqrt(lambda);
  const double loglam = std::log(lambda);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);

  for (;;) {
    const double u = rng.uniform() - 0.5;
    const double v = rng.uniform();
    const double us = 0.5 - std::fabs(u);
    const double k = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -lambda + k * loglam - std::lgamma(k + 1.0)) {
      return static_cast<std::uint64_t>(k);
    }
  }
}

}  // namespace

std::uint64_t sample_poisson(double lambda, RngStream& rng) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw ParameterError("poisson rate must be finite and non-negative");
  }
  if (lambda == 0.0) return 0;
  if (lambda < 10.0) return poisson_inversion(lambda, rng);
  return poisson_ptrs(lambda, rng);
}

double sample_sas(const StableSpec& spec, RngStream& rng) {
  spec.validate();
  const double alpha = spec.alpha;
  const double v = std::numbers::pi * (rng.uniform() - 0.5);
  const double w = -std::log(rng.uniform());
  double x;
  if (alpha == 1.0) {
    x = std::tan(v);
  } else {
    x = std::sin(alpha * v) / std::pow(std::cos(v), 1.0 / alpha) *
        std::pow(std::cos((1.0 - alpha) * v) / w, (1.0 - alpha) / alpha);
  }
  return spec.scale * x;
}

double levy_measure_scale(double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0)) {
    throw ParameterError("levy measure scale needs alpha in (0, 2)");
  }
  if (alpha == 1.0) return std::numbers::pi;
  const double c =
      2.0 * std::tgamma(1.0 - alpha) * std::cos(std::numbers::pi * alpha / 2.0);
  return std::pow(c, 1.0 / alpha);
}

double small_jump_second_moment(double gamma, double alpha) {
  if (!(gamma > 0.0) || !(alpha > 0.0 && alpha < 2.0)) {
    throw ParameterError("small jump moment needs gamma > 0, alpha in (0, 2)");
  }
  return 2.0 * alpha * std::pow(gamma, 2.0 - alpha) / (2.0 - alpha);
}

}  // namespace imsm
