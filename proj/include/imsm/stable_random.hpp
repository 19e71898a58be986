#pragma once

#include <cstdint>

#include "imsm/rng.hpp"

namespace imsm {

/// Symmetric alpha-stable law with characteristic function
/// exp(-scale^alpha |t|^alpha). scale = 1 gives the unit-time increment of
/// the standardized driving motion.
struct StableSpec {
  double alpha = 1.5;
  double scale = 1.0;

  void validate() const;
};

/// gamma * u^(-1/alpha): inverse survival function of Pareto(gamma, alpha),
/// whose survival is (gamma / y)^alpha on [gamma, inf).
double sample_pareto(double gamma, double alpha, double u);

/// -1 below the midpoint, +1 otherwise.
inline int sample_rademacher(double u) { return u < 0.5 ? -1 : 1; }

/// Exact Poisson(lambda) variate. Inversion below lambda = 10, Hormann's
/// transformed rejection with squeeze (PTRS) above.
std::uint64_t sample_poisson(double lambda, RngStream& rng);

/// Chambers-Mallows-Stuck for beta = 0. At alpha = 1 the construction reduces
/// to tan(V) (standard Cauchy); at alpha = 2 it is 2 sin(V) sqrt(W), a centered
/// Gaussian with variance 2.
double sample_sas(const StableSpec& spec, RngStream& rng);

/// Scale of the symmetric stable motion whose Levy measure is
/// alpha |y|^(-alpha-1) dy, i.e. the motion the jump representation sums.
/// Its unit-time characteristic exponent is
/// 2 Gamma(1 - alpha) cos(pi alpha / 2) |t|^alpha (pi |t| at alpha = 1).
double levy_measure_scale(double alpha);

/// Second moment of the jumps below the cutoff:
/// int_{-gamma}^{gamma} y^2 alpha |y|^(-alpha-1) dy = 2 alpha gamma^(2-alpha) / (2-alpha).
double small_jump_second_moment(double gamma, double alpha);

}  // namespace imsm
