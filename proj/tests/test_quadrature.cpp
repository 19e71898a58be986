#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "imsm/errors.hpp"
#include "imsm/quadrature.hpp"

namespace {

using imsm::integrate;

TEST(Quadrature, Polynomial) {
  const auto r = integrate([](double x) { return x * x * x - 2.0 * x; }, -1.0, 3.0);
  EXPECT_NEAR(r.value, 12.0, 1e-12);
}

TEST(Quadrature, Oscillatory) {
  const auto r = integrate([](double x) { return std::sin(x); }, 0.0, 20.0 * std::numbers::pi,
                           {1e-10, 1e-12, 4000});
  EXPECT_NEAR(r.value, 0.0, 1e-10);
}

TEST(Quadrature, IntegrableEndpointSingularity) {
  // int_0^1 x^(-0.8) dx = 5.
  const auto r = integrate([](double x) { return std::pow(x, -0.8); }, 0.0, 1.0, {1e-8});
  EXPECT_NEAR(r.value, 5.0, 5e-7);
  EXPECT_LE(r.abs_error, 1e-8 * 5.0 * 1.0001);
}

TEST(Quadrature, LogSingularity) {
  const auto r = integrate([](double x) { return std::log(x); }, 0.0, 1.0, {1e-10});
  EXPECT_NEAR(r.value, -1.0, 1e-9);
}

TEST(Quadrature, ReversedLimitsFlipSign) {
  const auto f = [](double x) { return std::exp(x); };
  EXPECT_NEAR(integrate(f, 1.0, 0.0).value, -(std::exp(1.0) - 1.0), 1e-12);
}

TEST(Quadrature, EmptyInterval) {
  EXPECT_EQ(integrate([](double) { return 1.0; }, 2.0, 2.0).value, 0.0);
}

TEST(Quadrature, BudgetExhaustionReportsAchievedTolerance) {
  try {
    integrate([](double x) { return std::sin(1.0 / x); }, 1e-6, 1.0, {1e-14, 0.0, 20});
    FAIL() << "expected NumericalError";
  } catch (const imsm::NumericalError& e) {
    EXPECT_GT(e.achieved_tolerance(), 1e-14);
  }
}

}  // namespace
