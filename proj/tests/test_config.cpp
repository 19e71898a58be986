#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "imsm/config.hpp"

namespace {

using namespace imsm;
using nlohmann::json;

json base(const std::string& command) {
  return {{"schema_version", kSchemaVersion}, {"command", command}};
}

std::vector<FieldError> errors_of(const json& j) {
  try {
    validate_config(j.dump());
  } catch (const ConfigError& e) {
    return e.errors();
  }
  return {};
}

bool has_error(const std::vector<FieldError>& errs, const std::string& field,
               const std::string& constraint_part) {
  return std::any_of(errs.begin(), errs.end(), [&](const FieldError& e) {
    return e.field == field && e.constraint.find(constraint_part) != std::string::npos;
  });
}

TEST(Grid, EndpointsExact) {
  const GridSpec g{0.0, 0.7, 11};
  const auto p = g.points();
  EXPECT_EQ(p.front(), 0.0);
  EXPECT_EQ(p.back(), 0.7);
  EXPECT_EQ(p.size(), 11u);
}

TEST(Config, DefaultsFromMinimalDocument) {
  const RunConfig c = validate_config(base("simulate").dump());
  EXPECT_EQ(c, RunConfig{});
  EXPECT_FALSE(c.window.has_value());
}

TEST(Config, RoundTrip) {
  RunConfig c;
  c.command = Command::estimate;
  c.alpha = 1.8;
  c.hurst = HurstFunction::piecewise_linear(0.75, 0.95, {{0.0, 0.95}, {0.5, 0.75}, {1.0, 0.95}});
  c.window = TruncationWindow{-10.0, 1.0, 0.01};
  c.grid = {0.0, 1.0, 16385};
  c.replicates = 50;
  c.seed = 18446744073709551615ull;
  c.output_dir = "runs/a";
  c.threads = 3;
  c.estimate.a = 0.575;
  c.estimate.b = 0.7;
  c.estimate.pointwise = PointwiseSettings{0.5, 0.5, 3, 9, 0.07};
  c.estimate.moment = MomentSettings{0.25, {0.3, 0.35, 0.5}, 1.2, 0.05, 0.1};
  c.tangent.h_list = {0.5, 0.25};
  c.verify.swap_deltas = {0.02};
  const RunConfig back = config_from_json(json::parse(config_to_json(c).dump()));
  EXPECT_EQ(back, c);
  // Auto window survives as the literal string.
  RunConfig d;
  EXPECT_EQ(config_to_json(d)["window"], "auto");
  EXPECT_EQ(config_from_json(config_to_json(d)), d);
}

TEST(Config, UnknownFieldsRejected) {
  auto j = base("simulate");
  j["replicate"] = 3;
  j["verify"] = {{"epsilon", 0.2}};
  const auto errs = errors_of(j);
  EXPECT_TRUE(has_error(errs, "replicate", "unknown"));
  EXPECT_TRUE(has_error(errs, "verify.epsilon", "unknown"));
}

TEST(Config, SchemaVersionChecked) {
  auto j = base("simulate");
  j["schema_version"] = 99;
  EXPECT_TRUE(has_error(errors_of(j), "schema_version", "must equal"));
  j.erase("schema_version");
  EXPECT_TRUE(has_error(errors_of(j), "schema_version", "required"));
}

TEST(Config, AlphaBelowOneUnsatisfiableForRegularity) {
  auto j = base("estimate");
  j["alpha"] = 0.8;
  EXPECT_TRUE(has_error(errors_of(j), "alpha", "h_lo > 1/alpha unsatisfiable"));
  // Simulation alone has no such requirement.
  auto s = base("simulate");
  s["alpha"] = 0.8;
  EXPECT_TRUE(errors_of(s).empty());
}

TEST(Config, InvertedHurstRange) {
  auto j = base("simulate");
  j["hurst"] = {{"kind", "smooth_catalog"}, {"params", {{"frequency", 1.0}}}, {"h_lo", 0.9}, {"h_hi", 0.7}};
  EXPECT_TRUE(has_error(errors_of(j), "hurst", "h_lo <= h_hi violated"));
}

TEST(Config, RateCapIsResourceError) {
  auto j = base("simulate");
  j["alpha"] = 1.9;
  j["window"] = {{"t0", -1000.0}, {"t_end", 1.0}, {"gamma", 0.001}};
  try {
    validate_config(j.dump());
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_TRUE(e.resource_only());
    ASSERT_EQ(e.errors().size(), 1u);
    EXPECT_NE(e.errors()[0].constraint.find("lambda"), std::string::npos);
    EXPECT_NE(e.errors()[0].got.find("lambda"), std::string::npos);
    EXPECT_EQ(e.to_json()["error"], "resource_cap");
  }
}

TEST(Config, EveryViolationReported) {
  auto j = base("estimate");
  j["alpha"] = 2.5;
  j["replicates"] = 0;
  j["mode"] = "fractal";
  j["grid"] = {{"start", 1.0}, {"end", 0.0}, {"n_points", 10}};
  const auto errs = errors_of(j);
  EXPECT_TRUE(has_error(errs, "alpha", "0 < alpha < 2"));
  EXPECT_TRUE(has_error(errs, "replicates", "at least 1"));
  EXPECT_TRUE(has_error(errs, "mode", "one of"));
  EXPECT_TRUE(has_error(errs, "grid", "end > start"));
}

TEST(Config, AdaptedHurstOnlyForSimulation) {
  auto j = base("estimate");
  j["hurst"] = {{"kind", "adapted_to_path"}, {"params", {{"kappa", 1.0}}}, {"h_lo", 0.7}, {"h_hi", 0.9}};
  EXPECT_TRUE(has_error(errors_of(j), "hurst.kind", "deterministic"));
  j["command"] = "simulate";
  EXPECT_TRUE(errors_of(j).empty());
}

TEST(Config, LfsmNeedsConstantHurst) {
  auto j = base("simulate");
  j["mode"] = "lfsm";
  j["hurst"] = {{"kind", "smooth_catalog"}, {"params", {{"frequency", 1.0}}}, {"h_lo", 0.7}, {"h_hi", 0.9}};
  EXPECT_TRUE(has_error(errors_of(j), "mode", "constant"));
}

TEST(Config, GridMustLieInWindow) {
  auto j = base("simulate");
  j["window"] = {{"t0", -5.0}, {"t_end", 0.5}, {"gamma", 0.1}};
  EXPECT_TRUE(has_error(errors_of(j), "grid", "inside"));
}

TEST(Config, MalformedJson) {
  EXPECT_THROW(validate_config("{\"command\": "), ConfigError);
}

TEST(Config, ErrorRecordShape) {
  auto j = base("estimate");
  j["alpha"] = 0.8;
  try {
    validate_config(j.dump());
    FAIL();
  } catch (const ConfigError& e) {
    const json r = e.to_json();
    EXPECT_EQ(r["error"], "config");
    for (const auto& item : r["errors"]) {
      EXPECT_TRUE(item.contains("field"));
      EXPECT_TRUE(item.contains("constraint"));
      EXPECT_TRUE(item.contains("got"));
    }
  }
}

}  // namespace
