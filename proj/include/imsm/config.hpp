#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "imsm/errors.hpp"
#include "imsm/hurst.hpp"
#include "imsm/simulate.hpp"

namespace imsm {

inline constexpr int kSchemaVersion = 1;

enum class Command { simulate, estimate, tangent, verify, figures };
std::string to_string(Command c);
Command command_from_string(const std::string& name);

struct GridSpec {
  double start = 0.0;
  double end = 1.0;
  std::size_t n_points = 1025;

  /// start + (end - start) j / (n_points - 1), last point exactly end.
  std::vector<double> points() const;
  bool operator==(const GridSpec&) const = default;
};

struct PointwiseSettings {
  double t0 = 0.5;
  double h0 = 1.0;
  int k_min = 4;
  int k_max = 10;
  double tolerance = 0.07;
  bool operator==(const PointwiseSettings&) const = default;
};

struct MomentSettings {
  double s = 0.3;
  std::vector<double> t_list;
  double p = 1.2;
  double delta = 0.05;
  double tolerance = 0.1;
  bool operator==(const MomentSettings&) const = default;
};

struct EstimateSettings {
  double a = 0.0;
  double b = 1.0;
  int min_level = -1;  // negative: finer half of the available levels
  int finest_dropped = 2;
  double tolerance = 0.08;
  std::optional<PointwiseSettings> pointwise;
  std::optional<MomentSettings> moment;
  bool operator==(const EstimateSettings&) const = default;
};

struct TangentSettings {
  double t0 = 0.5;
  std::vector<double> h_list{0.0625, 0.0078125, 0.0009765625};
  std::vector<double> r_grid{-1.0, -0.5, 0.5, 1.0};
  std::size_t n_rep = 2000;
  double p_threshold = 0.01;
  double accept_fraction = 0.8;
  bool operator==(const TangentSettings&) const = default;
};

struct VerifySettings {
  double t = 0.0;
  double epsilon_near = 0.1;
  double epsilon_far = 0.9;
  int k_min = 4;
  int k_max = 10;
  double slope_tolerance = 0.05;
  std::vector<double> swap_deltas{0.01, 0.05};
  int swap_k_min = 4;
  int swap_k_max = 12;
  double swap_hurst = 0.7;
  std::size_t sampler_draws = 100000;
  bool operator==(const VerifySettings&) const = default;
};

struct RunConfig {
  int schema_version = kSchemaVersion;
  Command command = Command::simulate;
  double alpha = 1.5;
  HurstFunction hurst = HurstFunction::constant(0.8);
  std::optional<TruncationWindow> window;  // empty means "auto"
  double atom_cap = kDefaultAtomCap;
  double atom_budget = 1e6;  // auto window only
  GridSpec grid;
  PathMode mode = PathMode::ito_msm;
  std::size_t replicates = 1;
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  unsigned threads = 0;  // 0 = available parallelism
  EstimateSettings estimate;
  TangentSettings tangent;
  VerifySettings verify;

  bool operator==(const RunConfig&) const = default;
};

struct FieldError {
  std::string field;
  std::string constraint;
  std::string got;
  bool resource = false;  // the atom cap, rather than a malformed value
};

/// Every violation found in a config, not just the first.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<FieldError> errors);
  const std::vector<FieldError>& errors() const { return errors_; }
  bool resource_only() const;
  nlohmann::json to_json() const;

 private:
  std::vector<FieldError> errors_;
};

/// Parses and checks a config; throws ConfigError listing all violations.
RunConfig validate_config(const std::string& raw_json);
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& config);

}  // namespace imsm
