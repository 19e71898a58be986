#pragma once

#include <exception>
#include <string>
#include <vector>

#include <json.hpp>

#include "imsm/config.hpp"
#include "imsm/simulate.hpp"

namespace imsm {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitResource = 3,
  kExitNumerical = 4,
  kExitVerifyFailed = 5,
};

struct RunOutcome {
  int exit_code = kExitOk;
  std::vector<std::string> files;  // relative to output_dir, manifest last
  nlohmann::json summary;
};

/// Executes a validated config and writes every output under
/// config.output_dir: data files plus one manifest.json referencing them.
/// The manifest's created_at field is the only content that varies between
/// identical runs.
RunOutcome run(const RunConfig& config);

/// Exit code and the machine-readable stderr record for a failure.
int exit_code_for(const std::exception& e);
nlohmann::json error_record(const std::exception& e);

/// 17 significant digits per value; header "t,value".
void write_path_csv(const std::string& file, const std::vector<double>& t,
                    const std::vector<double>& v);

/// The verify command's checks, without file output.
nlohmann::json verification_report(const RunConfig& config);

}  // namespace imsm
