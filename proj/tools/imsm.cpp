#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "imsm/config.hpp"
#include "imsm/runner.hpp"

namespace {

struct Flags {
  std::string config_file;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<unsigned> threads;
};

void add_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config_file, "JSON run configuration");
  sub->add_option("--seed", f.seed, "base seed, overrides the config");
  sub->add_option("--out", f.out, "output directory, overrides the config");
  sub->add_option("--threads", f.threads, "worker count, 0 = available parallelism");
}

int fail(const std::exception& e) {
  std::cerr << imsm::error_record(e).dump() << '\n';
  return imsm::exit_code_for(e);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw imsm::ConfigError({{"--config", "readable file", path}});
  }
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

int execute(const std::string& command, const Flags& f) {
  try {
    // Without a file the built-in defaults apply at the current schema.
    nlohmann::json raw = {{"schema_version", imsm::kSchemaVersion}};
    if (!f.config_file.empty()) {
      try {
        raw = nlohmann::json::parse(read_file(f.config_file));
      } catch (const nlohmann::json::parse_error& e) {
        throw imsm::ConfigError({{"--config", "valid JSON", e.what()}});
      }
      if (!raw.is_object()) throw imsm::ConfigError({{"", "JSON object", raw.dump()}});
    }
    if (raw.contains("command") && raw["command"] != command) {
      throw imsm::ConfigError(
          {{"command", "matches the subcommand " + command, raw["command"].dump()}});
    }
    raw["command"] = command;
    if (f.seed) raw["seed"] = *f.seed;
    if (f.out) raw["output_dir"] = *f.out;
    if (f.threads) raw["threads"] = *f.threads;
    const imsm::RunConfig config = imsm::validate_config(raw.dump());
    const imsm::RunOutcome outcome = imsm::run(config);
    std::cout << outcome.summary.dump() << '\n';
    return outcome.exit_code;
  } catch (const std::exception& e) {
    return fail(e);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation and regularity analysis of multistable moving-average processes"};
  app.require_subcommand(1);
  Flags flags;
  std::string chosen;
  for (const char* name : {"simulate", "estimate", "tangent", "verify", "figures"}) {
    CLI::App* sub = app.add_subcommand(name);
    add_flags(sub, flags);
    sub->callback([&chosen, name] { chosen = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    nlohmann::json err = {{"error", "usage"}, {"message", e.what()}};
    std::cerr << err.dump() << '\n';
    return imsm::kExitConfig;
  }
  return execute(chosen, flags);
}
