#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "edm/csv.hpp"

namespace edm::runner {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr int kSchemaVersion = 1;

// Process exit codes, also returned by run_cli.
enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kBadConfig = 2,
  kNoConvergence = 3,
  kResourceBudget = 4,
  kNumericFailure = 5,
};

struct RunOutput {
  std::string path;     // file written ("" for validate)
  Table table;          // emitted data
  nlohmann::json meta;  // version, config hash, residuals
};

// Execute the subcommand named in the config; throws on error.
RunOutput run(const nlohmann::json& config, std::ostream& log);

// Dry-run: resolve the config, size the problem, list violations. Never throws
// on semantic problems; they become report lines.
std::string validate_config(const nlohmann::json& config);

// Exception-to-exit-code wrapper used by the command-line tool.
int run_cli(const nlohmann::json& config, std::ostream& log, std::ostream& err);

// Load a config file, reporting parse errors with byte positions.
nlohmann::json load_config_file(const std::string& path);

}  // namespace edm::runner
