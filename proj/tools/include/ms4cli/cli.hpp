#pragma once

// Batch front-end: analyze, deform, monodromy and verify commands writing
// JSON and CSV reports. Exposed as a library so tests can drive it
// in-process.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ms4/error.hpp"
#include "ms4/surface.hpp"

namespace ms4::cli {

enum ExitCode : int { kPass = 0, kVerifyFailed = 1, kUsage = 2, kIntegrity = 3 };

// Bad flags or flag values. Codes: E_CONFIG, E_SCAN_TOO_COARSE.
class ConfigError : public Error {
 public:
  ConfigError(std::string code, const std::string& what) : Error(std::move(code), what) {}
};

struct RunConfig {
  std::string command;
  std::string catalog;
  std::filesystem::path manifest;
  int n = 256;
  std::optional<double> theta;
  int scan = 720;
  double tol_close = 1e-6;
  double perturb = 0.0;
  std::uint64_t seed = 0;
  std::filesystem::path out = "out";
  JetPreference jets = JetPreference::automatic;
  unsigned threads = 0;  // 0: hardware concurrency

  // Throws ConfigError.
  void validate() const;
};

// One verified quantity of the verify suite.
struct Check {
  std::string name;
  std::string ref;
  double value = 0.0;
  double tolerance = 0.0;
  enum class Status { pass, fail, skipped } status = Status::pass;
  std::string note;
};
const char* to_string(Check::Status s);

// Runs the full invariant suite on the configured surface.
std::vector<Check> verify_suite(const RunConfig& cfg);

// Each command writes its files under cfg.out and returns an exit code.
int cmd_analyze(const RunConfig& cfg);
int cmd_deform(const RunConfig& cfg);
int cmd_monodromy(const RunConfig& cfg);
int cmd_verify(const RunConfig& cfg);

// Parses argv, dispatches, and maps errors to exit codes. Error JSON goes to
// `err` and, when possible, to <out>/error.json.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ms4::cli
