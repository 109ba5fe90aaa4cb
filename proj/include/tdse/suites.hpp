#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "tdse/config.hpp"

namespace tdse {

struct SuiteResult {
  std::string name;
  bool pass = false;
  bool error = false;  ///< the suite threw; counts as a failure
  std::string message;
  nlohmann::json scalars = nlohmann::json::object();
  std::vector<std::filesystem::path> files;  ///< relative to the output dir
};

/// Runs one suite, writing its artifacts under cfg.output / name. Never throws
/// for runtime failures; they come back as an error result.
SuiteResult run_suite(const std::string& name, const ExperimentConfig& cfg);

/// Runs every selected suite on a pool of cfg.workers threads. Results keep
/// the order of cfg.suites.
std::vector<SuiteResult> run_experiment(const ExperimentConfig& cfg);

/// One JSON document: per-suite verdicts, key scalars and a file manifest
/// with SHA-256 hashes. Throws std::invalid_argument for an empty list.
nlohmann::json emit_report(const ExperimentConfig& cfg,
                           const std::vector<SuiteResult>& results);

/// 0 when every suite passed, 1 otherwise.
int exit_status(const std::vector<SuiteResult>& results);

}  // namespace tdse
