#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <renormlab/report_json.hpp>

#include "config.hpp"

namespace rltool {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct ScenarioOutput {
  renormlab::Json report;
  std::string status = "ok";  ///< "ok" or "undecided"
  std::vector<std::pair<std::string, CsvTable>> csv;  ///< (file suffix, table)
};

struct RunContext {
  std::uint64_t seed = 0;
  bool verbose = false;
};

const std::vector<std::string>& scenario_kinds();

/// Runs the scenario described by `cfg` (top-level keys other than kind, name,
/// seed and output). Unknown keys raise ConfigError.
ScenarioOutput run_scenario(const std::string& kind, Section& cfg, const RunContext& ctx);

}  // namespace rltool
