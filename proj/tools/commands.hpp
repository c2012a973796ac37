#pragma once

#include <string>
#include <utility>
#include <vector>

#include "bbmlab/report.hpp"
#include "json.hpp"
#include "run_config.hpp"

namespace bbmcli {

struct CommandInfo {
  std::string name;
  std::string summary;
  std::vector<std::string> sections;  // config sections the command reads
};
const std::vector<CommandInfo>& commands();

struct Result {
  bool pass = true;
  nlohmann::json data = nlohmann::json::object();
  std::vector<std::pair<std::string, bbm::CsvTable>> tables;  // file suffix, table
  std::string text;                                           // human summary
};

// throws UsageError on violated preconditions before any compute
Result run_command(const std::string& name, const RunConfig& cfg, int jobs);

// schema-versioned document wrapping a result
nlohmann::json envelope(const std::string& command, const RunConfig& cfg, const Result& r);

}  // namespace bbmcli
