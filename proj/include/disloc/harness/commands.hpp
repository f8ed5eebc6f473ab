#pragma once

#include "disloc/harness/run_config.hpp"

#include <string>
#include <vector>

namespace disloc::harness {

/// What a command wrote. CSV payloads are deterministic; the record itself
/// carries the wall-clock time and goes to result.json.
struct ResultRecord {
  std::string command;
  std::string config_hash;  // RunConfig::hash()
  std::string input_hash;   // git blob id of the canonical config text
  std::vector<std::string> payloads;  // file names inside the output directory
  double seconds = 0.0;

  std::string to_json() const;
};

struct CommandFlags {
  bool check_burgers = false;
};

/// Names accepted by run_command.
const std::vector<std::string>& command_names();

/// Runs cell | phi | simulate | sweep | korn into cfg.out (created if needed)
/// and writes config.txt and result.json next to the CSV payloads.
/// Throws ConfigError or SolverError.
ResultRecord run_command(const std::string& name, const RunConfig& cfg, const CommandFlags& flags = {});

/// sha1("blob <size>\0" + text) in hex.
std::string git_blob_hash(const std::string& text);

}  // namespace disloc::harness
