#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace spinmz::runner {

struct RunOptions {
  std::string command;      // spectrum|protocol|decoherence|metrology|validate
  std::string config_path;  // read when config_text is empty
  std::string config_text;  // inline config, takes precedence over the path
  std::string out_dir = ".";
  int threads = 0;  // 0: [run] threads, else hardware
  bool threads_set = false;
  std::uint64_t seed = 0;  // overrides [run] seed when seed_set
  bool seed_set = false;
};

struct RunReport {
  int exit_code = 2;  // 0 ok, 1 validation/adiabaticity failure, 2 config error
  std::string run_id;  // hex digest of (command, config text, seed)
  std::string summary_json;
  std::vector<std::string> outputs;  // paths written by this run
  std::string message;               // one-line outcome
};

// Dispatches one subcommand. Never throws: configuration problems come back
// as exit code 2, physics/numerics failures as 1. Result files land in
// out_dir as <run_id>_<command>.{csv,json,txt,svg} and every run appends one
// JSON line to out_dir/runs.jsonl. The run log is the only output carrying
// timings and thread counts; everything else is byte-deterministic in
// (config, seed).
RunReport run(const RunOptions& options);

// Parses and schema-checks a config without running it. Throws ConfigError.
void check_config(const std::string& command, const std::string& text);

std::string version();

}  // namespace spinmz::runner
