#pragma once

// Command layer behind the rbsim executable. Each command is a pure function
// of (config, options) to files in the output directory; every file starts
// with a header that echoes the effective config and seed.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rbsim/config.hpp"

namespace rbsim {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitFit = 3 };

struct CommandOptions {
  std::optional<std::filesystem::path> out_dir;  // overrides output_dir from the config
  int workers = 1;
  bool zero_noise = false;
  std::optional<uint64_t> seed;
};

struct CommandResult {
  int exit_code = kExitOk;
  std::vector<std::filesystem::path> files;
  std::string message;  // one-line summary or fit diagnostics
};

// Config after command-line overrides. --zero-noise clears every noise term,
// the Ramsey envelope and the echo decay.
RunConfig effective_config(RunConfig cfg, const CommandOptions& opts);

CommandResult cmd_rb(const RunConfig& cfg, const CommandOptions& opts);
CommandResult cmd_sweep(const RunConfig& cfg, const CommandOptions& opts);
CommandResult cmd_ramsey(const RunConfig& cfg, const CommandOptions& opts);
CommandResult cmd_echo(const RunConfig& cfg, const CommandOptions& opts);
CommandResult cmd_calibrate(const RunConfig& cfg, const CommandOptions& opts);
CommandResult cmd_budget(const RunConfig& cfg, const CommandOptions& opts);
// cayley.csv and decomposition.csv; no randomness involved.
CommandResult cmd_tables(const RunConfig& cfg, const CommandOptions& opts);

CommandResult run_experiment(ExperimentKind kind, const RunConfig& cfg, const CommandOptions& opts);

// "# "-prefixed lines echoing cfg; used at the top of every CSV.
std::string config_header(const RunConfig& cfg);

}  // namespace rbsim
