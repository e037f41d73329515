#pragma once

#include <string>
#include <vector>

#include "oscflow/config.hpp"
#include "oscflow/error.hpp"

namespace oscflow {

// Process exit codes shared by the CLI and the C API.
enum ExitCode : int {
  kExitPass = 0,
  kExitInternal = 1,
  kExitGateFailure = 2,
  kExitConfig = 3,
  kExitNoConvergence = 4,
};

int exit_code_for(ErrorCode code);

struct CommandResult {
  int exit_code = kExitPass;
  std::vector<std::string> files;  // paths written, manifest last
  std::string summary;             // one line for the terminal
};

// Each command creates `out_dir` and always writes manifest.json there, also on
// failure. Core errors are caught and mapped onto exit codes.
CommandResult cmd_poiseuille(const RunConfig& cfg, const std::string& out_dir);
CommandResult cmd_solve(const RunConfig& cfg, const std::string& out_dir);
CommandResult cmd_resonance(const RunConfig& cfg, const std::string& out_dir);

}  // namespace oscflow
