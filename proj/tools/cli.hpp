#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

namespace gmdiv::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kHypothesisViolation = 3,
  kCapabilityError = 4,
};

/// Runs one command from an already merged config (flags applied).
/// Throws the library exceptions; run_main maps them to exit codes.
void run_command(const std::string& command, const nlohmann::json& config, std::ostream& out);

/// gmdiv div|sweep|dichotomy|entropy|seq|report --config <path> [--seed N] [--out <dir>]
/// [--threads N]
int run_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gmdiv::cli
