// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace wavefocus {

// Command-line overrides that take precedence over config values.
struct CliOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
};

// Executes one batch command (design, forward, verify, ensemble, diagnose)
// with a JSON config, writing artifacts and report.json into out_dir.
// Returns the process exit code: 0 success, 1 tolerance or convergence
// failure, 2 invalid input.  Failures also produce out_dir/error.json.
// Never throws.
int run_command(const std::string& command, const std::string& config_path,
                const std::string& out_dir, const CliOverrides& overrides = {});

}  // namespace wavefocus
