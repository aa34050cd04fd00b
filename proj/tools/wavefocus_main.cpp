// SPDX-License-Identifier: Apache-2.0
#include <cstdint>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "wavefocus/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"wavefocus: design and verify wave-focusing materials"};
  app.require_subcommand(1);

  struct Args {
    std::string config;
    std::string out = "out";
    std::optional<std::uint64_t> seed;
    std::optional<double> tol;
  };
  Args args;

  const std::pair<const char*, const char*> commands[] = {
      {"design", "fit a potential and particle density to a far-field target"},
      {"forward", "solve the scattering problem for a stored potential"},
      {"verify", "re-solve a designed potential and compare amplitudes"},
      {"ensemble", "embed sampled particle clouds and compare amplitudes"},
      {"diagnose", "emit the far-field operator's singular values"},
  };
  for (const auto& [name, description] : commands) {
    CLI::App* sub = app.add_subcommand(name, description);
    sub->add_option("--config", args.config, "JSON run configuration")
        ->required();
    sub->add_option("--out", args.out, "output directory (default: out)");
    sub->add_option("--seed", args.seed, "override the config seed");
    sub->add_option("--tol", args.tol, "override the config tolerance");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // bad flags are input errors
  }

  const std::string command = app.get_subcommands().front()->get_name();
  wavefocus::CliOverrides overrides;
  overrides.seed = args.seed;
  overrides.tol = args.tol;
  return wavefocus::run_command(command, args.config, args.out, overrides);
}
