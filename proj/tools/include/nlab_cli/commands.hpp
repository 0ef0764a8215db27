#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nlab/config.hpp"
#include "nlab_cli/experiment.hpp"

namespace nlab::cli {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitNumerical = 2 };

struct CommandOptions {
  std::optional<std::string> config_path;
  std::optional<std::string> preset;
  std::optional<std::string> out_dir;
  /// beta-fit / beta2-fit: reuse an existing sweep.csv instead of integrating.
  std::optional<std::string> sweep_path;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  bool svg = true;
  bool timestamp = true;
};

const std::vector<std::string>& command_names();

/// Preset (if any) overlaid with the config file (if any). Throws ConfigError.
IniDocument load_document(const CommandOptions& opts);

/// Runs one subcommand and maps errors to exit codes; messages go to `err`.
int run_command(const std::string& name, const CommandOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace nlab::cli
