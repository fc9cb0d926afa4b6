#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "qcigeo/config.hpp"

namespace qcigeo::cli {

enum ExitCode : int {
  exit_ok = 0,
  exit_config = 2,
  exit_not_admissible = 3,
  exit_empty_band = 4,
  exit_fit_degenerate = 5,
};

struct RunOptions {
  std::optional<std::filesystem::path> out_dir;  ///< overrides output.dir
  unsigned threads = 1;
};

int cmd_admissible(const ExperimentConfig& config, std::ostream& out, std::ostream& err);
int cmd_eigen(const ExperimentConfig& config, const RunOptions& options, std::ostream& out, std::ostream& err);
int cmd_integrate(const ExperimentConfig& config, std::ostream& out, std::ostream& err);
int cmd_sweep(const ExperimentConfig& config, const RunOptions& options, std::ostream& out, std::ostream& err);
int cmd_plotdata(const std::filesystem::path& report, std::ostream& out, std::ostream& err);

/// Loads the config at `path` and dispatches; config errors become exit 2.
int run_with_config(const char* subcommand, const std::filesystem::path& path, const RunOptions& options,
                    std::ostream& out, std::ostream& err);

}  // namespace qcigeo::cli
