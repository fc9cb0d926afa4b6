// qcigeo: admissibility checks, eigensolves, geodesic integrals and decay sweeps.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  namespace cli = qcigeo::cli;

  CLI::App app{"Geodesic restriction experiments for joint eigenfunctions on surfaces of revolution"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  unsigned threads = 1;
  long long seed = 0;
  app.add_option("--config", config_path, "experiment configuration (JSON)");
  app.add_option("--out", out_dir, "output directory (overrides output.dir)");
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "reserved; accepted and ignored");

  const char* config_subcommands[] = {"admissible", "eigen", "integrate", "sweep"};
  const char* descriptions[] = {
      "decide admissibility of a geodesic (exit 0 admissible, 3 not admissible, 4 empty band)",
      "radial eigenpairs for one angular mode, cached on disk",
      "integral of a joint eigenfunction along a geodesic arc",
      "run a decay experiment and fit log|I| against log h",
  };
  for (int i = 0; i < 4; ++i) app.add_subcommand(config_subcommands[i], descriptions[i])->fallthrough();

  std::string report_path;
  CLI::App* plot = app.add_subcommand("plotdata", "two-column (log h, log|I|) data from a saved report")->fallthrough();
  plot->add_option("report", report_path, "report CSV written by sweep")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::exit_config;
  }

  cli::RunOptions options;
  options.threads = threads;
  if (!out_dir.empty()) options.out_dir = std::filesystem::path(out_dir);

  if (plot->parsed()) return cli::cmd_plotdata(report_path, std::cout, std::cerr);

  for (const char* name : config_subcommands) {
    if (!app.got_subcommand(name)) continue;
    if (config_path.empty()) {
      std::cerr << "error: " << name << " needs --config <path>\n";
      return cli::exit_config;
    }
    return cli::run_with_config(name, config_path, options, std::cout, std::cerr);
  }
  return cli::exit_config;
}
