#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "nlab_cli/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Numerical experiments for Lorenz-like flows with a neutral saddle"};
  app.require_subcommand(1);

  nlab::cli::CommandOptions opts;
  std::string config, preset, out, sweep;
  std::uint64_t seed = 0;
  unsigned workers = 0;
  bool no_svg = false, no_timestamp = false;

  const std::map<std::string, std::string> help{
      {"dulac-sweep", "integrate the Dulac transit over a grid of x0 and write sweep.csv"},
      {"beta-fit", "raw and adjusted estimates of beta (fit.csv, fit_summary.txt, figure.svg)"},
      {"beta2-fit", "raw and adjusted estimates of beta2 from flow times"},
      {"orbit", "iterate the return map and check the fiber contraction properties"},
      {"tails", "empirical survival function of the return time"},
      {"correlations", "correlation decay of the suspension flow"},
      {"presets", "list built-in parameter sets (with --preset, print one)"},
  };
  std::vector<CLI::App*> subs;
  for (const auto& name : nlab::cli::command_names()) {
    CLI::App* sub = app.add_subcommand(name, help.at(name));
    sub->add_option("--config", config, "INI configuration file")->check(CLI::ExistingFile);
    sub->add_option("--preset", preset, "built-in parameter set");
    if (name != "presets") {
      sub->add_option("--out", out, "output directory");
      sub->add_option("--seed", seed, "random seed");
      sub->add_option("--workers", workers, "worker threads (0 = all cores)");
      sub->add_flag("--no-svg", no_svg, "skip SVG figures");
      sub->add_flag("--no-timestamp", no_timestamp, "omit the timestamp from SVG figures");
    }
    if (name == "beta-fit" || name == "beta2-fit") {
      sub->add_option("--sweep", sweep, "reuse an existing sweep.csv")->check(CLI::ExistingFile);
    }
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : nlab::cli::kExitUsage;
  }

  for (CLI::App* sub : subs) {
    if (!sub->parsed()) continue;
    if (!config.empty()) opts.config_path = config;
    if (!preset.empty()) opts.preset = preset;
    if (!out.empty()) opts.out_dir = out;
    if (!sweep.empty()) opts.sweep_path = sweep;
    if (auto* o = sub->get_option_no_throw("--seed"); o && o->count()) opts.seed = seed;
    if (auto* o = sub->get_option_no_throw("--workers"); o && o->count()) opts.workers = workers;
    opts.svg = !no_svg;
    opts.timestamp = !no_timestamp;
    return nlab::cli::run_command(sub->get_name(), opts, std::cout, std::cerr);
  }
  return nlab::cli::kExitUsage;
}
