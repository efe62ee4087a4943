#include "cli_app.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "ipdd/config.hpp"
#include "ipdd/experiment.hpp"

namespace ipdd {

namespace {

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> sets;
  std::string out_dir = "out";
  std::string seeds;
};

void add_common(CLI::App* cmd, CommonArgs* args) {
  cmd->add_option("--config", args->config_path, "configuration file (key=value lines)");
  cmd->add_option("--set", args->sets, "override, repeatable: --set key=value")
      ->take_all();
  cmd->add_option("--out", args->out_dir, "output directory");
  cmd->add_option("--seeds", args->seeds, "comma-separated seed list override");
}

ExperimentConfig load(const CommonArgs& args) {
  std::vector<std::string> overrides = args.sets;
  if (!args.seeds.empty()) overrides.push_back("seeds=" + args.seeds);
  if (args.config_path.empty()) return config_from_overrides(overrides);
  return load_config(args.config_path, overrides);
}

void report_outputs(const std::vector<std::filesystem::path>& outputs) {
  for (const auto& p : outputs) std::cout << "wrote " << p.string() << '\n';
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"streaming drift detection with integrally private model ensembles"};
  app.require_subcommand(1);

  CommonArgs run_args;
  bool run_svg = false;
  CLI::App* run = app.add_subcommand("run", "run the configured methods over the stream");
  add_common(run, &run_args);
  run->add_flag("--svg", run_svg, "also write SVG charts per run");

  CommonArgs compare_args;
  CLI::App* compare =
      app.add_subcommand("compare", "run all methods and print a comparison table");
  add_common(compare, &compare_args);

  CommonArgs theory_args;
  CLI::App* theory =
      app.add_subcommand("theory", "recurrence-bound sweep against Monte Carlo");
  add_common(theory, &theory_args);

  CommonArgs gen_args;
  CLI::App* gen = app.add_subcommand("gen", "export the configured dataset as CSV");
  add_common(gen, &gen_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) {
      report_outputs(cmd_run(load(run_args), run_args.out_dir, run_svg));
    } else if (compare->parsed()) {
      std::string table;
      report_outputs(cmd_compare(load(compare_args), compare_args.out_dir, &table));
      std::cout << table;
    } else if (theory->parsed()) {
      report_outputs(cmd_theory(load(theory_args), theory_args.out_dir));
    } else if (gen->parsed()) {
      report_outputs(cmd_gen(load(gen_args), gen_args.out_dir));
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace ipdd
