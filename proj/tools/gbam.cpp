#include <iostream>

#include "CLI11.hpp"
#include "gbam/commands.hpp"

int main(int argc, char** argv) {
  using namespace gbam::cli;

  CLI::App app{"G-BAM bandwidth allocation: validate configs, print tables, run simulations"};
  app.require_subcommand(1);

  std::string path;

  auto* validate = app.add_subcommand("validate", "Check a scenario/config file");
  validate->add_option("file", path, "Scenario JSON file")->required();

  app.add_subcommand("tables", "Print the factory configuration and max-allocation tables");

  RunOptions run_opts;
  std::uint64_t seed = 0;
  auto* run = app.add_subcommand("run", "Simulate a scenario and export CSV metrics");
  run->add_option("file", path, "Scenario JSON file")->required();
  run->add_option("--engine", run_opts.engine, "gbam, gbam:<factory>, mam, rdm or alloctc")
      ->capture_default_str();
  auto* seed_opt = run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--out", run_opts.out_dir, "Output directory")->capture_default_str();
  run->add_option("--warmup", run_opts.warmup_s, "Seconds excluded from the statistics")
      ->check(CLI::NonNegativeNumber);

  CompareOptions cmp_opts;
  auto* compare = app.add_subcommand("compare", "Diff G-BAM against the classic models");
  compare->add_option("file", path, "Scenario JSON file")->required();
  compare->add_option("--pairs", cmp_opts.pairs, "Comma-separated left=right engine pairs")
      ->capture_default_str();
  compare->add_option("--seeds", cmp_opts.seeds, "Number of consecutive seeds")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (*validate) return cmd_validate(path, std::cout, std::cerr);
  if (*run) {
    if (*seed_opt) run_opts.seed = seed;
    return cmd_run(path, run_opts, std::cout, std::cerr);
  }
  if (*compare) return cmd_compare(path, cmp_opts, std::cout, std::cerr);
  return cmd_tables(std::cout);
}
