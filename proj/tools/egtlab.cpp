// egtlab command-line front end. `run` drives the experiment harness from a
// JSON config; errors land on stderr with a nonzero exit code.
#include <CLI11.hpp>

#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include <egt/experiment.hpp>

int main(int argc, char** argv) {
  CLI::App app{"evolutionary game theory lab"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run an experiment from a JSON config");
  std::string config_path, out_path;
  int workers = 1;
  std::uint64_t seed_override = 0;
  run->add_option("config", config_path, "path to experiment config")->required();
  run->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
  auto* seed_opt = run->add_option("--seed", seed_override, "override master_seed");
  run->add_option("--out", out_path, "output path override");

  CLI11_PARSE(app, argc, argv);

  try {
    egt::ExperimentConfig cfg = egt::load_config(config_path);
    if (seed_opt->count() > 0) cfg.master_seed = seed_override;
    if (!out_path.empty()) cfg.out = out_path;
    egt::run_and_write(cfg, workers, &std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "egtlab: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
