#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fedtrident/config.hpp"
#include "fedtrident/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"FedTrident: federated-learning poisoning-defense simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  bool seed_given = false;
  int threads = 0;
  bool dump_trajectory = false;

  auto* run = app.add_subcommand("run", "Run one experiment from a config file");
  run->add_option("config", config_path, "Path to the experiment config")->required();
  run->add_option("--out", out_dir, "Output directory (default: out)");
  run->add_option("--seed", seed, "Override the config's master seed")
      ->each([&](const std::string&) { seed_given = true; });
  run->add_option("--threads", threads, "Threads for parallel local training");
  run->add_flag("--dump-trajectory", dump_trajectory,
                "Write per-round update deltas under out/trajectory/");

  std::string axis;
  std::string values_arg;
  bool parallel = false;
  auto* sweep = app.add_subcommand("sweep", "Run one experiment per axis value");
  sweep->add_option("config", config_path, "Path to the base config")->required();
  sweep->add_option("--axis", axis, "malicious_fraction | alpha | defense")->required();
  sweep->add_option("--values", values_arg, "Comma-separated axis values")->required();
  sweep->add_option("--out", out_dir, "Output directory (default: out)");
  sweep->add_option("--seed", seed, "Override the config's master seed")
      ->each([&](const std::string&) { seed_given = true; });
  sweep->add_flag("--parallel", parallel, "Run sweep entries concurrently");

  CLI11_PARSE(app, argc, argv);

  try {
    fedtrident::ExperimentConfig config = fedtrident::parse_config(config_path);
    if (seed_given) config.seed = seed;
    if (threads > 0) config.threads = threads;

    if (run->parsed()) {
      return fedtrident::run_to_directory(config, out_dir, dump_trajectory);
    }

    std::vector<std::string> values;
    std::string current;
    for (char c : values_arg) {
      if (c == ',') {
        if (!current.empty()) values.push_back(current);
        current.clear();
      } else if (c != ' ') {
        current += c;
      }
    }
    if (!current.empty()) values.push_back(current);
    return fedtrident::sweep_to_directory(config, axis, values, out_dir, parallel);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
