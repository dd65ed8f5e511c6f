#include "hqrc/experiments.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <string>

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitNumericalError = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hqrc — higher-order quantum reservoir computing experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  int workers = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;

  for (const char* name :
       {"qesp", "mc", "spectrum", "narma", "lorenz", "kse", "innate", "trace"}) {
    CLI::App* sub = app.add_subcommand(name, "run the '" + std::string(name) + "' experiment");
    sub->add_option("--config", config_path, "JSON experiment config")->required();
    sub->add_option("--out", out_dir, "output directory (overrides config and HQRC_OUT_DIR)");
    sub->add_option("--workers", workers, "worker threads for independent trials/grid cells");
    sub->add_option("--seed", seed, "master seed (overrides config)")
        ->each([&](const std::string&) { seed_set = true; });
  }

  CLI11_PARSE(app, argc, argv);

  const std::string experiment = app.get_subcommands().front()->get_name();
  try {
    hqrc::ExperimentConfig config = hqrc::parse_config(config_path);
    if (hqrc::experiment_name(config.kind) != experiment)
      throw hqrc::ConfigError("config declares experiment '" +
                              hqrc::experiment_name(config.kind) + "' but subcommand is '" +
                              experiment + "'");
    if (const char* env = std::getenv("HQRC_OUT_DIR")) config.out_dir = env;
    if (!out_dir.empty()) config.out_dir = out_dir;
    if (workers > 0) config.workers = workers;
    if (seed_set) config.seed = seed;

    const hqrc::RunManifest manifest = hqrc::run_experiment(config);
    std::cout << "wrote " << manifest.outputs.size() << " artifact(s) to " << manifest.out_dir
              << " in " << manifest.duration_seconds << " s\n";
    return 0;
  } catch (const hqrc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumericalError;
  }
}
