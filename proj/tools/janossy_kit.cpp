#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "cli/run.hpp"

namespace jc = janossy::cli;

int main(int argc, char** argv) {
  CLI::App app{"Janossy densities and correlation kernels of multi-class chain ensembles"};
  app.require_subcommand(1);
  auto* run = app.add_subcommand("run", "Run the task described by a JSON config");
  std::string config_path;
  std::string out_dir = "janossy-out";
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<double> budget;
  run->add_option("config", config_path, "Config file (JSON)")->required();
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--seed", seed, "Seed, overrides the config");
  run->add_option("--threads", threads, "Worker threads");
  run->add_option("--budget", budget, "Enumeration budget (configurations)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : jc::kInvalidConfig;
  }

  try {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "error: cannot read " << config_path << "\n";
      return jc::kInvalidConfig;
    }
    jc::ExperimentConfig config = jc::parse_config(janossy::Json::parse(in));
    if (seed) jc::apply_seed_override(config, *seed);
    if (threads) config.threads = *threads;
    if (budget) config.budget = *budget;
    const jc::RunReport report = jc::run(config);
    jc::write_outputs(report, out_dir);
    for (const auto& line : report.lines) std::cout << line << "\n";
    return report.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return jc::exit_code_for(e);
  }
}
