#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "janossy/io.hpp"
#include "janossy/kernels.hpp"
#include "janossy/models.hpp"

namespace janossy::cli {

enum ExitCode : int {
  kOk = 0,
  kToleranceViolation = 1,
  kInvalidConfig = 2,
  kNumericalFailure = 3,
  kBudgetExceeded = 4,
};

/// Sites are written [floor, node] with 1-based floors and 0-based nodes.
struct CorrelationsTask {
  std::vector<std::vector<Site>> point_sets;
};

struct JanossyTask {
  std::vector<std::vector<Site>> point_sets;
  std::optional<std::vector<int>> counts;
};

struct GapTask {};

struct ExtremesTask {
  int floor = 0;
  int k = 1;
  std::vector<double> s;
  /// Rebuild quadrature spaces with a panel break at each s.
  bool align = true;
};

struct VerifyTask {
  std::string suite;
  int instances = 10;
  std::optional<std::uint64_t> seed;
  std::vector<int> forced_full_windows;
};

using Task = std::variant<CorrelationsTask, JanossyTask, GapTask, ExtremesTask, VerifyTask>;

struct Tolerances {
  double max_condition = 1e12;
  double hard_rcond = 1e-12;
  double warn_rcond = 1e-6;
  /// Oracle agreement threshold for correlations, Janossy and gap tasks.
  double agreement = 1e-8;
  /// Oracle agreement threshold for the extremes task.
  double extremes = 1e-6;
};

struct ExperimentConfig {
  std::optional<ChainModelSpec> model;
  Json windows = "empty";
  Task task;
  std::uint64_t seed = 0;
  int threads = 1;
  double budget = 1e6;
  bool oracle = true;
  bool kernel_csv = false;
  Tolerances tolerances;
  /// The parsed document, echoed into the report.
  Json source;
};

/// Parses and validates; throws InvalidArgument (or a json exception) on bad input.
ExperimentConfig parse_config(const Json& document);

/// --seed: replaces the top-level seed, the verify seed and a random model's seed.
void apply_seed_override(ExperimentConfig& config, std::uint64_t seed);

struct OutputFile {
  std::string name;
  std::string content;
};

struct RunReport {
  int exit_code = kOk;
  /// Deterministic report.json content (no timings).
  Json report;
  /// One line per result or instance, printed to stdout.
  std::vector<std::string> lines;
  std::vector<OutputFile> files;
  Json timings = Json::object();
};

/// Runs the task. Errors (invalid config, singular matrices, budget) propagate
/// as exceptions; tolerance violations set exit_code.
RunReport run(const ExperimentConfig& config);

/// Maps an exception to its exit code.
int exit_code_for(const std::exception& err);

/// Writes every output atomically into `dir`.
void write_outputs(const RunReport& report, const std::filesystem::path& dir);

}  // namespace janossy::cli
