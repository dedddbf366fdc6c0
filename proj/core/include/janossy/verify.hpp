#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "janossy/io.hpp"

namespace janossy {

struct VerifyOptions {
  int instances = 10;
  std::uint64_t seed = 0;
  /// Enumeration budget (ordered configurations) per instance.
  double budget = 1e6;
  /// Theorem suite: instances whose windows are forced to the full space.
  std::vector<int> forced_full_windows;
};

enum class InstanceStatus { pass, fail, expected_error };

/// Worst comparison of one instance, measured by abs_error / tolerance.
struct InstanceResult {
  int index = 0;
  std::uint64_t seed = 0;
  std::string model;
  InstanceStatus status = InstanceStatus::pass;
  int comparisons = 0;
  Complex computed{};
  Complex reference{};
  double abs_error = 0.0;
  double rel_error = 0.0;
  double tolerance = 0.0;
  std::string note;
};

struct SuiteReport {
  std::string suite;
  int instances = 0;
  std::uint64_t seed = 0;
  std::string tolerance_rule;
  std::vector<InstanceResult> results;
  /// Suite-specific extra rows (the dyson-mehta residual table).
  Json table = Json::array();

  bool passed() const;
  double max_abs_error() const;
};

/// heine, partition, correlations, janossy, theorem, dyson-mehta, marginal,
/// gap, counting, extremes.
const std::vector<std::string>& suite_names();

/// Throws InvalidArgument for unknown suites.
SuiteReport verify_suite(const std::string& name, const VerifyOptions& options);

/// Deterministic for fixed options: no timings, shortest round-trip doubles.
Json to_json(const SuiteReport& report);

}  // namespace janossy
