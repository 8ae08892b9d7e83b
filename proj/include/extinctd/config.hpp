// SPDX-License-Identifier: Apache-2.0
//
// Experiment configuration: YAML in, validated ExperimentConfig out, and the
// inverse emitter (parse_config_text(emit_config(c)) == c).
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "extinctd/integrators.hpp"
#include "extinctd/process.hpp"

namespace extinctd {

enum class ExperimentKind { Simulate, BoundaryExponent, Slope, Criterion, RobustnessScan, Diagnostics };

const char* experiment_name(ExperimentKind k) noexcept;
/// Throws InvalidConfig for unknown names.
ExperimentKind experiment_from_name(const std::string& name);

struct EstimatorSettings {
  double burn_in = 0.1;    // fraction of t_final
  double window = 0.5;     // final fraction used by slope regressions
  double tolerance = 0.1;  // slope tolerance for extinction_fraction
  bool operator==(const EstimatorSettings&) const = default;
};

struct ScanSettings {
  std::string param;
  std::vector<double> values;
  std::size_t limit_index = 0;
  double jump_tolerance = 0.1;
  bool operator==(const ScanSettings&) const = default;
};

struct ExperimentConfig {
  std::string model;
  ParamRecord params;
  ExperimentKind experiment = ExperimentKind::Simulate;
  SimConfig sim;
  std::size_t replicas = 1;
  std::optional<std::uint64_t> seed;
  std::vector<StateVector> ics;
  /// Boundary starting points; the model's defaults when empty.
  std::vector<StateVector> boundary_ics;
  std::string output = "out";
  EstimatorSettings estimator;
  ScanSettings scan;
  /// Sample points for the diagnostics experiment.
  std::size_t diagnostic_points = 100;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Parses YAML text without the semantic checks of validate_config.
/// Throws ParseError (with line:column), UnknownKey, InvalidConfig.
ExperimentConfig parse_config_text(const std::string& text);

/// Reads and parses a file (IoError when unreadable), then validates.
ExperimentConfig parse_config(const std::string& path);

/// Reads and parses a file without validation (used before CLI overrides).
ExperimentConfig load_config_unchecked(const std::string& path);

/// Semantic checks: registered model with accepted parameters, seed present,
/// replicas >= 1, sim settings, initial-condition dimensions, scan settings.
/// Throws UnknownModel, UnknownKey, MissingField, InvalidConfig,
/// DimensionMismatch.
void validate_config(const ExperimentConfig& cfg);

std::string emit_config(const ExperimentConfig& cfg);

}  // namespace extinctd
