// SPDX-License-Identifier: Apache-2.0
//
// Config-driven experiment runner. Writes report.json plus, depending on the
// experiment, trajectories.csv, residuals.csv and exponents.csv into
// cfg.output. Files written by a failed run are removed again.
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "extinctd/config.hpp"

namespace extinctd {

struct RunOptions {
  std::size_t threads = 1;
};

struct RunResult {
  std::string report_json;
  std::vector<std::string> files;  // paths written, report.json last
};

/// Validates cfg, runs it and writes the outputs. Identical cfg gives
/// byte-identical report.json regardless of the thread count.
RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opts = {});

}  // namespace extinctd
