/* Copyright 2026 The csgd Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "csgd/config.hpp"
#include "csgd/method_config.hpp"
#include "csgd/methods.hpp"

namespace csgd {

// One grid cell (or the single theorem-resolved cell) of a method entry.
struct CellResult {
  MethodConfig config;
  std::vector<RunTrace> traces;          // one per seed
  double median_time_to_threshold = 0.0; // +inf when unreached
  double median_final_f_gap = 0.0;
  bool all_diverged = false;
};

struct MethodSummary {
  std::string name;
  std::string mode;
  int best_cell = -1;  // -1 when every cell diverged
  std::vector<CellResult> cells;
  bool all_diverged() const { return best_cell < 0; }
};

struct ExperimentResult {
  std::vector<MethodSummary> methods;
  std::string summary_csv;
  bool any_method_all_diverged = false;
};

// Expands a method entry into resolved cells: the grid product in grid mode
// (enumerated K-major then gamma then eta), or the single schedule the
// parameter formulas prescribe in theorem mode.
std::vector<MethodConfig> resolve_cells(const ExperimentConfig& cfg,
                                        const MethodSpecConfig& method,
                                        const ProblemInstance& instance,
                                        const ClusterProfile& cluster);

// Runs every cell over every seed and picks the cell with the smallest median
// time to the stopping threshold; ties prefer smaller gamma, then smaller K.
// Returns nullopt when every cell diverged on every seed.
std::optional<CellResult> grid_search(const ExperimentConfig& cfg,
                                      const MethodSpecConfig& method,
                                      const ProblemInstance& instance,
                                      const ClusterProfile& cluster);

// Full pipeline: one trace CSV (plus a metadata sidecar) per
// (method, cell, seed) under `out_dir`, then summary.csv with the best cell
// per method. Deterministic given the config; divergent cells are recorded,
// never fatal.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::string& out_dir,
                                int parallelism_override = 0);

}  // namespace csgd
