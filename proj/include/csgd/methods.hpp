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

#include <cstdint>
#include <string>
#include <vector>

#include "csgd/compressor.hpp"
#include "csgd/method_config.hpp"
#include "csgd/problem.hpp"
#include "csgd/time_model.hpp"
#include "csgd/trace.hpp"

namespace csgd {

struct StepResult {
  double seconds = 0.0;
  uint64_t up_coords = 0;
  uint64_t down_coords = 0;
};

struct SyncSgdState {
  std::vector<double> x;
  int64_t k = 0;
};

struct InkheartState {
  std::vector<double> x;                       // server iterate
  std::vector<std::vector<double>> x_local;    // per-worker models
  int64_t k = 0;

  // scratch, not part of the method state
  std::vector<double> scratch_g, scratch_sum, scratch_prev;
  std::vector<double> scratch_memo;
  std::vector<uint64_t> scratch_epoch;
  uint64_t epoch_counter = 0;
};

struct M4State {
  std::vector<double> x;                       // server iterate
  std::vector<std::vector<double>> w;          // per-worker shadow models
  std::vector<std::vector<double>> x_local;    // per-worker local iterates
  std::vector<std::vector<double>> v;          // per-worker momentum estimators
  std::vector<double> g;                       // server estimator
  int64_t k = 0;

  std::vector<double> scratch_sum, scratch_diff, scratch_g, scratch_prev;
};

SyncSgdState sync_sgd_init(const ProblemInstance& instance);
InkheartState inkheart_init(const ProblemInstance& instance);
// Seeds the momentum estimators with b_init-sample minibatches. The caller
// bills the warm start as b_init * max_i h_i once, before iteration 0.
M4State m4_init(const ProblemInstance& instance, const NoiseSpec& noise,
                const MethodConfig& config, uint64_t master_seed);

StepResult sync_sgd_step(SyncSgdState& state, const ProblemInstance& instance,
                         const ClusterProfile& cluster, const NoiseSpec& noise,
                         const MethodConfig& config, uint64_t master_seed);

StepResult inkheart_step(InkheartState& state, const ProblemInstance& instance,
                         const ClusterProfile& cluster, const NoiseSpec& noise,
                         const MethodConfig& config, uint64_t master_seed);

// Identical update rule with per-worker counts and simplex weights.
StepResult inkheart_heter_step(InkheartState& state, const ProblemInstance& instance,
                               const ClusterProfile& cluster, const NoiseSpec& noise,
                               const MethodConfig& config, uint64_t master_seed);

StepResult m4_step(M4State& state, const ProblemInstance& instance,
                   const ClusterProfile& cluster, const NoiseSpec& noise,
                   const MethodConfig& config, uint64_t master_seed);

// One draw of the aggregated gradient estimator at the given state, without
// advancing it. `iteration` selects the randomness streams.
std::vector<double> inkheart_estimator_draw(const InkheartState& state,
                                            const ProblemInstance& instance,
                                            const NoiseSpec& noise,
                                            const MethodConfig& config,
                                            uint64_t master_seed, uint64_t iteration);

// Iterates the chosen step function, accumulates virtual time (including the
// m4 warm start) and stops at the first satisfied criterion. A non-finite or
// astronomically large iterate ends the run with status `diverged`, keeping
// the last finite rows.
RunTrace run_method(const std::string& method, const ProblemInstance& instance,
                    const ClusterProfile& cluster, const NoiseSpec& noise,
                    const MethodConfig& config, const StoppingRule& stopping,
                    uint64_t master_seed, int64_t trace_every = 1);

}  // namespace csgd
