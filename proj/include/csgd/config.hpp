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
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "csgd/problem.hpp"
#include "csgd/time_model.hpp"
#include "csgd/trace.hpp"
#include "csgd/tuner.hpp"

namespace csgd {

// Configuration problems (parse errors, unknown keys, bad values) carry the
// offending field path in the message.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct ProblemSpecConfig {
  std::string family = "block_quadratic";  // or hetero_quadratic
  int d = 2;
  double lambda = 1.0;
  double scale_std = 0.0;
  int n = 1;
  uint64_t seed = 0;
};

struct ClusterSpecConfig {
  // Scalars replicate across workers; vectors must have length n.
  std::vector<double> h{0.0};
  std::vector<double> tau{0.0};
  std::vector<double> kappa{0.0};
};

struct MethodSpecConfig {
  std::string name;            // sync_sgd | inkheart | inkheart_heter | m4
  std::string mode = "grid";   // grid | theorem
  int64_t batch = 1;           // grid-mode minibatch
  std::vector<double> gamma_grid;
  std::vector<int> k_grid;       // sparsifier sizes (grid mode)
  std::vector<double> eta_grid;  // m4 momentum values (grid mode)
  TunerCaps caps;                // theorem-mode zero-cost count caps
};

struct SelectionSpecConfig {
  double epsilon = 1e-3;
  int k_up = 1;
  int k_down = 1;
};

struct ExperimentConfig {
  ProblemSpecConfig problem;
  ClusterSpecConfig cluster;
  double sigma = 0.0;
  StoppingRule stopping;
  std::vector<uint64_t> seeds{1};
  int64_t trace_every = 1;
  std::string output_dir = "out";
  int parallelism = 1;
  std::vector<MethodSpecConfig> methods;
  std::optional<SelectionSpecConfig> selection;

  ProblemInstance build_instance() const;
  ClusterProfile build_cluster() const;
  std::string to_json() const;  // resolved echo, defaults filled
};

ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& json_text);

}  // namespace csgd
