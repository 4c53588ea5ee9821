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

#include <vector>

#include "csgd/time_model.hpp"
#include "csgd/tuner.hpp"

namespace csgd {

// Problem-side constants consumed by the subset objective
// T(S) = max{t(S) * L_max, d * kappa_max(S) * L_A}.
struct SelectionConstants {
  int d = 1;
  double omega = 0.0;
  double omega_s = 0.0;
  double sigma_sq_full = 0.0;
  double epsilon = 1.0;
  double L_max = 1.0;
  double L_A = 0.0;
};

struct SubsetEvaluation {
  std::vector<int> subset;  // ascending worker indices
  double t_of_s = 0.0;      // max{max_{i in S} M_i, s_star}
  double s_star = 0.0;
  double kappa_max = 0.0;
  double objective = 0.0;
};

SubsetEvaluation evaluate_subset(const ClusterProfile& cluster,
                                 const std::vector<int>& subset,
                                 const SelectionConstants& constants);

// Polynomial-time subset search: sort by kappa, re-sort each prefix by the
// per-worker bottleneck cost, evaluate every prefix of that ordering and keep
// the argmin. Sorting ties break by worker index; repeated prefixes share one
// balance-equation solve.
SubsetEvaluation select_optimal_subset(const ClusterProfile& cluster,
                                       const SelectionConstants& constants);

// Exhaustive minimum over all nonempty subsets; n <= 16 guard.
SubsetEvaluation brute_force_subset(const ClusterProfile& cluster,
                                    const SelectionConstants& constants);

}  // namespace csgd
