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
#include <vector>

namespace csgd {

// Per-coordinate billing only: h seconds per stochastic gradient, tau per
// uplink coordinate, kappa per downlink coordinate. No per-message latency.
struct WorkerProfile {
  double h = 0.0;
  double tau = 0.0;
  double kappa = 0.0;
  double max_cost() const;  // max{h, tau, kappa}
};

struct ClusterProfile {
  explicit ClusterProfile(std::vector<WorkerProfile> w);

  int n() const { return static_cast<int>(workers.size()); }
  double max_cost(int i) const { return workers[i].max_cost(); }
  double kappa_max() const;
  double tau_max() const;
  double overall_max_cost() const;  // max_i max{h_i, tau_i, kappa_i}
  bool homogeneous() const;

  static ClusterProfile homogeneous_cluster(int n, double h, double tau, double kappa);

  std::vector<WorkerProfile> workers;
};

// One round: every worker computes b_i gradients and uploads m_i messages of
// k_up coordinates (pipelined per worker, parallel across workers), then the
// server phase runs. Full broadcast waits for the slowest downlink; otherwise
// worker i receives l_i messages of k_down coordinates in parallel.
double inkheart_iteration_time(const ClusterProfile& cluster,
                               const std::vector<int64_t>& b,
                               const std::vector<int64_t>& m,
                               const std::vector<int64_t>& l,
                               bool broadcast_full, int d, int k_up, int k_down);

// One round of the momentum method: compute phase (b gradients), downlink
// phase (full model or k_down coordinates), uplink phase (full estimator
// or k_up coordinates). Phases sequential, workers parallel within a phase.
double m4_iteration_time(const ClusterProfile& cluster, int64_t b, int k_up,
                         int k_down, bool downlink_full, bool uplink_full, int d);

}  // namespace csgd
