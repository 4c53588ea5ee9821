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
#include "csgd/time_model.hpp"

#include <algorithm>
#include <stdexcept>

namespace csgd {

double WorkerProfile::max_cost() const { return std::max({h, tau, kappa}); }

ClusterProfile::ClusterProfile(std::vector<WorkerProfile> w) : workers(std::move(w)) {
  if (workers.empty()) throw std::invalid_argument("cluster: needs at least one worker");
  for (const auto& p : workers) {
    if (p.h < 0 || p.tau < 0 || p.kappa < 0) {
      throw std::invalid_argument("cluster: costs must be nonnegative");
    }
  }
}

double ClusterProfile::kappa_max() const {
  double v = 0.0;
  for (const auto& w : workers) v = std::max(v, w.kappa);
  return v;
}

double ClusterProfile::tau_max() const {
  double v = 0.0;
  for (const auto& w : workers) v = std::max(v, w.tau);
  return v;
}

double ClusterProfile::overall_max_cost() const {
  double v = 0.0;
  for (const auto& w : workers) v = std::max(v, w.max_cost());
  return v;
}

bool ClusterProfile::homogeneous() const {
  for (const auto& w : workers) {
    if (w.h != workers[0].h || w.tau != workers[0].tau || w.kappa != workers[0].kappa) {
      return false;
    }
  }
  return true;
}

ClusterProfile ClusterProfile::homogeneous_cluster(int n, double h, double tau, double kappa) {
  if (n < 1) throw std::invalid_argument("cluster: n must be >= 1");
  return ClusterProfile(std::vector<WorkerProfile>(n, WorkerProfile{h, tau, kappa}));
}

double inkheart_iteration_time(const ClusterProfile& cluster,
                               const std::vector<int64_t>& b,
                               const std::vector<int64_t>& m,
                               const std::vector<int64_t>& l,
                               bool broadcast_full, int d, int k_up, int k_down) {
  const int n = cluster.n();
  if (static_cast<int>(b.size()) != n || static_cast<int>(m.size()) != n ||
      static_cast<int>(l.size()) != n) {
    throw std::invalid_argument("iteration time: per-worker counts must have length n");
  }
  double worker_phase = 0.0;
  for (int i = 0; i < n; ++i) {
    if (b[i] < 1 || m[i] < 1 || l[i] < 1) {
      throw std::invalid_argument("iteration time: counts must be >= 1");
    }
    const auto& w = cluster.workers[i];
    worker_phase = std::max(worker_phase, b[i] * w.h + m[i] * static_cast<double>(k_up) * w.tau);
  }
  double server_phase = 0.0;
  if (broadcast_full) {
    server_phase = static_cast<double>(d) * cluster.kappa_max();
  } else {
    for (int i = 0; i < n; ++i) {
      server_phase = std::max(server_phase,
                              l[i] * static_cast<double>(k_down) * cluster.workers[i].kappa);
    }
  }
  return worker_phase + server_phase;
}

double m4_iteration_time(const ClusterProfile& cluster, int64_t b, int k_up,
                         int k_down, bool downlink_full, bool uplink_full, int d) {
  if (b < 1 || k_up < 1 || k_down < 1) {
    throw std::invalid_argument("iteration time: counts must be >= 1");
  }
  double compute = 0.0;
  for (const auto& w : cluster.workers) compute = std::max(compute, b * w.h);
  const double down =
      (downlink_full ? static_cast<double>(d) : static_cast<double>(k_down)) * cluster.kappa_max();
  const double up =
      (uplink_full ? static_cast<double>(d) : static_cast<double>(k_up)) * cluster.tau_max();
  return compute + down + up;
}

}  // namespace csgd
