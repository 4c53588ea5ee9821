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
#include "csgd/selection.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace csgd {

namespace {

SubsetEvaluation evaluate_sorted(const ClusterProfile& cluster, std::vector<int> subset,
                                 const SelectionConstants& c,
                                 std::map<std::vector<int>, EquilibriumResult>* memo) {
  std::vector<WorkerProfile> members;
  members.reserve(subset.size());
  double m_max = 0.0;
  double kappa_max = 0.0;
  for (int i : subset) {
    const auto& w = cluster.workers[i];
    members.push_back(w);
    m_max = std::max(m_max, w.max_cost());
    kappa_max = std::max(kappa_max, w.kappa);
  }
  EquilibriumResult eq;
  if (memo != nullptr) {
    auto it = memo->find(subset);
    if (it != memo->end()) {
      eq = it->second;
    } else {
      eq = equilibrium_solve(members, c.omega, c.omega_s, c.sigma_sq_full, c.epsilon, c.d);
      memo->emplace(subset, eq);
    }
  } else {
    eq = equilibrium_solve(members, c.omega, c.omega_s, c.sigma_sq_full, c.epsilon, c.d);
  }
  SubsetEvaluation ev;
  ev.subset = std::move(subset);
  ev.s_star = eq.free_system ? 0.0 : eq.s_star;
  ev.kappa_max = kappa_max;
  ev.t_of_s = std::max(m_max, ev.s_star);
  ev.objective = std::max(ev.t_of_s * c.L_max, c.d * kappa_max * c.L_A);
  return ev;
}

}  // namespace

SubsetEvaluation evaluate_subset(const ClusterProfile& cluster,
                                 const std::vector<int>& subset,
                                 const SelectionConstants& constants) {
  if (subset.empty()) throw std::invalid_argument("selection: subset must be nonempty");
  std::vector<int> sorted = subset;
  std::sort(sorted.begin(), sorted.end());
  for (int i : sorted) {
    if (i < 0 || i >= cluster.n()) throw std::invalid_argument("selection: worker index out of range");
  }
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("selection: subset has repeated indices");
  }
  return evaluate_sorted(cluster, std::move(sorted), constants, nullptr);
}

SubsetEvaluation select_optimal_subset(const ClusterProfile& cluster,
                                       const SelectionConstants& constants) {
  const int n = cluster.n();
  std::vector<int> by_kappa(n);
  for (int i = 0; i < n; ++i) by_kappa[i] = i;
  std::sort(by_kappa.begin(), by_kappa.end(), [&](int a, int b) {
    if (cluster.workers[a].kappa != cluster.workers[b].kappa) {
      return cluster.workers[a].kappa < cluster.workers[b].kappa;
    }
    return a < b;
  });

  std::map<std::vector<int>, EquilibriumResult> memo;
  SubsetEvaluation best;
  bool have_best = false;
  std::vector<int> prefix;
  for (int k = 1; k <= n; ++k) {
    prefix.assign(by_kappa.begin(), by_kappa.begin() + k);
    std::sort(prefix.begin(), prefix.end(), [&](int a, int b) {
      const double ma = cluster.max_cost(a);
      const double mb = cluster.max_cost(b);
      if (ma != mb) return ma < mb;
      return a < b;
    });
    for (int m = 1; m <= k; ++m) {
      std::vector<int> candidate(prefix.begin(), prefix.begin() + m);
      std::sort(candidate.begin(), candidate.end());
      SubsetEvaluation ev = evaluate_sorted(cluster, std::move(candidate), constants, &memo);
      if (!have_best || ev.objective < best.objective) {
        best = std::move(ev);
        have_best = true;
      }
    }
  }
  return best;
}

SubsetEvaluation brute_force_subset(const ClusterProfile& cluster,
                                    const SelectionConstants& constants) {
  const int n = cluster.n();
  if (n > 16) throw std::invalid_argument("brute_force_subset: limited to n <= 16");
  SubsetEvaluation best;
  bool have_best = false;
  for (uint32_t mask = 1; mask < (1u << n); ++mask) {
    std::vector<int> subset;
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) subset.push_back(i);
    }
    SubsetEvaluation ev = evaluate_sorted(cluster, std::move(subset), constants, nullptr);
    if (!have_best || ev.objective < best.objective) {
      best = std::move(ev);
      have_best = true;
    }
  }
  return best;
}

}  // namespace csgd
