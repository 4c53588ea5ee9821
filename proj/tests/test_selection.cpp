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
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "csgd/rng.hpp"
#include "csgd/selection.hpp"

using namespace csgd;

namespace {

SelectionConstants default_constants(int d, double L_A) {
  SelectionConstants c;
  c.d = d;
  c.omega = d - 1.0;
  c.omega_s = d - 1.0;
  c.sigma_sq_full = 0.05;
  c.epsilon = 1e-3;
  c.L_max = 1.0;
  c.L_A = L_A;
  return c;
}

ClusterProfile random_cluster(Rng& rng, int n) {
  std::vector<WorkerProfile> w(n);
  for (auto& p : w) {
    p.h = std::pow(10.0, -2.0 + 3.0 * rng.uniform01());
    p.tau = std::pow(10.0, -2.0 + 3.0 * rng.uniform01());
    p.kappa = std::pow(10.0, -2.0 + 3.0 * rng.uniform01());
  }
  return ClusterProfile(std::move(w));
}

}  // namespace

TEST_CASE("subset evaluation formula") {
  const auto constants = default_constants(8, 0.2);
  ClusterProfile cluster({{0.5, 0.1, 0.3}, {0.2, 0.4, 0.1}, {1.0, 1.0, 1.0}});

  SUBCASE("singleton instantiates the definition") {
    const auto ev = evaluate_subset(cluster, {1}, constants);
    const auto eq = equilibrium_solve({cluster.workers[1]}, constants.omega, constants.omega_s,
                                      constants.sigma_sq_full, constants.epsilon, constants.d);
    CHECK(ev.t_of_s == doctest::Approx(std::max(0.4, eq.s_star)));
    CHECK(ev.kappa_max == doctest::Approx(0.1));
    CHECK(ev.objective ==
          doctest::Approx(std::max(ev.t_of_s * constants.L_max,
                                   constants.d * 0.1 * constants.L_A)));
  }
  SUBCASE("full set matches the cluster-level balance solve") {
    const auto ev = evaluate_subset(cluster, {0, 1, 2}, constants);
    const auto eq = equilibrium_solve(cluster.workers, constants.omega, constants.omega_s,
                                      constants.sigma_sq_full, constants.epsilon, constants.d);
    CHECK(ev.s_star == doctest::Approx(eq.s_star));
    CHECK(ev.t_of_s == doctest::Approx(std::max(1.0, eq.s_star)));
  }
  SUBCASE("contracts") {
    const std::vector<int> empty;
    CHECK_THROWS_AS(evaluate_subset(cluster, empty, constants), std::invalid_argument);
    const std::vector<int> out_of_range{3};
    CHECK_THROWS_AS(evaluate_subset(cluster, out_of_range, constants), std::invalid_argument);
    const std::vector<int> repeated{1, 1};
    CHECK_THROWS_AS(evaluate_subset(cluster, repeated, constants), std::invalid_argument);
  }
}

TEST_CASE("dropping a slow-downlink worker can win") {
  // Two fast workers plus one with a huge downlink cost. With L_A > 0 the
  // broadcast term d * kappa_max * L_A dominates once the slow worker joins.
  const auto constants = default_constants(16, 0.5);
  ClusterProfile cluster({{0.1, 0.1, 0.1}, {0.1, 0.1, 0.12}, {0.1, 0.1, 50.0}});
  const auto with_slow = evaluate_subset(cluster, {0, 1, 2}, constants);
  const auto without_slow = evaluate_subset(cluster, {0, 1}, constants);
  CHECK(without_slow.objective < with_slow.objective);
  const auto best = select_optimal_subset(cluster, constants);
  CHECK(best.subset == std::vector<int>{0, 1});
}

TEST_CASE("single worker cluster") {
  const auto constants = default_constants(4, 0.0);
  ClusterProfile cluster({{0.3, 0.2, 0.1}});
  const auto best = select_optimal_subset(cluster, constants);
  CHECK(best.subset == std::vector<int>{0});
}

TEST_CASE("identical workers keep the whole cluster") {
  const auto constants = default_constants(6, 0.1);
  const auto cluster = ClusterProfile::homogeneous_cluster(5, 0.2, 0.3, 0.4);
  const auto best = select_optimal_subset(cluster, constants);
  const auto all = evaluate_subset(cluster, {0, 1, 2, 3, 4}, constants);
  CHECK(best.objective <= all.objective * (1 + 1e-12));
  CHECK(best.objective == doctest::Approx(all.objective).epsilon(1e-9));
}

TEST_CASE("search equals brute force on random instances") {
  Rng rng(314);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(7));  // up to 8
    const auto cluster = random_cluster(rng, n);
    // exercise the degenerate and the broadcast-dominated corners too
    const double la = (trial % 3 == 0) ? 0.0 : ((trial % 3 == 1) ? 0.3 : 10.0);
    const auto constants = default_constants(2 + static_cast<int>(rng.below(30)), la);
    const auto fast = select_optimal_subset(cluster, constants);
    const auto exact = brute_force_subset(cluster, constants);
    CHECK(fast.objective == doctest::Approx(exact.objective).epsilon(1e-9));
  }
}

TEST_CASE("fast worker never hurts") {
  Rng rng(2025);
  int checked = 0;
  while (checked < 200) {
    const int n = 3 + static_cast<int>(rng.below(6));
    const auto cluster = random_cluster(rng, n);
    const auto constants = default_constants(8, rng.uniform01());
    // random nonempty subset and candidate outside it
    std::vector<int> s;
    for (int i = 0; i < n; ++i) {
      if (rng.bernoulli(0.5)) s.push_back(i);
    }
    if (s.empty() || static_cast<int>(s.size()) == n) continue;
    std::vector<int> outside;
    for (int i = 0; i < n; ++i) {
      if (std::find(s.begin(), s.end(), i) == s.end()) outside.push_back(i);
    }
    const int j = outside[rng.below(outside.size())];
    double m_max = 0, k_max = 0;
    for (int i : s) {
      m_max = std::max(m_max, cluster.max_cost(i));
      k_max = std::max(k_max, cluster.workers[i].kappa);
    }
    if (cluster.max_cost(j) > m_max || cluster.workers[j].kappa > k_max) continue;

    const auto before = evaluate_subset(cluster, s, constants);
    auto s_plus = s;
    s_plus.push_back(j);
    const auto after = evaluate_subset(cluster, s_plus, constants);
    CHECK(after.objective <= before.objective * (1 + 1e-9) + 1e-12);
    // the balance root itself shrinks when kappa_max is unchanged
    CHECK(after.s_star <= before.s_star * (1 + 1e-9) + 1e-12);
    ++checked;
  }
}

TEST_CASE("brute force guard") {
  const auto constants = default_constants(4, 0.0);
  const auto cluster = ClusterProfile::homogeneous_cluster(17, 1, 1, 1);
  CHECK_THROWS_AS(brute_force_subset(cluster, constants), std::invalid_argument);
}
