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
#include <cmath>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "csgd/rng.hpp"
#include "csgd/time_model.hpp"

using namespace csgd;

TEST_CASE("single unit of each phase") {
  const auto cluster = ClusterProfile::homogeneous_cluster(4, 0.5, 0.25, 0.125);
  const std::vector<int64_t> ones(4, 1);
  CHECK(inkheart_iteration_time(cluster, ones, ones, ones, false, 10, 1, 1) ==
        doctest::Approx(0.5 + 0.25 + 0.125));
}

TEST_CASE("budgeted counts fill the phases") {
  const int d = 300;
  const auto cluster = ClusterProfile::homogeneous_cluster(3, 0.0, 1.0 / d, 1.0 / d);
  const std::vector<int64_t> b(3, 1), md(3, d), ld(3, d);
  CHECK(inkheart_iteration_time(cluster, b, md, ld, false, d, 1, 1) == doctest::Approx(2.0));
}

TEST_CASE("full broadcast bills d coordinates at the slowest downlink") {
  const int d = 300;
  const auto cluster = ClusterProfile::homogeneous_cluster(2, 0.0, 0.0, 1.0 / d);
  const std::vector<int64_t> ones(2, 1);
  for (int64_t l : {1, 5, 300}) {
    const std::vector<int64_t> ls(2, l);
    CHECK(inkheart_iteration_time(cluster, ones, ones, ls, true, d, 1, 1) ==
          doctest::Approx(1.0));
  }
}

TEST_CASE("momentum method phase accounting") {
  SUBCASE("both directions compressed") {
    const auto cluster = ClusterProfile::homogeneous_cluster(5, 0.3, 0.2, 0.1);
    CHECK(m4_iteration_time(cluster, 1, 1, 1, false, false, 300) ==
          doctest::Approx(0.3 + 0.2 + 0.1));
  }
  SUBCASE("both directions full") {
    const int d = 300;
    const auto cluster = ClusterProfile::homogeneous_cluster(5, 0.3, 1.0 / d, 1.0 / d);
    CHECK(m4_iteration_time(cluster, 1, 10, 10, true, true, d) == doctest::Approx(0.3 + 2.0));
  }
}

TEST_CASE("iteration time is monotone in every cost") {
  Rng rng(404);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(6));
    std::vector<WorkerProfile> workers(n);
    for (auto& w : workers) {
      w.h = rng.uniform01();
      w.tau = rng.uniform01();
      w.kappa = rng.uniform01();
    }
    ClusterProfile cluster(workers);
    std::vector<int64_t> b(n), m(n), l(n);
    for (int i = 0; i < n; ++i) {
      b[i] = 1 + static_cast<int64_t>(rng.below(4));
      m[i] = 1 + static_cast<int64_t>(rng.below(4));
      l[i] = 1 + static_cast<int64_t>(rng.below(4));
    }
    const bool full = rng.bernoulli(0.5);
    const int d = 16;
    const double base = inkheart_iteration_time(cluster, b, m, l, full, d, 2, 3);
    const double base_m4 = m4_iteration_time(cluster, b[0], 2, 3, full, !full, d);

    const int which = static_cast<int>(rng.below(n));
    for (int field = 0; field < 3; ++field) {
      ClusterProfile bumped = cluster;
      auto& w = bumped.workers[which];
      (field == 0 ? w.h : field == 1 ? w.tau : w.kappa) += 0.75;
      CHECK(inkheart_iteration_time(bumped, b, m, l, full, d, 2, 3) >= base);
      CHECK(m4_iteration_time(bumped, b[0], 2, 3, full, !full, d) >= base_m4);
    }
  }
}

TEST_CASE("count contracts") {
  const auto cluster = ClusterProfile::homogeneous_cluster(2, 1, 1, 1);
  const std::vector<int64_t> ones(2, 1), zero{0, 1};
  CHECK_THROWS_AS(inkheart_iteration_time(cluster, zero, ones, ones, false, 4, 1, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(m4_iteration_time(cluster, 0, 1, 1, false, false, 4), std::invalid_argument);
  CHECK_THROWS_AS(ClusterProfile(std::vector<WorkerProfile>{}), std::invalid_argument);
  CHECK_THROWS_AS(ClusterProfile(std::vector<WorkerProfile>{WorkerProfile{-1, 0, 0}}),
                  std::invalid_argument);
}

TEST_CASE("compensated accumulation") {
  CompensatedSum acc;
  const double tiny = 1e-17;
  acc.add(1.0);
  for (int i = 0; i < 100000; ++i) acc.add(tiny);
  CHECK(acc.value() == doctest::Approx(1.0 + 1e-12).epsilon(1e-12));
  CHECK(acc.value() > 1.0);  // plain summation would lose every term
}

TEST_CASE("normal sampler moments and tail mass") {
  Rng rng(20260809);
  const int n = 2000000;
  double m1 = 0, m2 = 0, m3 = 0, m4 = 0;
  long in1 = 0, in2 = 0, in3 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    m1 += z;
    m2 += z * z;
    m3 += z * z * z;
    m4 += z * z * z * z;
    const double a = std::abs(z);
    in1 += a < 1.0;
    in2 += a < 2.0;
    in3 += a < 3.0;
  }
  m1 /= n; m2 /= n; m3 /= n; m4 /= n;
  CHECK(std::abs(m1) < 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(m2 == doctest::Approx(1.0).epsilon(0.005));
  CHECK(std::abs(m3) < 0.02);
  CHECK(m4 == doctest::Approx(3.0).epsilon(0.02));
  CHECK(static_cast<double>(in1) / n == doctest::Approx(0.682689).epsilon(0.004));
  CHECK(static_cast<double>(in2) / n == doctest::Approx(0.954500).epsilon(0.002));
  CHECK(static_cast<double>(in3) / n == doctest::Approx(0.997300).epsilon(0.001));
}

TEST_CASE("random-access normals are order-free and standard") {
  const uint64_t stream = stream_seed(7, 3, StreamRole::kGradNoise, 11);
  CHECK(normal_at(stream, 5, 2) == normal_at(stream, 5, 2));
  CHECK(normal_at(stream, 5, 2) != normal_at(stream, 5, 3));
  double m1 = 0, m2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = normal_at(stream, i, 0);
    m1 += z;
    m2 += z * z;
  }
  m1 /= n; m2 /= n;
  CHECK(std::abs(m1) < 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(m2 == doctest::Approx(1.0).epsilon(0.01));
}
