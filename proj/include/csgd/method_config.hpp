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
#include <limits>
#include <string>
#include <vector>

namespace csgd {

// Resolved hyperparameters of one method run. Count fields hold either one
// shared value or one value per worker.
struct MethodConfig {
  std::string method;  // sync_sgd | inkheart | inkheart_heter | m4
  std::string tuning_mode = "manual";  // theorem | grid | manual

  double gamma = 0.0;
  std::vector<int64_t> b{1};
  std::vector<int64_t> m{1};
  std::vector<int64_t> l{1};
  double p = 1.0;
  double p_s = 1.0;    // m4 only
  double eta = 1.0;    // m4 only, shared by both momentum parameters
  int64_t b_init = 1;  // m4 only
  std::vector<double> beta;  // empty means uniform 1/n
  int k_up = 1;
  int k_down = 1;
  double time_budget = 0.0;
  double s_star = std::numeric_limits<double>::quiet_NaN();

  int64_t b_of(int i) const { return b.size() == 1 ? b[0] : b[i]; }
  int64_t m_of(int i) const { return m.size() == 1 ? m[0] : m[i]; }
  int64_t l_of(int i) const { return l.size() == 1 ? l[0] : l[i]; }
  double beta_of(int i, int n) const { return beta.empty() ? 1.0 / n : beta[i]; }

  std::vector<int64_t> b_vector(int n) const {
    return b.size() == 1 ? std::vector<int64_t>(n, b[0]) : b;
  }
  std::vector<int64_t> m_vector(int n) const {
    return m.size() == 1 ? std::vector<int64_t>(n, m[0]) : m;
  }
  std::vector<int64_t> l_vector(int n) const {
    return l.size() == 1 ? std::vector<int64_t>(n, l[0]) : l;
  }

  double omega_up(int d) const { return static_cast<double>(d) / k_up - 1.0; }
  double omega_down(int d) const { return static_cast<double>(d) / k_down - 1.0; }
};

}  // namespace csgd
