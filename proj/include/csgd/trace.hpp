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
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace csgd {

struct TraceRow {
  int64_t iter = 0;
  double time_s = 0.0;
  double grad_norm_sq = 0.0;
  double f_gap = 0.0;
  uint64_t up_coords = 0;    // cumulative transmitted uplink coordinates
  uint64_t down_coords = 0;  // cumulative transmitted downlink coordinates
};

enum class RunStatus { kReachedThreshold, kBudgetExhausted, kDiverged };

const char* to_string(RunStatus s);

struct RunTrace {
  std::vector<TraceRow> rows;
  RunStatus status = RunStatus::kBudgetExhausted;
  int64_t iterations = 0;
  double final_time_s = 0.0;
  double final_grad_norm_sq = 0.0;
  double final_f_gap = 0.0;
  // Virtual seconds until the stopping threshold was first satisfied;
  // +inf when the run exhausted its budget or diverged first.
  double time_to_threshold = std::numeric_limits<double>::infinity();

  bool reached() const { return status == RunStatus::kReachedThreshold; }
};

// Header `iter,time_s,grad_norm_sq,f_gap,up_coords,down_coords`; floats with
// 17 significant digits so a written trace replays exactly.
void write_trace_csv(const RunTrace& trace, std::ostream& os);
std::string trace_to_csv(const RunTrace& trace);

struct StoppingRule {
  // A run stops at the first satisfied criterion.
  double grad_norm_sq_eps = std::numeric_limits<double>::quiet_NaN();  // NaN = off
  double f_gap_threshold = std::numeric_limits<double>::quiet_NaN();   // NaN = off
  double max_virtual_time = std::numeric_limits<double>::infinity();
  int64_t max_iterations = 1000000;
  // Ends a run as diverged once the gap blows past this level; grid sweeps
  // use it to cut unstable cells long before coordinates overflow.
  double max_f_gap = std::numeric_limits<double>::infinity();

  bool threshold_satisfied(double grad_norm_sq, double f_gap) const;
};

}  // namespace csgd
