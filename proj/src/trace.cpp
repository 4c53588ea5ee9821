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
#include "csgd/trace.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace csgd {

const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::kReachedThreshold: return "reached_threshold";
    case RunStatus::kBudgetExhausted: return "budget_exhausted";
    case RunStatus::kDiverged: return "diverged";
  }
  return "unknown";
}

bool StoppingRule::threshold_satisfied(double grad_norm_sq, double f_gap) const {
  if (!std::isnan(grad_norm_sq_eps) && grad_norm_sq <= grad_norm_sq_eps) return true;
  if (!std::isnan(f_gap_threshold) && f_gap <= f_gap_threshold) return true;
  return false;
}

void write_trace_csv(const RunTrace& trace, std::ostream& os) {
  os << "iter,time_s,grad_norm_sq,f_gap,up_coords,down_coords\n";
  char buf[256];
  for (const auto& r : trace.rows) {
    std::snprintf(buf, sizeof(buf), "%lld,%.17g,%.17g,%.17g,%llu,%llu\n",
                  static_cast<long long>(r.iter), r.time_s, r.grad_norm_sq, r.f_gap,
                  static_cast<unsigned long long>(r.up_coords),
                  static_cast<unsigned long long>(r.down_coords));
    os << buf;
  }
}

std::string trace_to_csv(const RunTrace& trace) {
  std::ostringstream os;
  write_trace_csv(trace, os);
  return os.str();
}

}  // namespace csgd
