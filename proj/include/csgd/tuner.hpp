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
#include <utility>
#include <vector>

#include "csgd/method_config.hpp"
#include "csgd/problem.hpp"
#include "csgd/time_model.hpp"

namespace csgd {

// Count caps for free resources: floor(t/h) with h == 0 is read as b_max,
// floor(t/tau) as m_max, and a free downlink broadcasts the full model.
struct TunerCaps {
  int64_t b_max = 10000;
  int64_t m_max = 10000;
};

struct EquilibriumResult {
  double s_star = 0.0;
  // True when some worker has all-zero costs; the balance equation then has
  // no positive root and the system is arbitrarily fast.
  bool free_system = false;
};

// Root of the reciprocal-sum balance equation delta(s) = 1 over the given
// workers. delta is strictly decreasing, so a doubling bracket plus bisection
// pins the root to |delta(s*) - 1| <= 1e-9. Sums use compensated arithmetic.
EquilibriumResult equilibrium_solve(const std::vector<WorkerProfile>& workers,
                                    double omega, double omega_s,
                                    double sigma_sq_full, double epsilon, int d);

// Sign-change bracket for g(x) = a x^3 + b x^2 + c x - 1 with a, b, c > 0:
// returns [xbar/2, xbar] with xbar = 1 / max{a^(1/3), sqrt(b), c}, where
// g(lo) < 0 < g(hi).
std::pair<double, double> cubic_bracket(double a, double b, double c);

// Variance-optimal simplex weights for per-worker message/batch counts.
// Degenerate all-zero reciprocals (identity compressors, no noise) fall back
// to uniform weights.
std::vector<double> inkheart_weights(const std::vector<int64_t>& b,
                                     const std::vector<int64_t>& m,
                                     const std::vector<int64_t>& l, double omega,
                                     double omega_s, double sigma_sq_full,
                                     double epsilon, double p);

// Sufficient step-size bound from the scalar inequality
// 1/(2 gamma) - c - sum_i d_i gamma > 0: true iff
// 0 < gamma <= 1 / ((k+1) max{2c, sqrt(2 d_1), ..., sqrt(2 d_k)}) for k >= 1,
// and gamma <= 1/(4c) when there are no quadratic coefficients.
bool gamma_floor_check(double gamma, double c, const std::vector<double>& quad_coeffs);

// Homogeneous schedule with Rand-1 compressors: time budget, counts,
// broadcast probability, simplex weights and step size, validated against
// the convergence conditions before returning. If the formula budget leaves
// a condition unsatisfied, the budget is enlarged minimally (noted in the
// returned config).
MethodConfig inkheart_tune_homog(double h, double tau, double kappa,
                                 double sigma_sq_full, double epsilon, int n, int d,
                                 double L_max, double L_A,
                                 const TunerCaps& caps = TunerCaps{});

// Heterogeneous-cost schedule: equilibrium time, per-worker counts, optimal
// weights, step size. Same validation policy as the homogeneous variant.
MethodConfig inkheart_tune_heter(const ClusterProfile& cluster, double sigma_sq_full,
                                 double epsilon, int d, double L_max, double L_A,
                                 const TunerCaps& caps = TunerCaps{});

// Momentum-method schedule: time budget, Rand-K sizes, batch, momentum,
// refresh probabilities, warm-start batch and step size. The momentum value
// is clipped so the variance condition 9 eta^2 w s^2/(npb) + 3 eta s^2/(nb)
// <= eps/2 always holds at return.
MethodConfig m4_tune(double h, double tau, double kappa, double sigma_sq_full,
                     double epsilon, int n, int d, double L_A, double L_B,
                     double L_max, const TunerCaps& caps = TunerCaps{});

}  // namespace csgd
