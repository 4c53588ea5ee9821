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
#include <string>
#include <vector>

#include "csgd/rng.hpp"

namespace csgd {

// Additive per-coordinate Gaussian noise on gradient oracles. `sigma` is the
// per-coordinate standard deviation; the full-vector oracle variance is
// d * sigma^2, which is the quantity the parameter schedules consume.
struct NoiseSpec {
  double sigma = 0.0;
  double full_vector_variance(int d) const { return d * sigma * sigma; }
};

struct StructureConstants {
  double L = 0.0;        // smoothness of the average objective
  double L_A = 0.0;      // gradient-dispersion constant
  double L_B = 0.0;      // averaged-direction constant
  double L_max = 0.0;    // max{max_i L_i, L_A, L_B}
  double L_hat_sq = 0.0; // mean of squared per-worker smoothness
};

// Family of per-worker diagonal quadratics f_i(x) = (1/2) xi_i x'Ax with
// A = diag(1,...,1,lambda,...,lambda). Shared Hessian when all xi_i are equal.
class ProblemInstance {
 public:
  static ProblemInstance block_quadratic(int d, double lambda, int n = 1);
  // Per-worker Hessian scales xi_i ~ Normal(1, scale_std^2) truncated to
  // [0.1, 2]; the realized scales are stored so a run can be replayed.
  static ProblemInstance hetero_quadratic(int d, double lambda, double scale_std,
                                          int n, uint64_t seed);

  int dimension() const { return d_; }
  int worker_count() const { return n_; }
  const std::string& family() const { return family_; }
  double lambda() const { return lambda_; }
  double scale_std() const { return scale_std_; }
  uint64_t seed() const { return seed_; }
  const std::vector<double>& hessian_scales() const { return xi_; }
  const std::vector<double>& start_point() const { return x0_; }
  double f_star() const { return 0.0; }
  double delta() const { return delta_; }
  const StructureConstants& constants() const { return constants_; }

  double f_value(const std::vector<double>& x) const;
  double f_gap(const std::vector<double>& x) const { return f_value(x) - f_star(); }
  double grad_norm_sq(const std::vector<double>& x) const;

  std::vector<double> grad(int worker, const std::vector<double>& x) const;
  void grad_into(int worker, const std::vector<double>& x, double* out) const;
  double grad_coord(int worker, double x_j, int j) const {
    return xi_[worker] * diag_[j] * x_j;
  }

  std::vector<double> stoch_grad(int worker, const std::vector<double>& x,
                                 const NoiseSpec& noise, Rng& rng) const;

  // Sum of `batch` stochastic gradients at x, all noise drawn from `rng` in
  // sample-major order. Shared by every optimizer so coupled-seed runs agree.
  void stoch_grad_batch_sum(int worker, const std::vector<double>& x,
                            int64_t batch, const NoiseSpec& noise, Rng& rng,
                            std::vector<double>& out) const;
  // Same sum evaluated at one coordinate, with random-access noise draws.
  double stoch_grad_batch_sum_coord(int worker, double x_j, int j, int64_t batch,
                                    const NoiseSpec& noise,
                                    uint64_t noise_stream) const;

  std::string to_json() const;
  static ProblemInstance from_json(const std::string& text);

 private:
  ProblemInstance() = default;
  void finalize();

  std::string family_;
  int d_ = 0;
  int n_ = 1;
  double lambda_ = 1.0;
  double scale_std_ = 0.0;
  uint64_t seed_ = 0;
  std::vector<double> diag_;  // base Hessian diagonal
  std::vector<double> xi_;    // per-worker scale, length n
  double xi_mean_ = 1.0;
  std::vector<double> x0_;
  double delta_ = 0.0;
  StructureConstants constants_;
};

}  // namespace csgd
