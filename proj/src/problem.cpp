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
#include "csgd/problem.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace csgd {

namespace {
double truncated_unit_normal(double mean, double std, Rng& rng) {
  // Rejection sampling against the [0.1, 2] window.
  for (;;) {
    const double v = mean + std * rng.normal();
    if (v >= 0.1 && v <= 2.0) return v;
  }
}
}  // namespace

ProblemInstance ProblemInstance::block_quadratic(int d, double lambda, int n) {
  if (d < 2 || d % 2 != 0) throw std::invalid_argument("block_quadratic: d must be a positive even integer");
  if (lambda <= 0.0 || lambda > 1.0) throw std::invalid_argument("block_quadratic: lambda must be in (0, 1]");
  if (n < 1) throw std::invalid_argument("block_quadratic: n must be >= 1");
  ProblemInstance p;
  p.family_ = "block_quadratic";
  p.d_ = d;
  p.n_ = n;
  p.lambda_ = lambda;
  p.scale_std_ = 0.0;
  p.seed_ = 0;
  p.xi_.assign(n, 1.0);
  p.finalize();
  return p;
}

ProblemInstance ProblemInstance::hetero_quadratic(int d, double lambda,
                                                  double scale_std, int n,
                                                  uint64_t seed) {
  if (d < 2 || d % 2 != 0) throw std::invalid_argument("hetero_quadratic: d must be a positive even integer");
  if (lambda <= 0.0 || lambda > 1.0) throw std::invalid_argument("hetero_quadratic: lambda must be in (0, 1]");
  if (n < 1) throw std::invalid_argument("hetero_quadratic: n must be >= 1");
  if (scale_std < 0.0) throw std::invalid_argument("hetero_quadratic: scale_std must be >= 0");
  ProblemInstance p;
  p.family_ = "hetero_quadratic";
  p.d_ = d;
  p.n_ = n;
  p.lambda_ = lambda;
  p.scale_std_ = scale_std;
  p.seed_ = seed;
  p.xi_.assign(n, 1.0);
  if (scale_std > 0.0) {
    Rng rng = make_stream(seed, 0, StreamRole::kProblemGen, 0);
    for (int i = 0; i < n; ++i) p.xi_[i] = truncated_unit_normal(1.0, scale_std, rng);
  }
  p.finalize();
  return p;
}

void ProblemInstance::finalize() {
  diag_.resize(d_);
  for (int j = 0; j < d_; ++j) diag_[j] = (j < d_ / 2) ? 1.0 : lambda_;

  double sum = 0.0;
  for (double v : xi_) sum += v;
  xi_mean_ = sum / n_;

  const double diag_max = 1.0;  // lambda <= 1 by construction
  constants_.L = xi_mean_ * diag_max;
  double max_dev = 0.0;
  double max_xi = 0.0;
  double sum_sq = 0.0;
  for (double v : xi_) {
    max_dev = std::max(max_dev, std::abs(v - xi_mean_));
    max_xi = std::max(max_xi, v);
    sum_sq += v * v;
  }
  // Shared Hessian: the dispersion constant vanishes and L_B = ||mean H|| is
  // exact. With distinct scales the split
  //   mean_i H_i u_i = Hbar ubar + mean_i (H_i - Hbar) u_i
  // needs Young's inequality, so both constants carry a sqrt(2) factor
  // (a plain triangle bound leaves a cross term that random (x, u) violate).
  if (max_dev == 0.0) {
    constants_.L_A = 0.0;
    constants_.L_B = xi_mean_ * diag_max;
  } else {
    const double rt2 = std::sqrt(2.0);
    constants_.L_A = rt2 * max_dev * diag_max;
    constants_.L_B = rt2 * xi_mean_ * diag_max;
  }
  constants_.L_hat_sq = sum_sq * diag_max * diag_max / n_;
  constants_.L_max = std::max({max_xi * diag_max, constants_.L_A, constants_.L_B});

  x0_.assign(d_, 10.0 / std::sqrt(static_cast<double>(d_)));
  delta_ = f_value(x0_) - f_star();

  // Smoothness sanity at the configured start: ||grad f(x0)||^2 <= 2 L Delta
  // and L <= sqrt(L_A^2 + L_B^2). Both are exact for this family.
  const double g0 = grad_norm_sq(x0_);
  if (g0 > 2.0 * constants_.L * delta_ * (1.0 + 1e-12)) {
    throw std::logic_error("problem: initial gradient bound violated");
  }
  const double lab = std::sqrt(constants_.L_A * constants_.L_A + constants_.L_B * constants_.L_B);
  if (constants_.L > lab * (1.0 + 1e-12)) {
    throw std::logic_error("problem: smoothness exceeds sqrt(L_A^2 + L_B^2)");
  }
}

double ProblemInstance::f_value(const std::vector<double>& x) const {
  if (static_cast<int>(x.size()) != d_) throw std::invalid_argument("f_value: dimension mismatch");
  double acc = 0.0;
  for (int j = 0; j < d_; ++j) acc += diag_[j] * x[j] * x[j];
  return 0.5 * xi_mean_ * acc;
}

double ProblemInstance::grad_norm_sq(const std::vector<double>& x) const {
  if (static_cast<int>(x.size()) != d_) throw std::invalid_argument("grad_norm_sq: dimension mismatch");
  double acc = 0.0;
  for (int j = 0; j < d_; ++j) {
    const double g = xi_mean_ * diag_[j] * x[j];
    acc += g * g;
  }
  return acc;
}

std::vector<double> ProblemInstance::grad(int worker, const std::vector<double>& x) const {
  std::vector<double> out(d_);
  grad_into(worker, x, out.data());
  return out;
}

void ProblemInstance::grad_into(int worker, const std::vector<double>& x, double* out) const {
  if (static_cast<int>(x.size()) != d_) throw std::invalid_argument("grad: dimension mismatch");
  if (worker < 0 || worker >= n_) throw std::invalid_argument("grad: worker index out of range");
  const double s = xi_[worker];
  for (int j = 0; j < d_; ++j) out[j] = s * diag_[j] * x[j];
}

std::vector<double> ProblemInstance::stoch_grad(int worker, const std::vector<double>& x,
                                                const NoiseSpec& noise, Rng& rng) const {
  std::vector<double> out = grad(worker, x);
  if (noise.sigma > 0.0) {
    for (int j = 0; j < d_; ++j) out[j] += noise.sigma * rng.normal();
  }
  return out;
}

void ProblemInstance::stoch_grad_batch_sum(int worker, const std::vector<double>& x,
                                           int64_t batch, const NoiseSpec& noise,
                                           Rng& rng, std::vector<double>& out) const {
  if (batch < 1) throw std::invalid_argument("stoch_grad_batch_sum: batch must be >= 1");
  out.resize(d_);
  grad_into(worker, x, out.data());
  const double b = static_cast<double>(batch);
  for (int j = 0; j < d_; ++j) out[j] *= b;
  if (noise.sigma > 0.0) {
    for (int64_t r = 0; r < batch; ++r) {
      for (int j = 0; j < d_; ++j) out[j] += noise.sigma * rng.normal();
    }
  }
}

double ProblemInstance::stoch_grad_batch_sum_coord(int worker, double x_j, int j,
                                                   int64_t batch, const NoiseSpec& noise,
                                                   uint64_t noise_stream) const {
  double s = static_cast<double>(batch) * grad_coord(worker, x_j, j);
  if (noise.sigma > 0.0) {
    for (int64_t r = 0; r < batch; ++r) {
      s += noise.sigma * normal_at(noise_stream, static_cast<uint64_t>(j),
                                   static_cast<uint64_t>(r));
    }
  }
  return s;
}

std::string ProblemInstance::to_json() const {
  nlohmann::json j;
  j["family"] = family_;
  j["d"] = d_;
  j["lambda"] = lambda_;
  j["scale_std"] = scale_std_;
  j["n"] = n_;
  j["seed"] = seed_;
  j["xi"] = xi_;
  j["x0"] = x0_;
  return j.dump(2);
}

ProblemInstance ProblemInstance::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  ProblemInstance p;
  p.family_ = j.at("family").get<std::string>();
  p.d_ = j.at("d").get<int>();
  p.lambda_ = j.at("lambda").get<double>();
  p.scale_std_ = j.at("scale_std").get<double>();
  p.n_ = j.at("n").get<int>();
  p.seed_ = j.at("seed").get<uint64_t>();
  p.xi_ = j.at("xi").get<std::vector<double>>();
  if (static_cast<int>(p.xi_.size()) != p.n_) {
    throw std::invalid_argument("problem json: xi length must equal n");
  }
  p.finalize();
  if (j.contains("x0")) p.x0_ = j.at("x0").get<std::vector<double>>();
  return p;
}

}  // namespace csgd
