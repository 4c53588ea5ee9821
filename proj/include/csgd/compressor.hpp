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
#include <vector>

#include "csgd/rng.hpp"

namespace csgd {

// Rand-K sparsifier: keeps K of d coordinates uniformly without replacement,
// rescales them by d/K. Unbiased with variance factor omega = d/K - 1.
struct CompressorSpec {
  CompressorSpec(int dimension, int keep_count);

  double omega() const { return static_cast<double>(d) / k - 1.0; }
  double scale() const { return static_cast<double>(d) / k; }
  bool is_identity() const { return k == d; }

  int d = 1;
  int k = 1;
};

// Uniform K-subset sampler over [0, d). Partial Fisher-Yates with undo, so
// repeated draws cost O(K) instead of O(d).
class IndexSampler {
 public:
  explicit IndexSampler(int dimension);

  // Writes K distinct indices into `out` (must hold K entries).
  void sample(int k, Rng& rng, int* out);

 private:
  std::vector<int> perm_;
  std::vector<int> swaps_;
};

std::vector<double> compress_rand_k(const CompressorSpec& spec,
                                    const std::vector<double>& x, Rng& rng);

// Weighted average of independent draws, sum(weights) == 1 within 1e-12.
// The composite stays unbiased with variance factor omega * sum(weights^2).
std::vector<double> average_compress(const std::vector<double>& x,
                                     const std::vector<CompressorSpec>& specs,
                                     const std::vector<double>& weights,
                                     Rng& rng);

double omega_of(const CompressorSpec& spec);

}  // namespace csgd
