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
#include "csgd/compressor.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace csgd {

CompressorSpec::CompressorSpec(int dimension, int keep_count)
    : d(dimension), k(keep_count) {
  if (dimension < 1) throw std::invalid_argument("compressor: dimension must be >= 1");
  if (keep_count < 1 || keep_count > dimension) {
    throw std::invalid_argument("compressor: keep count must be in [1, d]");
  }
}

IndexSampler::IndexSampler(int dimension) : perm_(dimension) {
  std::iota(perm_.begin(), perm_.end(), 0);
}

void IndexSampler::sample(int k, Rng& rng, int* out) {
  const int d = static_cast<int>(perm_.size());
  swaps_.resize(k);
  for (int i = 0; i < k; ++i) {
    const int j = i + static_cast<int>(rng.below(static_cast<uint64_t>(d - i)));
    std::swap(perm_[i], perm_[j]);
    swaps_[i] = j;
    out[i] = perm_[i];
  }
  for (int i = k - 1; i >= 0; --i) std::swap(perm_[i], perm_[swaps_[i]]);
}

std::vector<double> compress_rand_k(const CompressorSpec& spec,
                                    const std::vector<double>& x, Rng& rng) {
  if (static_cast<int>(x.size()) != spec.d) {
    throw std::invalid_argument("compress_rand_k: input length does not match spec dimension");
  }
  if (spec.is_identity()) return x;
  std::vector<double> out(x.size(), 0.0);
  std::vector<int> idx(spec.k);
  IndexSampler sampler(spec.d);
  sampler.sample(spec.k, rng, idx.data());
  const double s = spec.scale();
  for (int i : idx) out[i] = s * x[i];
  return out;
}

std::vector<double> average_compress(const std::vector<double>& x,
                                     const std::vector<CompressorSpec>& specs,
                                     const std::vector<double>& weights,
                                     Rng& rng) {
  if (specs.empty() || specs.size() != weights.size()) {
    throw std::invalid_argument("average_compress: specs and weights must be nonempty and equal-sized");
  }
  double wsum = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw std::invalid_argument("average_compress: weights must be nonnegative");
    wsum += w;
  }
  if (std::abs(wsum - 1.0) > 1e-12) {
    throw std::invalid_argument("average_compress: weights must sum to 1 within 1e-12");
  }
  for (const auto& s : specs) {
    if (static_cast<int>(x.size()) != s.d) {
      throw std::invalid_argument("average_compress: all specs must share the input dimension");
    }
  }
  std::vector<double> out(x.size(), 0.0);
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto draw = compress_rand_k(specs[i], x, rng);
    for (std::size_t j = 0; j < x.size(); ++j) out[j] += weights[i] * draw[j];
  }
  return out;
}

double omega_of(const CompressorSpec& spec) { return spec.omega(); }

}  // namespace csgd
