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

#include <cmath>
#include <cstdint>
#include <cstddef>
#include <vector>

namespace csgd {

// All randomness is derived from explicit (master_seed, worker, role, iteration)
// stream coordinates so that runs replay bit-exactly and changing one knob
// (e.g. the number of uplink messages) does not shift unrelated streams.

inline uint64_t splitmix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

enum class StreamRole : uint64_t {
  kGradNoise = 1,
  kUplink = 2,
  kDownlink = 3,
  kSyncCoin = 4,      // shared model-synchronization coin
  kEstimatorCoin = 5, // shared estimator-refresh coin
  kProblemGen = 6,
};

inline uint64_t stream_seed(uint64_t master, uint64_t worker, StreamRole role,
                            uint64_t iteration) {
  uint64_t s = splitmix64(master ^ 0x5851f42d4c957f2dULL);
  s = splitmix64(s ^ (0x9e3779b97f4a7c15ULL * (worker + 1)));
  s = splitmix64(s ^ (0xbf58476d1ce4e5b9ULL * (static_cast<uint64_t>(role) + 1)));
  s = splitmix64(s ^ (0x94d049bb133111ebULL * (iteration + 1)));
  return s;
}

// xoshiro256++ (Blackman & Vigna). Chosen over std:: engines because its
// output is identical on every platform, which the replay contract requires.
class Rng {
 public:
  explicit Rng(uint64_t seed) {
    uint64_t s = seed;
    for (auto& w : state_) {
      s = splitmix64(s);
      w = s;
    }
  }

  uint64_t next() {
    const uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform in (0, 1]; never returns 0 so it is safe inside log().
  double uniform01() { return ((next() >> 11) + 1) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform01() <= p; }

  // Unbiased bounded integer (Lemire's multiply-shift with rejection).
  uint64_t below(uint64_t n) {
    unsigned __int128 m = static_cast<unsigned __int128>(next()) * n;
    auto lo = static_cast<uint64_t>(m);
    if (lo < n) {
      const uint64_t t = (-n) % n;
      while (lo < t) {
        m = static_cast<unsigned __int128>(next()) * n;
        lo = static_cast<uint64_t>(m);
      }
    }
    return static_cast<uint64_t>(m >> 64);
  }

  // Ziggurat sampler (128 layers); exact standard normal, no transcendental
  // calls on the common path.
  double normal();

  void fill_normals(double* out, std::size_t count) {
    for (std::size_t i = 0; i < count; ++i) out[i] = normal();
  }

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  uint64_t state_[4];
};

namespace detail {

struct ZigguratTables {
  static constexpr int kLayers = 128;
  // kR and kV are the standard tail abscissa and layer area for 128 layers.
  static constexpr double kR = 3.442619855899;
  static constexpr double kV = 9.91256303526217e-3;
  double x[kLayers + 1];
  double y[kLayers + 1];

  ZigguratTables() {
    y[1] = std::exp(-0.5 * kR * kR);
    x[0] = kV / y[1];
    x[1] = kR;
    y[0] = y[1];  // never consulted: layer 0 resolves through the tail branch
    for (int i = 1; i < kLayers; ++i) {
      y[i + 1] = y[i] + kV / x[i];
      if (y[i + 1] >= 1.0) {
        y[i + 1] = 1.0;
        x[i + 1] = 0.0;
      } else {
        x[i + 1] = std::sqrt(-2.0 * std::log(y[i + 1]));
      }
    }
    x[kLayers] = 0.0;
    y[kLayers] = 1.0;
  }
};

inline const ZigguratTables& ziggurat_tables() {
  static const ZigguratTables tables;
  return tables;
}

}  // namespace detail

inline double Rng::normal() {
  const auto& tab = detail::ziggurat_tables();
  for (;;) {
    const uint64_t bits = next();
    const int layer = static_cast<int>(bits & 127);
    const bool negative = (bits >> 7) & 1;
    const double u = static_cast<double>(bits >> 11) * 0x1.0p-53;
    const double x = u * tab.x[layer];
    if (x < tab.x[layer + 1]) return negative ? -x : x;
    if (layer == 0) {
      // tail beyond kR (Marsaglia's exponential rejection)
      double xx, yy;
      do {
        xx = -std::log(uniform01()) / detail::ZigguratTables::kR;
        yy = -std::log(uniform01());
      } while (yy + yy < xx * xx);
      const double v = detail::ZigguratTables::kR + xx;
      return negative ? -v : v;
    }
    const double f_hi = tab.y[layer];
    const double f_lo = tab.y[layer + 1];
    if (f_hi + uniform01() * (f_lo - f_hi) < std::exp(-0.5 * x * x)) {
      return negative ? -x : x;
    }
  }
}

inline Rng make_stream(uint64_t master, uint64_t worker, StreamRole role,
                       uint64_t iteration) {
  return Rng(stream_seed(master, worker, role, iteration));
}

// Random-access Gaussian indexed by (stream, coordinate, sample). Used by the
// sparse estimator path, which only needs noise at compressor-selected
// coordinates; the value for a given index never depends on evaluation order.
inline double normal_at(uint64_t stream, uint64_t coordinate, uint64_t sample) {
  const uint64_t key =
      stream ^ (0xd1342543de82ef95ULL * (coordinate + 1)) ^ (0xaf251af3b0f025b5ULL * (sample + 1));
  const uint64_t a = splitmix64(key);
  const uint64_t b = splitmix64(a ^ 0x9e3779b97f4a7c15ULL);
  const double u1 = ((a >> 11) + 1) * 0x1.0p-53;
  const double u2 = ((b >> 11) + 1) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(6.283185307179586476925286766559 * u2);
}

// Neumaier compensated accumulator; keeps long virtual-time sums bit-stable.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace csgd
