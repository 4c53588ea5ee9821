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
#include "csgd/methods.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace csgd {

namespace {

constexpr double kDivergenceLimit = 1e150;

bool iterate_finite(const std::vector<double>& x) {
  for (double v : x) {
    if (!std::isfinite(v) || std::abs(v) > kDivergenceLimit) return false;
  }
  return true;
}

void check_simplex_weights(const MethodConfig& config, int n) {
  if (config.beta.empty()) return;
  if (static_cast<int>(config.beta.size()) != n) {
    throw std::invalid_argument("weights: need one weight per worker");
  }
  double sum = 0.0;
  for (double b : config.beta) {
    if (b < 0.0 || b > 1.0) throw std::invalid_argument("weights: entries must lie in [0, 1]");
    sum += b;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("weights: must sum to 1");
  }
}

// Accumulates the aggregated estimator sum_i beta_i/(b_i m_i) sum_j C_ij(S_i)
// into `g` (assumed zeroed). When k_up < d, the minibatch sum is evaluated
// only at the compressor-selected coordinates; the noise values per
// (coordinate, sample) index are identical to the dense evaluation order-free.
void accumulate_inkheart_estimator(std::vector<double>& g, const InkheartState& state,
                                   const ProblemInstance& instance, const NoiseSpec& noise,
                                   const MethodConfig& config, uint64_t master_seed,
                                   uint64_t iteration, std::vector<double>& sum_scratch,
                                   std::vector<double>& memo, std::vector<uint64_t>& epoch,
                                   uint64_t& epoch_counter) {
  const int n = instance.worker_count();
  const int d = instance.dimension();
  const int k_up = config.k_up;
  if (k_up == d) {
    for (int i = 0; i < n; ++i) {
      const int64_t bi = config.b_of(i);
      const int64_t mi = config.m_of(i);
      Rng grad_rng = make_stream(master_seed, i, StreamRole::kGradNoise, iteration);
      instance.stoch_grad_batch_sum(i, state.x_local[i], bi, noise, grad_rng, sum_scratch);
      const double coef = config.beta_of(i, n) / static_cast<double>(bi * mi);
      for (int64_t msg = 0; msg < mi; ++msg) {
        for (int j = 0; j < d; ++j) g[j] += coef * sum_scratch[j];
      }
    }
    return;
  }
  const double scale = static_cast<double>(d) / k_up;
  IndexSampler sampler(d);
  std::vector<int> idx(k_up);
  if (memo.size() != static_cast<size_t>(d)) {
    memo.assign(d, 0.0);
    epoch.assign(d, 0);
  }
  for (int i = 0; i < n; ++i) {
    const int64_t bi = config.b_of(i);
    const int64_t mi = config.m_of(i);
    const uint64_t noise_stream = stream_seed(master_seed, i, StreamRole::kGradNoise, iteration);
    Rng up_rng = make_stream(master_seed, i, StreamRole::kUplink, iteration);
    const double coef = config.beta_of(i, n) / static_cast<double>(bi * mi);
    ++epoch_counter;
    for (int64_t msg = 0; msg < mi; ++msg) {
      sampler.sample(k_up, up_rng, idx.data());
      for (int t : idx) {
        if (epoch[t] != epoch_counter) {
          memo[t] = instance.stoch_grad_batch_sum_coord(i, state.x_local[i][t], t, bi,
                                                        noise, noise_stream);
          epoch[t] = epoch_counter;
        }
        g[t] += coef * scale * memo[t];
      }
    }
  }
}

StepResult inkheart_step_impl(InkheartState& state, const ProblemInstance& instance,
                              const ClusterProfile& cluster, const NoiseSpec& noise,
                              const MethodConfig& config, uint64_t master_seed) {
  const int n = instance.worker_count();
  const int d = instance.dimension();
  if (cluster.n() != n) throw std::invalid_argument("run: cluster size must match worker count");
  check_simplex_weights(config, n);
  const uint64_t k = static_cast<uint64_t>(state.k);

  auto& g = state.scratch_g;
  g.assign(d, 0.0);
  accumulate_inkheart_estimator(g, state, instance, noise, config, master_seed, k,
                                state.scratch_sum, state.scratch_memo, state.scratch_epoch,
                                state.epoch_counter);

  auto& prev = state.scratch_prev;
  prev = state.x;
  for (int j = 0; j < d; ++j) state.x[j] -= config.gamma * g[j];

  Rng coin_rng = make_stream(master_seed, 0, StreamRole::kSyncCoin, k);
  const bool sync_all = coin_rng.bernoulli(config.p);

  StepResult result;
  uint64_t up = 0;
  for (int i = 0; i < n; ++i) up += static_cast<uint64_t>(config.m_of(i)) * config.k_up;
  result.up_coords = up;

  if (sync_all) {
    for (int i = 0; i < n; ++i) state.x_local[i] = state.x;
    result.down_coords = static_cast<uint64_t>(n) * d;
  } else {
    const int k_down = config.k_down;
    const double scale = static_cast<double>(d) / k_down;
    IndexSampler sampler(d);
    std::vector<int> idx(k_down);
    uint64_t down = 0;
    for (int i = 0; i < n; ++i) {
      const int64_t li = config.l_of(i);
      const double inv_l = 1.0 / static_cast<double>(li);
      auto& xl = state.x_local[i];
      if (k_down == d) {
        for (int64_t msg = 0; msg < li; ++msg) {
          for (int j = 0; j < d; ++j) xl[j] += inv_l * (state.x[j] - prev[j]);
        }
      } else {
        Rng down_rng = make_stream(master_seed, i, StreamRole::kDownlink, k);
        for (int64_t msg = 0; msg < li; ++msg) {
          sampler.sample(k_down, down_rng, idx.data());
          for (int t : idx) xl[t] += inv_l * scale * (state.x[t] - prev[t]);
        }
      }
      down += static_cast<uint64_t>(li) * k_down;
    }
    result.down_coords = down;
  }

  result.seconds = inkheart_iteration_time(cluster, config.b_vector(n), config.m_vector(n),
                                           config.l_vector(n), sync_all, d, config.k_up,
                                           config.k_down);
  ++state.k;
  return result;
}

}  // namespace

SyncSgdState sync_sgd_init(const ProblemInstance& instance) {
  return SyncSgdState{instance.start_point(), 0};
}

InkheartState inkheart_init(const ProblemInstance& instance) {
  InkheartState s;
  s.x = instance.start_point();
  s.x_local.assign(instance.worker_count(), s.x);
  return s;
}

M4State m4_init(const ProblemInstance& instance, const NoiseSpec& noise,
                const MethodConfig& config, uint64_t master_seed) {
  const int n = instance.worker_count();
  const int d = instance.dimension();
  if (config.b_init < 1) throw std::invalid_argument("m4: b_init must be >= 1");
  M4State s;
  s.x = instance.start_point();
  s.w.assign(n, s.x);
  s.x_local.assign(n, s.x);
  s.v.assign(n, std::vector<double>(d, 0.0));
  s.g.assign(d, 0.0);
  const double inv_n = 1.0 / n;
  const double inv_binit = 1.0 / static_cast<double>(config.b_init);
  std::vector<double> sum(d);
  for (int i = 0; i < n; ++i) {
    Rng grad_rng = make_stream(master_seed, i, StreamRole::kGradNoise, 0);
    instance.stoch_grad_batch_sum(i, s.x_local[i], config.b_init, noise, grad_rng, sum);
    for (int j = 0; j < d; ++j) {
      s.v[i][j] = inv_binit * sum[j];
      s.g[j] += inv_n * s.v[i][j];
    }
  }
  return s;
}

StepResult sync_sgd_step(SyncSgdState& state, const ProblemInstance& instance,
                         const ClusterProfile& cluster, const NoiseSpec& noise,
                         const MethodConfig& config, uint64_t master_seed) {
  const int n = instance.worker_count();
  const int d = instance.dimension();
  if (cluster.n() != n) throw std::invalid_argument("run: cluster size must match worker count");
  const int64_t b = config.b_of(0);
  if (b < 1) throw std::invalid_argument("sync_sgd: batch must be >= 1");
  const uint64_t k = static_cast<uint64_t>(state.k);

  std::vector<double> g(d, 0.0);
  std::vector<double> sum(d);
  const double beta = 1.0 / n;
  const double coef = beta / static_cast<double>(b);
  for (int i = 0; i < n; ++i) {
    Rng grad_rng = make_stream(master_seed, i, StreamRole::kGradNoise, k);
    instance.stoch_grad_batch_sum(i, state.x, b, noise, grad_rng, sum);
    for (int j = 0; j < d; ++j) g[j] += coef * sum[j];
  }
  for (int j = 0; j < d; ++j) state.x[j] -= config.gamma * g[j];

  StepResult result;
  const std::vector<int64_t> bs(n, b), ones(n, 1);
  result.seconds = inkheart_iteration_time(cluster, bs, ones, ones, true, d, d, d);
  result.up_coords = static_cast<uint64_t>(n) * d;
  result.down_coords = static_cast<uint64_t>(n) * d;
  ++state.k;
  return result;
}

StepResult inkheart_step(InkheartState& state, const ProblemInstance& instance,
                         const ClusterProfile& cluster, const NoiseSpec& noise,
                         const MethodConfig& config, uint64_t master_seed) {
  return inkheart_step_impl(state, instance, cluster, noise, config, master_seed);
}

StepResult inkheart_heter_step(InkheartState& state, const ProblemInstance& instance,
                               const ClusterProfile& cluster, const NoiseSpec& noise,
                               const MethodConfig& config, uint64_t master_seed) {
  return inkheart_step_impl(state, instance, cluster, noise, config, master_seed);
}

std::vector<double> inkheart_estimator_draw(const InkheartState& state,
                                            const ProblemInstance& instance,
                                            const NoiseSpec& noise,
                                            const MethodConfig& config,
                                            uint64_t master_seed, uint64_t iteration) {
  const int d = instance.dimension();
  std::vector<double> g(d, 0.0);
  std::vector<double> sum_scratch;
  std::vector<double> memo;
  std::vector<uint64_t> epoch;
  uint64_t counter = 0;
  accumulate_inkheart_estimator(g, state, instance, noise, config, master_seed, iteration,
                                sum_scratch, memo, epoch, counter);
  return g;
}

StepResult m4_step(M4State& state, const ProblemInstance& instance,
                   const ClusterProfile& cluster, const NoiseSpec& noise,
                   const MethodConfig& config, uint64_t master_seed) {
  const int n = instance.worker_count();
  const int d = instance.dimension();
  if (cluster.n() != n) throw std::invalid_argument("run: cluster size must match worker count");
  if (config.eta <= 0.0 || config.eta > 1.0) {
    throw std::invalid_argument("m4: momentum parameter must lie in (0, 1]");
  }
  const uint64_t k = static_cast<uint64_t>(state.k);
  const double mu = config.eta;
  const double nu = config.eta;
  const int64_t b = config.b_of(0);

  auto& prev = state.scratch_prev;
  prev = state.x;
  for (int j = 0; j < d; ++j) state.x[j] -= config.gamma * state.g[j];

  // Shadow-model update; one shared coin for all workers.
  Rng sync_rng = make_stream(master_seed, 0, StreamRole::kSyncCoin, k);
  const bool down_full = sync_rng.bernoulli(config.p_s);
  if (down_full) {
    for (int i = 0; i < n; ++i) state.w[i] = state.x;
  } else {
    const int k_down = config.k_down;
    const double scale = static_cast<double>(d) / k_down;
    IndexSampler sampler(d);
    std::vector<int> idx(k_down);
    for (int i = 0; i < n; ++i) {
      auto& wi = state.w[i];
      if (k_down == d) {
        for (int j = 0; j < d; ++j) wi[j] += state.x[j] - prev[j];
      } else {
        Rng down_rng = make_stream(master_seed, i, StreamRole::kDownlink, k);
        sampler.sample(k_down, down_rng, idx.data());
        for (int t : idx) wi[t] += scale * (state.x[t] - prev[t]);
      }
    }
  }

  for (int i = 0; i < n; ++i) {
    auto& xl = state.x_local[i];
    const auto& wi = state.w[i];
    for (int j = 0; j < d; ++j) xl[j] = (1.0 - mu) * xl[j] + mu * wi[j];
  }

  // Momentum refresh and estimator update; the second coin is independent.
  Rng est_rng = make_stream(master_seed, 0, StreamRole::kEstimatorCoin, k);
  const bool up_full = est_rng.bernoulli(config.p);
  const double inv_n = 1.0 / n;
  const double nu_over_b = nu / static_cast<double>(b);
  const int k_up = config.k_up;
  const double up_scale = static_cast<double>(d) / k_up;

  auto& g_next = state.scratch_g;
  if (up_full) {
    g_next.assign(d, 0.0);
  } else {
    g_next = state.g;
  }
  auto& sum = state.scratch_sum;
  auto& diff = state.scratch_diff;
  diff.resize(d);
  IndexSampler sampler(d);
  std::vector<int> idx(k_up);
  for (int i = 0; i < n; ++i) {
    Rng grad_rng = make_stream(master_seed, i, StreamRole::kGradNoise, k + 1);
    instance.stoch_grad_batch_sum(i, state.x_local[i], b, noise, grad_rng, sum);
    auto& vi = state.v[i];
    if (up_full) {
      for (int j = 0; j < d; ++j) {
        vi[j] = (1.0 - nu) * vi[j] + nu_over_b * sum[j];
        g_next[j] += inv_n * vi[j];
      }
    } else if (k_up == d) {
      for (int j = 0; j < d; ++j) {
        const double v_new = (1.0 - nu) * vi[j] + nu_over_b * sum[j];
        g_next[j] += inv_n * (v_new - vi[j]);
        vi[j] = v_new;
      }
    } else {
      for (int j = 0; j < d; ++j) {
        const double v_new = (1.0 - nu) * vi[j] + nu_over_b * sum[j];
        diff[j] = v_new - vi[j];
        vi[j] = v_new;
      }
      Rng up_rng = make_stream(master_seed, i, StreamRole::kUplink, k);
      sampler.sample(k_up, up_rng, idx.data());
      for (int t : idx) g_next[t] += inv_n * up_scale * diff[t];
    }
  }
  state.g = g_next;

  StepResult result;
  result.seconds = m4_iteration_time(cluster, b, k_up, config.k_down, down_full, up_full, d);
  result.down_coords = static_cast<uint64_t>(n) * (down_full ? d : config.k_down);
  result.up_coords = static_cast<uint64_t>(n) * (up_full ? d : k_up);
  ++state.k;
  return result;
}

namespace {

template <typename State, typename StepFn>
RunTrace run_loop(State& state, StepFn&& step_fn, const ProblemInstance& instance,
                  const StoppingRule& stopping, int64_t trace_every,
                  double warm_start_seconds, const std::vector<double>& (*iterate_of)(const State&)) {
  RunTrace trace;
  CompensatedSum clock;
  clock.add(warm_start_seconds);
  uint64_t up = 0, down = 0;
  if (trace_every < 1) trace_every = 1;

  const std::vector<double>* x = &iterate_of(state);
  double gnsq = instance.grad_norm_sq(*x);
  double fgap = instance.f_gap(*x);
  int64_t last_emitted = -1;
  auto emit = [&](int64_t iter) {
    trace.rows.push_back(TraceRow{iter, clock.value(), gnsq, fgap, up, down});
    last_emitted = iter;
  };
  emit(0);

  int64_t k = 0;
  for (;;) {
    if (stopping.threshold_satisfied(gnsq, fgap)) {
      trace.status = RunStatus::kReachedThreshold;
      trace.time_to_threshold = clock.value();
      break;
    }
    if (clock.value() >= stopping.max_virtual_time || k >= stopping.max_iterations) {
      trace.status = RunStatus::kBudgetExhausted;
      break;
    }
    const StepResult r = step_fn(state);
    clock.add(r.seconds);
    up += r.up_coords;
    down += r.down_coords;
    ++k;
    x = &iterate_of(state);
    if (!iterate_finite(*x)) {
      trace.status = RunStatus::kDiverged;
      break;
    }
    gnsq = instance.grad_norm_sq(*x);
    fgap = instance.f_gap(*x);
    if (fgap >= stopping.max_f_gap) {
      trace.status = RunStatus::kDiverged;
      break;
    }
    if (k % trace_every == 0) emit(k);
  }
  if (trace.status != RunStatus::kDiverged && last_emitted != k) emit(k);
  trace.iterations = k;
  trace.final_time_s = clock.value();
  if (trace.status != RunStatus::kDiverged) {
    trace.final_grad_norm_sq = gnsq;
    trace.final_f_gap = fgap;
  } else if (!trace.rows.empty()) {
    trace.final_grad_norm_sq = trace.rows.back().grad_norm_sq;
    trace.final_f_gap = trace.rows.back().f_gap;
  }
  return trace;
}

const std::vector<double>& sync_iterate(const SyncSgdState& s) { return s.x; }
const std::vector<double>& inkheart_iterate(const InkheartState& s) { return s.x; }
const std::vector<double>& m4_iterate(const M4State& s) { return s.x; }

}  // namespace

RunTrace run_method(const std::string& method, const ProblemInstance& instance,
                    const ClusterProfile& cluster, const NoiseSpec& noise,
                    const MethodConfig& config, const StoppingRule& stopping,
                    uint64_t master_seed, int64_t trace_every) {
  if (method == "sync_sgd") {
    SyncSgdState state = sync_sgd_init(instance);
    auto step = [&](SyncSgdState& s) {
      return sync_sgd_step(s, instance, cluster, noise, config, master_seed);
    };
    return run_loop(state, step, instance, stopping, trace_every, 0.0, sync_iterate);
  }
  if (method == "inkheart" || method == "inkheart_heter") {
    InkheartState state = inkheart_init(instance);
    auto step = [&](InkheartState& s) {
      return inkheart_step(s, instance, cluster, noise, config, master_seed);
    };
    return run_loop(state, step, instance, stopping, trace_every, 0.0, inkheart_iterate);
  }
  if (method == "m4") {
    double h_max = 0.0;
    for (const auto& w : cluster.workers) h_max = std::max(h_max, w.h);
    M4State state = m4_init(instance, noise, config, master_seed);
    const double warm = static_cast<double>(config.b_init) * h_max;
    auto step = [&](M4State& s) {
      return m4_step(s, instance, cluster, noise, config, master_seed);
    };
    return run_loop(state, step, instance, stopping, trace_every, warm, m4_iterate);
  }
  throw std::invalid_argument("run: unknown method tag '" + method + "'");
}

}  // namespace csgd
