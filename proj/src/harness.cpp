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
#include "csgd/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

#include <nlohmann/json.hpp>

namespace csgd {

namespace {

using nlohmann::json;

json method_config_json(const MethodConfig& c) {
  json j;
  j["method"] = c.method;
  j["tuning_mode"] = c.tuning_mode;
  j["gamma"] = c.gamma;
  j["b"] = c.b;
  j["m"] = c.m;
  j["l"] = c.l;
  j["p"] = c.p;
  j["p_s"] = c.p_s;
  j["eta"] = c.eta;
  j["b_init"] = c.b_init;
  if (!c.beta.empty()) j["beta"] = c.beta;
  j["k_up"] = c.k_up;
  j["k_down"] = c.k_down;
  j["time_budget"] = c.time_budget;
  if (!std::isnan(c.s_star)) j["s_star"] = c.s_star;
  return j;
}

json constants_json(const StructureConstants& sc) {
  return json{{"L", sc.L},
              {"L_A", sc.L_A},
              {"L_B", sc.L_B},
              {"L_max", sc.L_max},
              {"L_hat_sq", sc.L_hat_sq}};
}

double median_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return values[(values.size() - 1) / 2];
}

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void finalize_cell(CellResult& cell) {
  std::vector<double> times, gaps;
  int diverged = 0;
  for (const auto& t : cell.traces) {
    times.push_back(t.time_to_threshold);
    gaps.push_back(t.final_f_gap);
    if (t.status == RunStatus::kDiverged) ++diverged;
  }
  cell.median_time_to_threshold = median_of(times);
  cell.median_final_f_gap = median_of(gaps);
  cell.all_diverged = diverged == static_cast<int>(cell.traces.size());
}

// Tie order: time, then gamma, then uplink keep count.
bool cell_better(const CellResult& a, const CellResult& b) {
  if (a.median_time_to_threshold != b.median_time_to_threshold) {
    return a.median_time_to_threshold < b.median_time_to_threshold;
  }
  if (a.config.gamma != b.config.gamma) return a.config.gamma < b.config.gamma;
  return a.config.k_up < b.config.k_up;
}

int pick_best_cell(const std::vector<CellResult>& cells) {
  int best = -1;
  for (int i = 0; i < static_cast<int>(cells.size()); ++i) {
    if (cells[i].all_diverged) continue;
    if (best < 0 || cell_better(cells[i], cells[best])) best = i;
  }
  return best;
}

MethodConfig theorem_config(const ExperimentConfig& cfg, const MethodSpecConfig& method,
                            const ProblemInstance& instance, const ClusterProfile& cluster) {
  const auto& sc = instance.constants();
  const double sigma_sq_full = NoiseSpec{cfg.sigma}.full_vector_variance(instance.dimension());
  const double epsilon = cfg.stopping.grad_norm_sq_eps;
  const int n = instance.worker_count();
  const int d = instance.dimension();
  if (method.name == "inkheart") {
    if (!cluster.homogeneous()) {
      throw ConfigError("method inkheart expects a homogeneous cluster; use inkheart_heter");
    }
    const auto& w = cluster.workers[0];
    return inkheart_tune_homog(w.h, w.tau, w.kappa, sigma_sq_full, epsilon, n, d,
                               sc.L_max, sc.L_A, method.caps);
  }
  if (method.name == "inkheart_heter") {
    return inkheart_tune_heter(cluster, sigma_sq_full, epsilon, d, sc.L_max, sc.L_A,
                               method.caps);
  }
  if (method.name == "m4") {
    double h = 0, tau = 0, kappa = 0;
    for (const auto& w : cluster.workers) {
      h = std::max(h, w.h);
      tau = std::max(tau, w.tau);
      kappa = std::max(kappa, w.kappa);
    }
    return m4_tune(h, tau, kappa, sigma_sq_full, epsilon, n, d, sc.L_A, sc.L_B, sc.L_max,
                   method.caps);
  }
  // Baseline: step size 1/L_max, minibatch sized so the statistical term
  // matches the accuracy target.
  MethodConfig c;
  c.method = "sync_sgd";
  c.tuning_mode = "theorem";
  c.gamma = 1.0 / sc.L_max;
  const double b_stat = sigma_sq_full / (n * epsilon);
  c.b = {std::max<int64_t>(1, static_cast<int64_t>(std::ceil(b_stat)))};
  c.k_up = d;
  c.k_down = d;
  return c;
}

MethodConfig grid_cell_config(const MethodSpecConfig& method, int d, double gamma, int k,
                              double eta) {
  MethodConfig c;
  c.method = method.name;
  c.tuning_mode = "grid";
  c.gamma = gamma;
  c.b = {method.batch};
  c.m = {1};
  c.l = {1};
  if (method.name == "sync_sgd") {
    c.k_up = d;
    c.k_down = d;
    c.p = 1.0;
    return c;
  }
  c.k_up = k;
  c.k_down = k;
  // Broadcast probability matched to the compressed message size, so the
  // expected downlink cost stays within twice the compressed cost.
  c.p = std::min(static_cast<double>(k) / d, 1.0);
  if (method.name == "m4") {
    c.p = static_cast<double>(k) / d;
    c.p_s = static_cast<double>(k) / d;
    c.eta = eta;
    c.b_init = method.batch;
  }
  return c;
}

}  // namespace

std::vector<MethodConfig> resolve_cells(const ExperimentConfig& cfg,
                                        const MethodSpecConfig& method,
                                        const ProblemInstance& instance,
                                        const ClusterProfile& cluster) {
  std::vector<MethodConfig> cells;
  if (method.mode == "theorem") {
    cells.push_back(theorem_config(cfg, method, instance, cluster));
    return cells;
  }
  const int d = instance.dimension();
  const std::vector<int> ks = method.name == "sync_sgd" ? std::vector<int>{d} : method.k_grid;
  const std::vector<double> etas =
      method.name == "m4" ? method.eta_grid : std::vector<double>{1.0};
  for (int k : ks) {
    for (double gamma : method.gamma_grid) {
      for (double eta : etas) {
        cells.push_back(grid_cell_config(method, d, gamma, k, eta));
      }
    }
  }
  return cells;
}

namespace {

std::vector<CellResult> run_cells(const ExperimentConfig& cfg,
                                  const MethodSpecConfig& method,
                                  const ProblemInstance& instance,
                                  const ClusterProfile& cluster, int parallelism) {
  const NoiseSpec noise{cfg.sigma};
  std::vector<MethodConfig> cells = resolve_cells(cfg, method, instance, cluster);
  std::vector<CellResult> results(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    results[i].config = cells[i];
    results[i].traces.resize(cfg.seeds.size());
  }

  struct Job {
    std::size_t cell;
    std::size_t seed;
  };
  std::vector<Job> jobs;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (std::size_t s = 0; s < cfg.seeds.size(); ++s) jobs.push_back(Job{c, s});
  }

  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      const Job& job = jobs[i];
      results[job.cell].traces[job.seed] =
          run_method(cells[job.cell].method, instance, cluster, noise, cells[job.cell],
                     cfg.stopping, cfg.seeds[job.seed], cfg.trace_every);
    }
  };
  const int threads = std::max(1, std::min<int>(parallelism, static_cast<int>(jobs.size())));
  if (threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (auto& r : results) finalize_cell(r);
  return results;
}

}  // namespace

std::optional<CellResult> grid_search(const ExperimentConfig& cfg,
                                      const MethodSpecConfig& method,
                                      const ProblemInstance& instance,
                                      const ClusterProfile& cluster) {
  auto cells = run_cells(cfg, method, instance, cluster, cfg.parallelism);
  const int best = pick_best_cell(cells);
  if (best < 0) return std::nullopt;
  return cells[best];
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::string& out_dir,
                                int parallelism_override) {
  namespace fs = std::filesystem;
  const int parallelism = parallelism_override > 0 ? parallelism_override : cfg.parallelism;
  fs::create_directories(out_dir);
  {
    std::ofstream echo(fs::path(out_dir) / "resolved_config.json");
    echo << cfg.to_json() << "\n";
  }

  const ProblemInstance instance = cfg.build_instance();
  const ClusterProfile cluster = cfg.build_cluster();

  ExperimentResult result;
  for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
    const auto& method = cfg.methods[mi];
    MethodSummary summary;
    summary.name = method.name;
    summary.mode = method.mode;
    summary.cells = run_cells(cfg, method, instance, cluster, parallelism);
    summary.best_cell = pick_best_cell(summary.cells);
    if (summary.best_cell < 0) result.any_method_all_diverged = true;

    for (std::size_t ci = 0; ci < summary.cells.size(); ++ci) {
      const auto& cell = summary.cells[ci];
      for (std::size_t si = 0; si < cfg.seeds.size(); ++si) {
        const std::string stem = "m" + std::to_string(mi) + "_" + method.name + "_cell" +
                                 std::to_string(ci) + "_seed" +
                                 std::to_string(cfg.seeds[si]);
        {
          std::ofstream os(fs::path(out_dir) / (stem + ".csv"));
          write_trace_csv(cell.traces[si], os);
        }
        json meta;
        meta["method_config"] = method_config_json(cell.config);
        meta["structure_constants"] = constants_json(instance.constants());
        meta["problem"] = json::parse(instance.to_json());
        meta["noise_sigma"] = cfg.sigma;
        meta["seed"] = cfg.seeds[si];
        meta["status"] = to_string(cell.traces[si].status);
        meta["iterations"] = cell.traces[si].iterations;
        meta["final_time_s"] = cell.traces[si].final_time_s;
        meta["time_to_threshold"] =
            std::isinf(cell.traces[si].time_to_threshold)
                ? json(nullptr)
                : json(cell.traces[si].time_to_threshold);
        std::ofstream ms(fs::path(out_dir) / (stem + ".meta.json"));
        ms << meta.dump(2) << "\n";
      }
    }
    result.methods.push_back(std::move(summary));
  }

  std::string csv =
      "method,mode,best_cell,gamma,k,eta,batch,median_time_to_threshold,median_final_f_gap,"
      "status\n";
  for (const auto& m : result.methods) {
    if (m.best_cell < 0) {
      csv += m.name + "," + m.mode + ",-1,,,,,inf,inf,all_diverged\n";
      continue;
    }
    const auto& cell = m.cells[m.best_cell];
    const bool reached = std::isfinite(cell.median_time_to_threshold);
    csv += m.name + "," + m.mode + "," + std::to_string(m.best_cell) + "," +
           format_double(cell.config.gamma) + "," + std::to_string(cell.config.k_up) + "," +
           format_double(cell.config.eta) + "," + std::to_string(cell.config.b_of(0)) + "," +
           format_double(cell.median_time_to_threshold) + "," +
           format_double(cell.median_final_f_gap) + "," + (reached ? "ok" : "unreached") +
           "\n";
  }
  result.summary_csv = csv;
  std::ofstream os(fs::path(out_dir) / "summary.csv");
  os << csv;
  return result;
}

}  // namespace csgd
