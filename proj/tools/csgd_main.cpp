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
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "csgd/config.hpp"
#include "csgd/harness.hpp"
#include "csgd/selection.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 2;
constexpr int kExitAllDiverged = 3;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

int cmd_simulate(const std::string& config_path, const std::string& out_override,
                 int parallelism) {
  const csgd::ExperimentConfig cfg = csgd::load_config(config_path);
  const std::string out_dir = out_override.empty() ? cfg.output_dir : out_override;
  const csgd::ExperimentResult result = csgd::run_experiment(cfg, out_dir, parallelism);
  std::cout << result.summary_csv;
  return result.any_method_all_diverged ? kExitAllDiverged : kExitOk;
}

int cmd_tune(const std::string& config_path, const std::string& method_name) {
  const csgd::ExperimentConfig cfg = csgd::load_config(config_path);
  const csgd::ProblemInstance instance = cfg.build_instance();
  const csgd::ClusterProfile cluster = cfg.build_cluster();
  for (const auto& m : cfg.methods) {
    if (m.name != method_name) continue;
    const auto cells = csgd::resolve_cells(cfg, m, instance, cluster);
    nlohmann::json out = nlohmann::json::array();
    for (const auto& c : cells) {
      nlohmann::json j;
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
      out.push_back(j);
    }
    std::cout << out.dump(2) << "\n";
    return kExitOk;
  }
  std::cerr << "config error: no method entry named '" << method_name << "'\n";
  return kExitConfigError;
}

int cmd_select_workers(const std::string& config_path) {
  const csgd::ExperimentConfig cfg = csgd::load_config(config_path);
  if (!cfg.selection.has_value()) {
    std::cerr << "config error: missing 'selection' section\n";
    return kExitConfigError;
  }
  const csgd::ProblemInstance instance = cfg.build_instance();
  const csgd::ClusterProfile cluster = cfg.build_cluster();
  const auto& sel = *cfg.selection;
  csgd::SelectionConstants constants;
  constants.d = instance.dimension();
  constants.omega = static_cast<double>(instance.dimension()) / sel.k_up - 1.0;
  constants.omega_s = static_cast<double>(instance.dimension()) / sel.k_down - 1.0;
  constants.sigma_sq_full =
      csgd::NoiseSpec{cfg.sigma}.full_vector_variance(instance.dimension());
  constants.epsilon = sel.epsilon;
  constants.L_max = instance.constants().L_max;
  constants.L_A = instance.constants().L_A;

  const auto best = csgd::select_optimal_subset(cluster, constants);

  std::cout << "subset,t_of_s,s_star,kappa_max,objective,chosen\n";
  // Emit the candidate table the search walks: every prefix of the
  // bottleneck-sorted kappa prefixes.
  std::vector<int> by_kappa(cluster.n());
  for (int i = 0; i < cluster.n(); ++i) by_kappa[i] = i;
  std::sort(by_kappa.begin(), by_kappa.end(), [&](int a, int b) {
    if (cluster.workers[a].kappa != cluster.workers[b].kappa) {
      return cluster.workers[a].kappa < cluster.workers[b].kappa;
    }
    return a < b;
  });
  for (int k = 1; k <= cluster.n(); ++k) {
    std::vector<int> prefix(by_kappa.begin(), by_kappa.begin() + k);
    std::sort(prefix.begin(), prefix.end(), [&](int a, int b) {
      if (cluster.max_cost(a) != cluster.max_cost(b)) {
        return cluster.max_cost(a) < cluster.max_cost(b);
      }
      return a < b;
    });
    for (int m = 1; m <= k; ++m) {
      std::vector<int> candidate(prefix.begin(), prefix.begin() + m);
      const auto ev = csgd::evaluate_subset(cluster, candidate, constants);
      std::string ids;
      for (std::size_t i = 0; i < ev.subset.size(); ++i) {
        ids += (i ? "|" : "") + std::to_string(ev.subset[i]);
      }
      const bool chosen = ev.subset == best.subset;
      std::cout << ids << "," << fmt(ev.t_of_s) << "," << fmt(ev.s_star) << ","
                << fmt(ev.kappa_max) << "," << fmt(ev.objective) << ","
                << (chosen ? "1" : "0") << "\n";
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"virtual-time simulator for compressed distributed SGD methods"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  int parallelism = 0;
  auto* simulate = app.add_subcommand("simulate", "run the configured experiment sweep");
  simulate->add_option("config", config_path, "experiment config (json)")->required();
  simulate->add_option("--out", out_dir, "output directory (overrides config)");
  simulate->add_option("--parallelism", parallelism, "worker threads for grid cells");

  std::string tune_config;
  std::string tune_method;
  auto* tune = app.add_subcommand("tune", "print the resolved method configuration");
  tune->add_option("config", tune_config, "experiment config (json)")->required();
  tune->add_option("--method", tune_method, "method name to resolve")->required();

  std::string select_config;
  auto* select = app.add_subcommand("select-workers", "optimal worker subset for the cluster");
  select->add_option("config", select_config, "experiment config (json)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return cmd_simulate(config_path, out_dir, parallelism);
    if (tune->parsed()) return cmd_tune(tune_config, tune_method);
    if (select->parsed()) return cmd_select_workers(select_config);
  } catch (const csgd::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
