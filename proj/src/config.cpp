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
#include "csgd/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace csgd {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::string& path,
                  const std::set<std::string>& allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (allowed.find(it.key()) == allowed.end()) {
      throw ConfigError("unknown key '" + path + "." + it.key() + "'");
    }
  }
}

template <typename T>
T get_or(const json& obj, const std::string& path, const std::string& key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("bad value at '" + path + "." + key + "'");
  }
}

template <typename T>
T get_required(const json& obj, const std::string& path, const std::string& key) {
  if (!obj.contains(key)) throw ConfigError("missing key '" + path + "." + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("bad value at '" + path + "." + key + "'");
  }
}

std::vector<double> scalar_or_array(const json& obj, const std::string& path,
                                    const std::string& key) {
  if (!obj.contains(key)) throw ConfigError("missing key '" + path + "." + key + "'");
  const json& v = obj.at(key);
  if (v.is_number()) return {v.get<double>()};
  if (v.is_array()) {
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) throw ConfigError("bad value at '" + path + "." + key + "'");
      out.push_back(e.get<double>());
    }
    if (out.empty()) throw ConfigError("empty array at '" + path + "." + key + "'");
    return out;
  }
  throw ConfigError("bad value at '" + path + "." + key + "'");
}

ProblemSpecConfig parse_problem(const json& j) {
  require_keys(j, "problem", {"family", "d", "lambda", "scale_std", "n", "seed"});
  ProblemSpecConfig p;
  p.family = get_required<std::string>(j, "problem", "family");
  if (p.family != "block_quadratic" && p.family != "hetero_quadratic") {
    throw ConfigError("problem.family must be block_quadratic or hetero_quadratic");
  }
  p.d = get_required<int>(j, "problem", "d");
  p.lambda = get_required<double>(j, "problem", "lambda");
  p.scale_std = get_or<double>(j, "problem", "scale_std", 0.0);
  p.n = get_required<int>(j, "problem", "n");
  p.seed = get_or<uint64_t>(j, "problem", "seed", 0);
  if (p.d < 2 || p.d % 2 != 0) throw ConfigError("problem.d must be a positive even integer");
  if (p.n < 1) throw ConfigError("problem.n must be >= 1");
  if (p.lambda <= 0.0 || p.lambda > 1.0) throw ConfigError("problem.lambda must be in (0, 1]");
  if (p.scale_std < 0.0) throw ConfigError("problem.scale_std must be >= 0");
  return p;
}

ClusterSpecConfig parse_cluster(const json& j, int n) {
  require_keys(j, "cluster", {"h", "tau", "kappa"});
  ClusterSpecConfig c;
  c.h = scalar_or_array(j, "cluster", "h");
  c.tau = scalar_or_array(j, "cluster", "tau");
  c.kappa = scalar_or_array(j, "cluster", "kappa");
  for (const auto* v : {&c.h, &c.tau, &c.kappa}) {
    if (v->size() != 1 && static_cast<int>(v->size()) != n) {
      throw ConfigError("cluster lists must be scalars or have length problem.n");
    }
    for (double e : *v) {
      if (e < 0.0 || !std::isfinite(e)) throw ConfigError("cluster costs must be finite and >= 0");
    }
  }
  return c;
}

StoppingRule parse_stopping(const json& j) {
  require_keys(j, "stopping",
               {"grad_norm_sq", "f_gap", "max_virtual_time", "max_iterations", "max_f_gap"});
  StoppingRule s;
  if (j.contains("grad_norm_sq")) s.grad_norm_sq_eps = get_required<double>(j, "stopping", "grad_norm_sq");
  if (j.contains("f_gap")) s.f_gap_threshold = get_required<double>(j, "stopping", "f_gap");
  s.max_virtual_time = get_or<double>(j, "stopping", "max_virtual_time",
                                      std::numeric_limits<double>::infinity());
  s.max_iterations = get_or<int64_t>(j, "stopping", "max_iterations", 1000000);
  if (s.max_iterations < 0) throw ConfigError("stopping.max_iterations must be >= 0");
  s.max_f_gap = get_or<double>(j, "stopping", "max_f_gap",
                               std::numeric_limits<double>::infinity());
  return s;
}

MethodSpecConfig parse_method(const json& j, const std::string& path) {
  require_keys(j, path,
               {"name", "mode", "batch", "gamma_grid", "k_grid", "eta_grid", "b_max", "m_max"});
  MethodSpecConfig m;
  m.name = get_required<std::string>(j, path, "name");
  if (m.name != "sync_sgd" && m.name != "inkheart" && m.name != "inkheart_heter" &&
      m.name != "m4") {
    throw ConfigError(path + ".name must be one of sync_sgd, inkheart, inkheart_heter, m4");
  }
  m.mode = get_or<std::string>(j, path, "mode", "grid");
  if (m.mode != "grid" && m.mode != "theorem") {
    throw ConfigError(path + ".mode must be grid or theorem");
  }
  m.batch = get_or<int64_t>(j, path, "batch", 1);
  if (m.batch < 1) throw ConfigError(path + ".batch must be >= 1");
  m.gamma_grid = get_or<std::vector<double>>(j, path, "gamma_grid", {});
  m.k_grid = get_or<std::vector<int>>(j, path, "k_grid", {});
  m.eta_grid = get_or<std::vector<double>>(j, path, "eta_grid", {});
  m.caps.b_max = get_or<int64_t>(j, path, "b_max", 10000);
  m.caps.m_max = get_or<int64_t>(j, path, "m_max", 10000);
  if (m.caps.b_max < 1 || m.caps.m_max < 1) {
    throw ConfigError(path + ": count caps must be >= 1");
  }
  if (m.mode == "grid") {
    if (m.gamma_grid.empty()) throw ConfigError(path + ".gamma_grid must be nonempty in grid mode");
    for (double g : m.gamma_grid) {
      if (!(g > 0.0)) throw ConfigError(path + ".gamma_grid entries must be positive");
    }
    if (m.name == "sync_sgd") {
      if (!m.k_grid.empty()) throw ConfigError(path + ".k_grid does not apply to sync_sgd");
    } else if (m.k_grid.empty()) {
      throw ConfigError(path + ".k_grid must be nonempty in grid mode");
    }
    if (m.name == "m4" && m.eta_grid.empty()) m.eta_grid = {1.0};
    if (m.name != "m4" && !m.eta_grid.empty()) {
      throw ConfigError(path + ".eta_grid only applies to m4");
    }
    for (double e : m.eta_grid) {
      if (!(e > 0.0) || e > 1.0) throw ConfigError(path + ".eta_grid entries must lie in (0, 1]");
    }
  }
  return m;
}

}  // namespace

ProblemInstance ExperimentConfig::build_instance() const {
  if (problem.family == "block_quadratic") {
    return ProblemInstance::block_quadratic(problem.d, problem.lambda, problem.n);
  }
  return ProblemInstance::hetero_quadratic(problem.d, problem.lambda, problem.scale_std,
                                           problem.n, problem.seed);
}

ClusterProfile ExperimentConfig::build_cluster() const {
  const int n = problem.n;
  std::vector<WorkerProfile> workers(n);
  for (int i = 0; i < n; ++i) {
    workers[i].h = cluster.h.size() == 1 ? cluster.h[0] : cluster.h[i];
    workers[i].tau = cluster.tau.size() == 1 ? cluster.tau[0] : cluster.tau[i];
    workers[i].kappa = cluster.kappa.size() == 1 ? cluster.kappa[0] : cluster.kappa[i];
  }
  return ClusterProfile(std::move(workers));
}

std::string ExperimentConfig::to_json() const {
  json j;
  j["problem"] = {{"family", problem.family}, {"d", problem.d},
                  {"lambda", problem.lambda}, {"scale_std", problem.scale_std},
                  {"n", problem.n},           {"seed", problem.seed}};
  j["cluster"] = {{"h", cluster.h}, {"tau", cluster.tau}, {"kappa", cluster.kappa}};
  j["noise"] = {{"sigma", sigma}};
  json st;
  if (!std::isnan(stopping.grad_norm_sq_eps)) st["grad_norm_sq"] = stopping.grad_norm_sq_eps;
  if (!std::isnan(stopping.f_gap_threshold)) st["f_gap"] = stopping.f_gap_threshold;
  if (std::isfinite(stopping.max_virtual_time)) st["max_virtual_time"] = stopping.max_virtual_time;
  st["max_iterations"] = stopping.max_iterations;
  if (std::isfinite(stopping.max_f_gap)) st["max_f_gap"] = stopping.max_f_gap;
  j["stopping"] = st;
  j["seeds"] = seeds;
  j["trace_every"] = trace_every;
  j["output_dir"] = output_dir;
  j["parallelism"] = parallelism;
  json ms = json::array();
  for (const auto& m : methods) {
    json mj = {{"name", m.name}, {"mode", m.mode}, {"batch", m.batch},
               {"b_max", m.caps.b_max}, {"m_max", m.caps.m_max}};
    if (!m.gamma_grid.empty()) mj["gamma_grid"] = m.gamma_grid;
    if (!m.k_grid.empty()) mj["k_grid"] = m.k_grid;
    if (!m.eta_grid.empty()) mj["eta_grid"] = m.eta_grid;
    ms.push_back(mj);
  }
  j["methods"] = ms;
  if (selection.has_value()) {
    j["selection"] = {{"epsilon", selection->epsilon},
                      {"k_up", selection->k_up},
                      {"k_down", selection->k_down}};
  }
  return j.dump(2);
}

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("json parse error: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("top level must be a json object");
  require_keys(j, "$",
               {"problem", "cluster", "noise", "stopping", "seeds", "trace_every",
                "output_dir", "parallelism", "methods", "selection"});

  ExperimentConfig cfg;
  if (!j.contains("problem")) throw ConfigError("missing key '$.problem'");
  cfg.problem = parse_problem(j.at("problem"));
  if (!j.contains("cluster")) throw ConfigError("missing key '$.cluster'");
  cfg.cluster = parse_cluster(j.at("cluster"), cfg.problem.n);
  if (j.contains("noise")) {
    require_keys(j.at("noise"), "noise", {"sigma"});
    cfg.sigma = get_required<double>(j.at("noise"), "noise", "sigma");
    if (cfg.sigma < 0.0) throw ConfigError("noise.sigma must be >= 0");
  }
  if (j.contains("stopping")) cfg.stopping = parse_stopping(j.at("stopping"));
  cfg.seeds = get_or<std::vector<uint64_t>>(j, "$", "seeds", {1});
  if (cfg.seeds.empty()) throw ConfigError("$.seeds must be nonempty");
  cfg.trace_every = get_or<int64_t>(j, "$", "trace_every", 1);
  if (cfg.trace_every < 1) throw ConfigError("$.trace_every must be >= 1");
  cfg.output_dir = get_or<std::string>(j, "$", "output_dir", "out");
  cfg.parallelism = get_or<int>(j, "$", "parallelism", 1);
  if (cfg.parallelism < 1) throw ConfigError("$.parallelism must be >= 1");

  if (!j.contains("methods") || !j.at("methods").is_array() || j.at("methods").empty()) {
    throw ConfigError("$.methods must be a nonempty array");
  }
  int idx = 0;
  for (const auto& mj : j.at("methods")) {
    cfg.methods.push_back(parse_method(mj, "methods[" + std::to_string(idx) + "]"));
    ++idx;
  }
  for (const auto& m : cfg.methods) {
    for (int k : m.k_grid) {
      if (k < 1 || k > cfg.problem.d) {
        throw ConfigError("k_grid entries must lie in [1, problem.d]");
      }
    }
    if (m.mode == "theorem" &&
        std::isnan(cfg.stopping.grad_norm_sq_eps)) {
      throw ConfigError("theorem tuning needs stopping.grad_norm_sq as the accuracy target");
    }
  }

  if (j.contains("selection")) {
    const auto& sj = j.at("selection");
    require_keys(sj, "selection", {"epsilon", "k_up", "k_down"});
    SelectionSpecConfig s;
    s.epsilon = get_required<double>(sj, "selection", "epsilon");
    s.k_up = get_or<int>(sj, "selection", "k_up", 1);
    s.k_down = get_or<int>(sj, "selection", "k_down", 1);
    if (s.epsilon <= 0.0) throw ConfigError("selection.epsilon must be positive");
    if (s.k_up < 1 || s.k_up > cfg.problem.d || s.k_down < 1 || s.k_down > cfg.problem.d) {
      throw ConfigError("selection keep counts must lie in [1, problem.d]");
    }
    cfg.selection = s;
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace csgd
