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
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "csgd/config.hpp"
#include "csgd/harness.hpp"

using namespace csgd;

namespace {

std::string minimal_config(const std::string& methods, const std::string& extra = "") {
  return std::string("{") +
         R"("problem":{"family":"block_quadratic","d":2,"lambda":0.5,"n":2},)" +
         R"("cluster":{"h":0.0,"tau":0.25,"kappa":0.25},)" +
         R"("noise":{"sigma":0.0},)" +
         R"("stopping":{"f_gap":1e-10,"max_iterations":2000},)" +
         R"("seeds":[1],"methods":[)" + methods + "]" + extra + "}";
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::map<std::string, std::string> dir_contents(const std::filesystem::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    out[e.path().filename().string()] = read_file(e.path());
  }
  return out;
}

}  // namespace

TEST_CASE("config parsing") {
  SUBCASE("minimal config resolves with defaults") {
    const auto cfg = parse_config(minimal_config(
        R"({"name":"sync_sgd","mode":"grid","gamma_grid":[0.5]})"));
    CHECK(cfg.problem.d == 2);
    CHECK(cfg.trace_every == 1);
    CHECK(cfg.output_dir == "out");
    CHECK(cfg.parallelism == 1);
    CHECK(cfg.methods.size() == 1);
    CHECK(cfg.methods[0].batch == 1);
    // echo contains the filled defaults
    CHECK(cfg.to_json().find("\"trace_every\": 1") != std::string::npos);
  }
  SUBCASE("reference cell round-trips") {
    const std::string text = R"({
      "problem": {"family":"block_quadratic","d":300,"lambda":0.01,"n":300},
      "cluster": {"h":0.0,"tau":0.0033333333333333335,"kappa":0.0033333333333333335},
      "noise": {"sigma":0.001},
      "stopping": {"f_gap":1e-6,"max_virtual_time":2600,"max_iterations":20000},
      "seeds":[1,2,3],
      "methods":[{"name":"inkheart","mode":"grid","gamma_grid":[0.5,1.0],"k_grid":[1,10]}]
    })";
    const auto cfg = parse_config(text);
    CHECK(cfg.problem.d == 300);
    CHECK(cfg.problem.lambda == doctest::Approx(0.01));
    CHECK(cfg.sigma == doctest::Approx(0.001));
    CHECK(cfg.cluster.tau[0] == doctest::Approx(1.0 / 300));
    CHECK(cfg.seeds.size() == 3);
    CHECK(cfg.stopping.f_gap_threshold == doctest::Approx(1e-6));
  }
  SUBCASE("unknown keys are rejected with their path") {
    const std::string text = minimal_config(
        R"({"name":"sync_sgd","mode":"grid","gamma_grid":[0.5],"momentum":0.9})");
    CHECK_THROWS_WITH_AS(parse_config(text), "unknown key 'methods[0].momentum'", ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"problem":{},"unknown_top":1})"), ConfigError);
  }
  SUBCASE("value contracts") {
    CHECK_THROWS_AS(parse_config(minimal_config(
                        R"({"name":"sync_sgd","mode":"grid","gamma_grid":[]})")),
                    ConfigError);
    CHECK_THROWS_AS(parse_config(minimal_config(
                        R"({"name":"inkheart","mode":"grid","gamma_grid":[0.5]})")),
                    ConfigError);  // missing k_grid
    CHECK_THROWS_AS(parse_config(minimal_config(
                        R"({"name":"inkheart","mode":"grid","gamma_grid":[0.5],"k_grid":[3]})")),
                    ConfigError);  // k above d
    CHECK_THROWS_AS(parse_config(minimal_config(
                        R"({"name":"inkheart","mode":"theorem"})")),
                    ConfigError);  // theorem mode needs a grad_norm_sq target
  }
  SUBCASE("cluster lists must match n") {
    const std::string text = std::string("{") +
        R"("problem":{"family":"block_quadratic","d":2,"lambda":0.5,"n":3},)" +
        R"("cluster":{"h":[0.1,0.2],"tau":0.25,"kappa":0.25},)" +
        R"("methods":[{"name":"sync_sgd","mode":"grid","gamma_grid":[0.5]}]})";
    CHECK_THROWS_AS(parse_config(text), ConfigError);
  }
}

TEST_CASE("grid search picks the fastest stable step size") {
  // Noiseless baseline on the two-block quadratic: per-iteration virtual time
  // is constant, so time-to-threshold ranks by iteration count. The exact
  // iterate recursion is x1 <- (1-g) x1, x2 <- (1-g/2) x2; the largest grid
  // value that still contracts the unit block wins.
  const auto cfg = parse_config(minimal_config(
      R"({"name":"sync_sgd","mode":"grid","gamma_grid":[0.25,0.5,1.0,2.0,4.0]})"));
  const auto instance = cfg.build_instance();
  const auto cluster = cfg.build_cluster();

  // closed-form iteration counts per gamma
  const double x0 = instance.start_point()[0];
  const double thr = 1e-10;
  std::map<double, double> iters;
  for (double g : {0.25, 0.5, 1.0}) {
    double a = x0, b = x0;
    int k = 0;
    while (0.5 * a * a + 0.25 * b * b > thr) {
      a *= (1.0 - g);
      b *= (1.0 - 0.5 * g);
      ++k;
    }
    iters[g] = k;
  }
  // gamma=2 leaves the unit block oscillating forever; gamma=4 diverges.

  const auto best = grid_search(cfg, cfg.methods[0], instance, cluster);
  REQUIRE(best.has_value());
  CHECK(best->config.gamma == doctest::Approx(1.0));
  const double per_iter = 2 * 0.25 + 2 * 0.25;
  CHECK(best->median_time_to_threshold == doctest::Approx(iters[1.0] * per_iter));

  SUBCASE("single-cell grid returns that cell") {
    auto one = cfg;
    one.methods[0].gamma_grid = {0.25};
    const auto r = grid_search(one, one.methods[0], instance, cluster);
    REQUIRE(r.has_value());
    CHECK(r->config.gamma == doctest::Approx(0.25));
  }
  SUBCASE("a diverging cell loses to a converging one") {
    auto two = cfg;
    two.methods[0].gamma_grid = {4.0, 0.5};
    const auto r = grid_search(two, two.methods[0], instance, cluster);
    REQUIRE(r.has_value());
    CHECK(r->config.gamma == doctest::Approx(0.5));
  }
  SUBCASE("an all-diverged grid reports failure") {
    auto bad = cfg;
    bad.methods[0].gamma_grid = {1e6, 1e7};
    CHECK(!grid_search(bad, bad.methods[0], instance, cluster).has_value());
  }
}

TEST_CASE("experiment pipeline") {
  namespace fs = std::filesystem;
  const std::string methods =
      R"({"name":"sync_sgd","mode":"grid","gamma_grid":[1.0]},)"
      R"({"name":"inkheart","mode":"grid","gamma_grid":[0.5],"k_grid":[1]},)"
      R"({"name":"m4","mode":"grid","gamma_grid":[0.5],"k_grid":[1],"eta_grid":[1.0]})";
  auto cfg = parse_config(minimal_config(methods, R"(,"trace_every":5)"));
  cfg.seeds = {1, 2};
  cfg.stopping.max_iterations = 400;

  const fs::path dir_a = fs::temp_directory_path() / "csgd_test_out_a";
  const fs::path dir_b = fs::temp_directory_path() / "csgd_test_out_b";
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);

  const auto res = run_experiment(cfg, dir_a.string());
  CHECK(res.methods.size() == 3);
  CHECK(!res.any_method_all_diverged);

  // 3 methods x 1 cell x 2 seeds: one trace + one metadata file each,
  // plus summary.csv and the resolved-config echo.
  int traces = 0, metas = 0;
  for (const auto& e : fs::directory_iterator(dir_a)) {
    const auto name = e.path().filename().string();
    if (name.find(".meta.json") != std::string::npos) {
      ++metas;
    } else if (name.find(".csv") != std::string::npos && name != "summary.csv") {
      ++traces;
    }
  }
  CHECK(traces == 6);
  CHECK(metas == 6);
  CHECK(fs::exists(dir_a / "summary.csv"));
  CHECK(fs::exists(dir_a / "resolved_config.json"));

  // summary holds one row per method
  const std::string summary = read_file(dir_a / "summary.csv");
  CHECK(std::count(summary.begin(), summary.end(), '\n') == 4);  // header + 3 rows

  // metadata embeds the resolved method config and structure constants
  const std::string meta = read_file(dir_a / "m0_sync_sgd_cell0_seed1.meta.json");
  CHECK(meta.find("\"method_config\"") != std::string::npos);
  CHECK(meta.find("\"structure_constants\"") != std::string::npos);
  CHECK(meta.find("\"L_max\"") != std::string::npos);

  // byte-identical on re-run
  run_experiment(cfg, dir_b.string());
  const auto a = dir_contents(dir_a);
  const auto b = dir_contents(dir_b);
  REQUIRE(a.size() == b.size());
  for (const auto& [name, bytes] : a) {
    REQUIRE(b.count(name) == 1);
    CHECK(bytes == b.at(name));
  }
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
}

TEST_CASE("divergent grids are reported through the experiment result") {
  auto cfg = parse_config(minimal_config(
      R"({"name":"sync_sgd","mode":"grid","gamma_grid":[1e6]})"));
  cfg.stopping.max_iterations = 5000;
  const auto dir = std::filesystem::temp_directory_path() / "csgd_test_out_div";
  std::filesystem::remove_all(dir);
  const auto res = run_experiment(cfg, dir.string());
  CHECK(res.any_method_all_diverged);
  CHECK(res.summary_csv.find("all_diverged") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("theorem-mode cells resolve through the schedules") {
  const std::string text = R"({
    "problem": {"family":"block_quadratic","d":10,"lambda":0.5,"n":4},
    "cluster": {"h":0.1,"tau":0.2,"kappa":0.3},
    "noise": {"sigma":0.01},
    "stopping": {"grad_norm_sq":1e-4,"max_iterations":10},
    "methods":[{"name":"inkheart","mode":"theorem"},
               {"name":"m4","mode":"theorem"},
               {"name":"sync_sgd","mode":"theorem"},
               {"name":"inkheart_heter","mode":"theorem"}]
  })";
  const auto cfg = parse_config(text);
  const auto instance = cfg.build_instance();
  const auto cluster = cfg.build_cluster();
  for (const auto& m : cfg.methods) {
    const auto cells = resolve_cells(cfg, m, instance, cluster);
    REQUIRE(cells.size() == 1);
    CHECK(cells[0].gamma > 0.0);
    if (m.name == "inkheart") CHECK(cells[0].k_up == 1);
    if (m.name == "m4") {
      CHECK(cells[0].p == doctest::Approx(cells[0].k_up / 10.0));
      CHECK(cells[0].b_init >= 1);
    }
    if (m.name == "inkheart_heter") {
      CHECK(cells[0].beta.size() == 4);
      CHECK(std::isfinite(cells[0].s_star));
    }
  }
}

TEST_CASE("parallel execution does not change the output bytes") {
  namespace fs = std::filesystem;
  auto cfg = parse_config(minimal_config(
      R"({"name":"inkheart","mode":"grid","gamma_grid":[0.5,0.25],"k_grid":[1,2]})"));
  cfg.seeds = {4, 5};
  cfg.stopping.max_iterations = 300;
  const fs::path serial = fs::temp_directory_path() / "csgd_test_serial";
  const fs::path parallel = fs::temp_directory_path() / "csgd_test_parallel";
  fs::remove_all(serial);
  fs::remove_all(parallel);
  run_experiment(cfg, serial.string(), 1);
  run_experiment(cfg, parallel.string(), 4);
  const auto a = dir_contents(serial);
  const auto b = dir_contents(parallel);
  REQUIRE(a.size() == b.size());
  for (const auto& [name, bytes] : a) CHECK(bytes == b.at(name));
  fs::remove_all(serial);
  fs::remove_all(parallel);
}
