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
#include "csgd/tuner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "csgd/rng.hpp"

namespace csgd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int64_t kCountSafetyLimit = 1000000000000LL;  // keeps b*h finite in double math

int64_t budget_count(double t, double cost, int64_t zero_cap) {
  if (cost == 0.0) return zero_cap;
  const double q = std::floor(t / cost);
  if (q < 1.0) return 1;
  if (q > static_cast<double>(kCountSafetyLimit)) return kCountSafetyLimit;
  return static_cast<int64_t>(q);
}

// Reciprocal-sum left-hand side psi(s) = sum_i 1 / D_i(s); the balance
// equation is psi(s) = 1. psi is strictly increasing in s.
double balance_psi(const std::vector<WorkerProfile>& workers, double kappa_max,
                   double omega, double omega_s, double sigma_sq_full,
                   double epsilon, int d, double s) {
  CompensatedSum acc;
  for (const auto& w : workers) {
    const double a = 16.0 * omega * w.tau + 16.0 * sigma_sq_full * w.h / epsilon;
    const double b = 32.0 * sigma_sq_full * omega * w.h * w.tau / epsilon +
                     4.0 * d * omega_s * kappa_max * w.kappa;
    const double c = 8.0 * d * omega_s * omega * kappa_max * w.kappa * w.tau;
    const double denom = a / s + b / (s * s) + c / (s * s * s);
    if (denom == 0.0) return kInf;
    acc.add(1.0 / denom);
  }
  return acc.value();
}

}  // namespace

EquilibriumResult equilibrium_solve(const std::vector<WorkerProfile>& workers,
                                    double omega, double omega_s,
                                    double sigma_sq_full, double epsilon, int d) {
  if (workers.empty()) throw std::invalid_argument("equilibrium: needs at least one worker");
  if (epsilon <= 0.0) throw std::invalid_argument("equilibrium: epsilon must be positive");
  for (const auto& w : workers) {
    if (!(w.h >= 0.0) || !(w.tau >= 0.0) || !(w.kappa >= 0.0) ||
        !std::isfinite(w.h) || !std::isfinite(w.tau) || !std::isfinite(w.kappa)) {
      throw std::invalid_argument("equilibrium: costs must be finite and nonnegative");
    }
  }
  double kappa_max = 0.0;
  for (const auto& w : workers) kappa_max = std::max(kappa_max, w.kappa);

  // A worker with all-zero cost terms contributes an infinite reciprocal for
  // every s, so the equation has no positive root.
  bool free_system = true;
  for (const auto& w : workers) {
    const double a = 16.0 * omega * w.tau + 16.0 * sigma_sq_full * w.h / epsilon;
    const double b = 32.0 * sigma_sq_full * omega * w.h * w.tau / epsilon +
                     4.0 * d * omega_s * kappa_max * w.kappa;
    const double c = 8.0 * d * omega_s * omega * kappa_max * w.kappa * w.tau;
    if (a != 0.0 || b != 0.0 || c != 0.0) {
      free_system = false;
    } else {
      return EquilibriumResult{0.0, true};
    }
  }
  if (free_system) return EquilibriumResult{0.0, true};

  auto psi = [&](double s) {
    return balance_psi(workers, kappa_max, omega, omega_s, sigma_sq_full, epsilon, d, s);
  };

  double hi = 1.0;
  int guard = 0;
  while (psi(hi) < 1.0) {
    hi *= 2.0;
    if (++guard > 4000) throw std::runtime_error("equilibrium: failed to bracket the root");
  }
  double lo = hi;
  guard = 0;
  while (psi(lo) >= 1.0) {
    lo *= 0.5;
    if (++guard > 4000) throw std::runtime_error("equilibrium: failed to bracket the root");
  }
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    const double v = psi(mid);
    if (std::abs(1.0 / v - 1.0) <= 1e-12) break;
    if (v < 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    if ((hi - lo) <= 1e-12 * hi) {
      mid = 0.5 * (lo + hi);
      break;
    }
  }
  return EquilibriumResult{mid, false};
}

std::pair<double, double> cubic_bracket(double a, double b, double c) {
  if (!(a > 0.0) || !(b > 0.0) || !(c > 0.0)) {
    throw std::invalid_argument("cubic_bracket: coefficients must be strictly positive");
  }
  const double xbar = 1.0 / std::max({std::cbrt(a), std::sqrt(b), c});
  return {0.5 * xbar, xbar};
}

std::vector<double> inkheart_weights(const std::vector<int64_t>& b,
                                     const std::vector<int64_t>& m,
                                     const std::vector<int64_t>& l, double omega,
                                     double omega_s, double sigma_sq_full,
                                     double epsilon, double p) {
  const std::size_t n = b.size();
  if (n == 0 || m.size() != n || l.size() != n) {
    throw std::invalid_argument("weights: count vectors must be nonempty and equal-sized");
  }
  if (!(p > 0.0) || p > 1.0) throw std::invalid_argument("weights: p must lie in (0, 1]");
  if (sigma_sq_full > 0.0 && epsilon <= 0.0) {
    throw std::invalid_argument("weights: epsilon must be positive when noise is present");
  }
  std::vector<double> w(n);
  double wsum = 0.0;
  bool all_zero = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (b[i] < 1 || m[i] < 1 || l[i] < 1) {
      throw std::invalid_argument("weights: counts must be >= 1");
    }
    const double bi = static_cast<double>(b[i]);
    const double mi = static_cast<double>(m[i]);
    const double li = static_cast<double>(l[i]);
    double inv = 8.0 * omega / mi + omega_s * omega / (p * mi * li) + omega_s / (p * li);
    if (sigma_sq_full > 0.0) {
      inv += 8.0 * sigma_sq_full / (epsilon * bi) +
             8.0 * sigma_sq_full * omega / (epsilon * bi * mi);
    }
    if (inv > 0.0) all_zero = false;
    w[i] = inv > 0.0 ? 1.0 / inv : kInf;
    if (inv > 0.0) wsum += w[i];
  }
  std::vector<double> beta(n);
  if (all_zero) {
    std::fill(beta.begin(), beta.end(), 1.0 / static_cast<double>(n));
    return beta;
  }
  for (std::size_t i = 0; i < n; ++i) beta[i] = w[i] / wsum;
  return beta;
}

bool gamma_floor_check(double gamma, double c, const std::vector<double>& quad_coeffs) {
  if (!(c > 0.0)) throw std::invalid_argument("gamma_floor_check: c must be positive");
  for (double dcoef : quad_coeffs) {
    if (!(dcoef > 0.0)) {
      throw std::invalid_argument("gamma_floor_check: quadratic coefficients must be positive");
    }
  }
  if (!(gamma > 0.0)) return false;
  double threshold;
  if (quad_coeffs.empty()) {
    threshold = 1.0 / (4.0 * c);  // k = 0 reading: halve the exact bound 1/(2c)
  } else {
    double mx = 2.0 * c;
    for (double dcoef : quad_coeffs) mx = std::max(mx, std::sqrt(2.0 * dcoef));
    threshold = 1.0 / ((static_cast<double>(quad_coeffs.size()) + 1.0) * mx);
  }
  return gamma <= threshold;
}

namespace {

struct InkheartBudgetState {
  std::vector<int64_t> b, m, l;
  double p = 1.0;
  std::vector<double> beta;
  double weighted_reciprocal = 0.0;  // sum_i beta_i^2 / w_i
  bool conditions_ok = false;
};

InkheartBudgetState resolve_counts(const ClusterProfile& cluster, double t, double omega,
                                   double omega_s, double sigma_sq_full, double epsilon,
                                   int d, const TunerCaps& caps) {
  const int n = cluster.n();
  InkheartBudgetState st;
  st.b.resize(n);
  st.m.resize(n);
  st.l.resize(n);
  for (int i = 0; i < n; ++i) {
    const auto& w = cluster.workers[i];
    st.b[i] = budget_count(t, w.h, caps.b_max);
    st.m[i] = budget_count(t, w.tau, caps.m_max);
    st.l[i] = budget_count(t, w.kappa, d);  // free downlink: full broadcast
  }
  const double kappa_max = cluster.kappa_max();
  const int64_t l_min = budget_count(t, kappa_max, d);
  st.p = std::min(static_cast<double>(l_min) / d, 1.0);

  st.beta = inkheart_weights(st.b, st.m, st.l, omega, omega_s, sigma_sq_full, epsilon, st.p);

  // Validity: sum beta_i^2 w_i^{-1} <= 1 bounds both convergence conditions.
  CompensatedSum acc;
  for (int i = 0; i < n; ++i) {
    const double bi = static_cast<double>(st.b[i]);
    const double mi = static_cast<double>(st.m[i]);
    const double li = static_cast<double>(st.l[i]);
    double inv = 8.0 * omega / mi + omega_s * omega / (st.p * mi * li) + omega_s / (st.p * li);
    if (sigma_sq_full > 0.0) {
      inv += 8.0 * sigma_sq_full / (epsilon * bi) +
             8.0 * sigma_sq_full * omega / (epsilon * bi * mi);
    }
    acc.add(st.beta[i] * st.beta[i] * inv);
  }
  st.weighted_reciprocal = acc.value();
  st.conditions_ok = st.weighted_reciprocal <= 1.0 + 1e-12;
  return st;
}

double inkheart_gamma(const InkheartBudgetState& st, double omega, double omega_s,
                      double L_max, double L_A) {
  const int n = static_cast<int>(st.b.size());
  CompensatedSum s1;  // sum beta_i^2 (w ws / (p m l) + ws / (p l))
  CompensatedSum s2;  // sum beta_i ws / l
  for (int i = 0; i < n; ++i) {
    const double mi = static_cast<double>(st.m[i]);
    const double li = static_cast<double>(st.l[i]);
    s1.add(st.beta[i] * st.beta[i] *
           (omega * omega_s / (st.p * mi * li) + omega_s / (st.p * li)));
    s2.add(st.beta[i] * omega_s / li);
  }
  double gamma = 1.0 / L_max;
  if (s1.value() > 0.0) gamma = std::min(gamma, 1.0 / (L_max * std::sqrt(s1.value())));
  if (L_A > 0.0 && s2.value() > 0.0) {
    gamma = std::min(gamma, 1.0 / (L_A * std::sqrt(s2.value() / st.p)));
  }
  return gamma / 6.0;
}

MethodConfig inkheart_tune_impl(const ClusterProfile& cluster, double sigma_sq_full,
                                double epsilon, int d, double L_max, double L_A,
                                const TunerCaps& caps, bool heterogeneous) {
  if (epsilon <= 0.0) throw std::invalid_argument("tune: epsilon must be positive");
  if (L_max <= 0.0) throw std::invalid_argument("tune: L_max must be positive");
  const int n = cluster.n();
  const double omega = static_cast<double>(d) - 1.0;
  const double omega_s = omega;

  double t_formula;
  double s_star = std::numeric_limits<double>::quiet_NaN();
  if (!heterogeneous) {
    const double h = cluster.workers[0].h;
    const double tau = cluster.workers[0].tau;
    const double kappa = cluster.workers[0].kappa;
    t_formula = std::max({h, tau, kappa, 16.0 * omega * tau / n,
                          16.0 * sigma_sq_full * h / (n * epsilon),
                          2.0 * d * kappa / std::sqrt(static_cast<double>(n)),
                          std::sqrt(32.0 * d * sigma_sq_full * h * tau / (n * epsilon)),
                          std::cbrt(8.0 * d * d * d * tau * kappa * kappa / n)});
  } else {
    const EquilibriumResult eq =
        equilibrium_solve(cluster.workers, omega, omega_s, sigma_sq_full, epsilon, d);
    s_star = eq.free_system ? 0.0 : eq.s_star;
    t_formula = std::max(cluster.overall_max_cost(), s_star);
  }

  double t = t_formula;
  InkheartBudgetState st = resolve_counts(cluster, t, omega, omega_s, sigma_sq_full,
                                          epsilon, d, caps);
  bool adjusted = false;
  if (!st.conditions_ok) {
    // The conditions are monotone in t. Find the smallest feasible budget;
    // infeasibility can persist only through capped counts.
    adjusted = true;
    double hi = std::max(t, 1e-300);
    int guard = 0;
    InkheartBudgetState cand = st;
    while (!cand.conditions_ok) {
      hi *= 2.0;
      if (++guard > 200) {
        throw std::invalid_argument(
            "tune: convergence conditions unreachable; raise the zero-cost count caps");
      }
      cand = resolve_counts(cluster, hi, omega, omega_s, sigma_sq_full, epsilon, d, caps);
    }
    double lo = t;
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi);
      const InkheartBudgetState ms =
          resolve_counts(cluster, mid, omega, omega_s, sigma_sq_full, epsilon, d, caps);
      if (ms.conditions_ok) {
        hi = mid;
        cand = ms;
      } else {
        lo = mid;
      }
    }
    t = hi;
    st = cand;
  }

  MethodConfig cfg;
  cfg.method = heterogeneous ? "inkheart_heter" : "inkheart";
  cfg.tuning_mode = "theorem";
  cfg.k_up = 1;
  cfg.k_down = 1;
  cfg.b = st.b;
  cfg.m = st.m;
  cfg.l = st.l;
  cfg.p = st.p;
  cfg.beta = st.beta;
  cfg.gamma = inkheart_gamma(st, omega, omega_s, L_max, L_A);
  cfg.time_budget = t;
  cfg.s_star = s_star;
  if (adjusted) cfg.tuning_mode = "theorem(budget_adjusted)";
  if (!heterogeneous) {
    // Collapse identical per-worker counts to shared values.
    cfg.b = {st.b[0]};
    cfg.m = {st.m[0]};
    cfg.l = {st.l[0]};
    cfg.beta.clear();
  }
  return cfg;
}

}  // namespace

MethodConfig inkheart_tune_homog(double h, double tau, double kappa,
                                 double sigma_sq_full, double epsilon, int n, int d,
                                 double L_max, double L_A, const TunerCaps& caps) {
  if (h < 0.0 || tau < 0.0 || kappa < 0.0) {
    throw std::invalid_argument("tune: costs must be nonnegative");
  }
  const ClusterProfile cluster = ClusterProfile::homogeneous_cluster(n, h, tau, kappa);
  return inkheart_tune_impl(cluster, sigma_sq_full, epsilon, d, L_max, L_A, caps, false);
}

MethodConfig inkheart_tune_heter(const ClusterProfile& cluster, double sigma_sq_full,
                                 double epsilon, int d, double L_max, double L_A,
                                 const TunerCaps& caps) {
  return inkheart_tune_impl(cluster, sigma_sq_full, epsilon, d, L_max, L_A, caps, true);
}

MethodConfig m4_tune(double h, double tau, double kappa, double sigma_sq_full,
                     double epsilon, int n, int d, double L_A, double L_B,
                     double L_max, const TunerCaps& caps) {
  if (epsilon <= 0.0) throw std::invalid_argument("tune: epsilon must be positive");
  if (h < 0.0 || tau < 0.0 || kappa < 0.0) {
    throw std::invalid_argument("tune: costs must be nonnegative");
  }
  if (L_max <= 0.0) throw std::invalid_argument("tune: L_max must be positive");

  const double t = std::max({h, tau, kappa,
                             std::cbrt(d * d * tau * tau * h * sigma_sq_full / (n * epsilon))});
  MethodConfig cfg;
  cfg.method = "m4";
  cfg.tuning_mode = "theorem";
  cfg.time_budget = t;
  cfg.k_up = static_cast<int>(std::min<int64_t>(budget_count(t, tau, d), d));
  cfg.k_down = static_cast<int>(std::min<int64_t>(budget_count(t, kappa, d), d));
  cfg.b = {budget_count(t, h, caps.b_max)};
  cfg.m = {1};
  cfg.l = {1};

  const double omega = cfg.omega_up(d);
  const double omega_s = cfg.omega_down(d);
  cfg.p = 1.0 / (omega + 1.0);
  cfg.p_s = 1.0 / (omega_s + 1.0);

  const double b = static_cast<double>(cfg.b[0]);
  double eta = 1.0;
  if (sigma_sq_full > 0.0) {
    if (omega > 0.0) {
      eta = std::min(eta, std::sqrt(b * n * epsilon / (omega * (omega + 1.0) * sigma_sq_full)) / 6.0);
    }
    eta = std::min(eta, b * n * epsilon / (6.0 * sigma_sq_full));
  }
  if (omega > 0.0 && omega_s > 0.0) {
    eta = std::min(eta, std::cbrt(n / (omega * (omega + 1.0) * omega_s)));
  }
  // Clip so the variance condition holds with the exact constants.
  const double va = omega * sigma_sq_full / (n * cfg.p * b);
  const double vb = sigma_sq_full / (n * b);
  if (va > 0.0) {
    const double root = (-3.0 * vb + std::sqrt(9.0 * vb * vb + 18.0 * va * epsilon)) / (18.0 * va);
    eta = std::min(eta, root);
  } else if (vb > 0.0) {
    eta = std::min(eta, epsilon / (6.0 * vb));
  }
  cfg.eta = eta;

  const double inner = omega_s * (omega_s + 1.0) * L_A * L_A +
                       (omega_s / n) * (omega_s + 1.0) * L_B * L_B +
                       (omega * (omega + 1.0) / n + 1.0 / (eta * eta)) * L_max * L_max;
  cfg.gamma = 1.0 / (6.0 * std::sqrt(1416.0 * inner));

  cfg.b_init = static_cast<int64_t>(
      std::ceil(std::sqrt((b / eta) * (1.0 + sigma_sq_full / (n * epsilon)))));
  cfg.b_init = std::max<int64_t>(cfg.b_init, 1);

  const double noise_lhs = 9.0 * eta * eta * va + 3.0 * eta * vb;
  if (noise_lhs > epsilon / 2.0 + 1e-12 * epsilon) {
    throw std::logic_error("m4 tune: variance condition violated after clipping");
  }
  return cfg;
}

}  // namespace csgd
