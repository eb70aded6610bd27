// Copyright 2026 The habitcons Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "habitcons/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "habitcons/csv.hpp"
#include "habitcons/error.hpp"

namespace habitcons {

GridSpec default_grid(const Policy& policy, std::size_t n_x, double dt, std::size_t n_c, double tol) {
  const Parameters& p = policy.params();
  GridSpec g;
  g.x_min = policy.x_under();
  g.x_max = policy.regime() == Regime::Patient ? 2.0 * policy.derived().x0 : 4.0 * policy.x_under();
  g.n_x = n_x;
  g.dt = dt;
  g.tol = tol;
  const double c_max = 2.0 * std::max(p.alpha, c_star(policy, g.x_max));
  g.c_grid.resize(n_c);
  const double step = std::log(c_max / p.alpha) / static_cast<double>(n_c - 1);
  for (std::size_t j = 0; j < n_c; ++j) g.c_grid[j] = p.alpha * std::exp(step * static_cast<double>(j));
  g.c_grid.front() = p.alpha;
  return g;
}

void check_grid(const Parameters& p, const GridSpec& g) {
  if (g.n_x < 3) throw ConfigError("grid needs at least 3 nodes");
  if (!(g.dt > 0.0) || !(g.tol > 0.0)) throw ConfigError("dt and tol must be positive");
  if (g.c_grid.empty()) throw ConfigError("empty action grid");
  if (std::abs(g.x_min - safe_level(p)) > 1e-12 * std::max(1.0, g.x_min)) {
    throw ConfigError("grid must start at the safe level");
  }
  const DerivedConstants d = derived_constants(p);
  const double need = d.regime == Regime::Patient ? d.x0 : 3.0 * d.x_under;
  if (!(g.x_max > need)) throw ConfigError("x_max too small for the regime");
  if (g.dt * (p.r + p.rho) * g.x_max >= 1.0) throw ConfigError("dt violates the stability bound");
  for (std::size_t j = 0; j < g.c_grid.size(); ++j) {
    if (g.c_grid[j] < p.alpha || (j > 0 && g.c_grid[j] <= g.c_grid[j - 1])) {
      throw ConfigError("action grid must be increasing and >= alpha");
    }
  }
}

OracleResult value_iterate(const Parameters& p, const GridSpec& g) {
  check_grid(p, g);
  const std::size_t nx = g.n_x;
  const std::size_t nc = g.c_grid.size();
  const double hx = (g.x_max - g.x_min) / static_cast<double>(nx - 1);
  const double discount = std::exp(-p.delta() * g.dt);
  const double floor_tol = 1e-12 * g.x_min;

  OracleResult res;
  res.x.resize(nx);
  for (std::size_t i = 0; i < nx; ++i) res.x[i] = g.x_min + hx * static_cast<double>(i);
  res.x.back() = g.x_max;

  std::vector<double> reward(nc);
  for (std::size_t j = 0; j < nc; ++j) {
    reward[j] = g.dt * std::pow(g.c_grid[j], 1.0 - p.gamma) / (1.0 - p.gamma);
  }

  // Transition table: interpolation cell and weight per (node, action).
  std::vector<std::uint32_t> cell(nx * nc);
  std::vector<double> weight(nx * nc);
  std::vector<std::size_t> n_feasible(nx);
  for (std::size_t i = 0; i < nx; ++i) {
    const double x = res.x[i];
    std::size_t count = 0;
    for (std::size_t j = 0; j < nc; ++j) {
      const double c = g.c_grid[j];
      double xn = x + g.dt * ((p.r + p.rho) * x - (1.0 + p.rho * x) * c);
      if (xn < g.x_min - floor_tol) break;  // next state decreases in c
      xn = std::clamp(xn, g.x_min, g.x_max);
      const double s = (xn - g.x_min) / hx;
      auto k = static_cast<std::size_t>(std::floor(s));
      k = std::min(k, nx - 2);
      cell[i * nc + j] = static_cast<std::uint32_t>(k);
      weight[i * nc + j] = s - static_cast<double>(k);
      ++count;
    }
    if (count == 0) throw NoFeasibleAction("no feasible action at x = " + std::to_string(x));
    n_feasible[i] = count;
  }

  std::vector<double> v(nx, std::pow(p.alpha, 1.0 - p.gamma) / (p.delta() * (1.0 - p.gamma)));
  std::vector<double> v_next(nx);
  std::vector<std::size_t> best(nx, 0);

  auto q = [&](std::size_t i, std::size_t j) {
    const std::size_t at = i * nc + j;
    const std::size_t k = cell[at];
    const double w = weight[at];
    return reward[j] + discount * ((1.0 - w) * v[k] + w * v[k + 1]);
  };

  auto sweep = [&](bool full) {
    double change = 0.0;
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t n = n_feasible[i];
      std::size_t j = std::min(best[i], n - 1);
      double qj = q(i, j);
      if (full) {
        for (std::size_t k = 0; k < n; ++k) {
          const double qk = q(i, k);
          if (qk > qj) {
            qj = qk;
            j = k;
          }
        }
      } else {
        // The objective is concave in c, so a local climb finds the maximum.
        while (j + 1 < n) {
          const double up = q(i, j + 1);
          if (up <= qj) break;
          qj = up;
          ++j;
        }
        while (j > 0) {
          const double down = q(i, j - 1);
          if (down <= qj) break;
          qj = down;
          --j;
        }
      }
      best[i] = j;
      v_next[i] = qj;
      change = std::max(change, std::abs(qj - v[i]));
    }
    v.swap(v_next);
    return change;
  };

  bool full = false;
  for (std::size_t it = 1; it <= g.max_iter; ++it) {
    const double change = sweep(full);
    res.iterations = it;
    res.final_change = change;
    if (change < g.tol) {
      if (full) break;
      full = true;  // confirm with exhaustive maximization before accepting
    }
    if (it == g.max_iter) throw NonConvergence("value iteration hit its iteration budget");
  }

  res.v_hat = v;
  res.c_greedy.resize(nx);
  for (std::size_t i = 0; i < nx; ++i) res.c_greedy[i] = g.c_grid[best[i]];
  return res;
}

double evaluate_policy(const Parameters& p, const Feedback& feedback, const InitialState& init, double horizon) {
  const Feedback checked = [&](double x) {
    const double c = feedback(x);
    if (!(c >= p.alpha * (1.0 - 1e-12))) {
      throw InadmissiblePolicy("feedback rate " + std::to_string(c) + " is below alpha at x = " + std::to_string(x));
    }
    return c;
  };
  SimulationOptions o;
  o.horizon = horizon;
  o.sample_dt = horizon;
  return simulate_feedback(p, checked, init, o, std::nullopt, std::nullopt).objective;
}

OracleComparison compare(const OracleResult& oracle, const Policy& policy, const GridSpec& grid) {
  OracleComparison cmp;
  const double cut = grid.x_min + 0.9 * (grid.x_max - grid.x_min);
  cmp.v_analytic.resize(oracle.x.size());
  cmp.abs_err.resize(oracle.x.size());
  for (std::size_t i = 0; i < oracle.x.size(); ++i) {
    const double v = value(policy, oracle.x[i]);
    cmp.v_analytic[i] = v;
    cmp.abs_err[i] = std::abs(oracle.v_hat[i] - v);
    if (oracle.x[i] <= cut) {
      ++cmp.interior_nodes;
      cmp.max_abs_err_interior = std::max(cmp.max_abs_err_interior, cmp.abs_err[i]);
      cmp.max_rel_err_interior = std::max(cmp.max_rel_err_interior, cmp.abs_err[i] / std::abs(v));
    }
  }
  return cmp;
}

std::string oracle_csv(const OracleResult& oracle, const OracleComparison& cmp) {
  std::string out;
  append_row(out, {"x", "V_hat", "V_analytic", "abs_err"});
  for (std::size_t i = 0; i < oracle.x.size(); ++i) {
    append_row(out, {format_number(oracle.x[i]), format_number(oracle.v_hat[i]), format_number(cmp.v_analytic[i]),
                     format_number(cmp.abs_err[i])});
  }
  return out;
}

nlohmann::json convergence_json(const OracleResult& oracle, const OracleComparison& cmp) {
  return {{"iterations", oracle.iterations},
          {"final_change", oracle.final_change},
          {"interior_nodes", cmp.interior_nodes},
          {"max_rel_err_interior", cmp.max_rel_err_interior},
          {"max_abs_err_interior", cmp.max_abs_err_interior}};
}

}  // namespace habitcons
