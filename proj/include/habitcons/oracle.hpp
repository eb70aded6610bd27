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


#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "habitcons/model.hpp"
#include "habitcons/policy.hpp"
#include "habitcons/trajectory.hpp"
#include "json.hpp"

namespace habitcons {

struct GridSpec {
  double x_min = 0.0;  ///< the safe level
  double x_max = 0.0;
  std::size_t n_x = 800;
  double dt = 0.01;
  std::vector<double> c_grid;  ///< candidate rates, increasing, all >= alpha
  double tol = 1e-9;
  std::size_t max_iter = 2'000'000;
};

/// Default desk-scale grid. x_max is 2 x0 (patient) or 4 x_under (impatient);
/// the action grid holds n_c log-spaced rates on [alpha, 2 max(alpha, c*(x_max))].
GridSpec default_grid(const Policy& policy, std::size_t n_x = 800, double dt = 0.01, std::size_t n_c = 400,
                      double tol = 1e-9);

/// Throws ConfigError when the grid breaks its invariants.
void check_grid(const Parameters& params, const GridSpec& grid);

struct OracleResult {
  std::vector<double> x;
  std::vector<double> v_hat;
  std::vector<double> c_greedy;
  std::size_t iterations = 0;
  double final_change = 0.0;
};

/// Discrete-time value iteration with explicit Euler transitions and linear
/// interpolation. Transitions leaving [x_min, x_max] are clipped, actions that
/// would land below the safe level are excluded.
OracleResult value_iterate(const Parameters& params, const GridSpec& grid);

/// Objective of a feedback rule from init. Throws InadmissiblePolicy if the rule
/// dips below alpha or pushes the state under the safe level.
double evaluate_policy(const Parameters& params, const Feedback& feedback, const InitialState& init,
                       double horizon = 200.0);

struct OracleComparison {
  std::vector<double> v_analytic;
  std::vector<double> abs_err;
  double max_rel_err_interior = 0.0;
  double max_abs_err_interior = 0.0;
  std::size_t interior_nodes = 0;
};

/// Interior nodes are those with x <= x_min + 0.9 (x_max - x_min).
OracleComparison compare(const OracleResult& oracle, const Policy& policy, const GridSpec& grid);

/// CSV with header x,V_hat,V_analytic,abs_err.
std::string oracle_csv(const OracleResult& oracle, const OracleComparison& cmp);
nlohmann::json convergence_json(const OracleResult& oracle, const OracleComparison& cmp);

}  // namespace habitcons
