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

#include <memory>

#include "habitcons/dual_solver.hpp"
#include "habitcons/model.hpp"

namespace habitcons {

/// Primal objects recovered from a dual solution: the free boundary x_alpha,
/// the optimal consumption-to-habit rate c*(x) and the value function v(x).
class Policy {
 public:
  explicit Policy(std::shared_ptr<const DualSolution> dual);

  const DualSolution& dual() const noexcept { return *dual_; }
  std::shared_ptr<const DualSolution> dual_ptr() const noexcept { return dual_; }
  const Parameters& params() const noexcept { return dual_->params(); }
  const DerivedConstants& derived() const noexcept { return dual_->derived(); }
  Regime regime() const noexcept { return dual_->regime(); }
  double x_alpha() const noexcept { return x_alpha_; }
  double x_under() const noexcept { return dual_->derived().x_under; }
  /// Largest ratio the policy can be evaluated at.
  double x_max() const noexcept { return dual_->x_max(); }

 private:
  std::shared_ptr<const DualSolution> dual_;
  double x_alpha_;
};

/// Solves the dual problem and wraps it.
Policy make_policy(const Parameters& params, const DualSolverOptions& options = {});

/// alpha^(-gamma) / (rho y_alpha) - 1 / rho.
double x_alpha(const DualSolution& dual);

/// Slack allowed below x_under before a query is rejected.
inline constexpr double kStateTolerance = 1e-10;

double c_star(const Policy& policy, double x);
double value(const Policy& policy, double x);
/// v'(x) = J(-x), evaluated exactly from the dual solution.
double v_prime(const Policy& policy, double x);

/// Finite-difference step used by the residual checks.
double fd_step(double x);

/// HJB residual at x with v' from finite differences of value().
double hjb_residual(const Policy& policy, double x);

/// (1 + rho x) v'(x) - alpha^(-gamma); nonnegative up to x_alpha, negative beyond.
double variational_gap(const Policy& policy, double x);
/// True when the sign of variational_gap agrees with the side of x_alpha.
bool variational_flag_holds(const Policy& policy, double x);

/// Defect of the first-order ODE satisfied by c* above x_alpha.
double c_star_ode_check(const Policy& policy, double x);

}  // namespace habitcons
