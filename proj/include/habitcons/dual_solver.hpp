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
#include <vector>

#include "habitcons/model.hpp"
#include "json.hpp"

namespace habitcons {

struct DualSolverOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double h_max = 0.02;            ///< largest step in log-consumption
  double eps_initial = 1e-6;      ///< relative offset from the singular point
  double eps_rel_change = 1e-8;   ///< y_alpha acceptance under halving of eps
  int max_halvings = 20;
  double x_cap_factor = 1e6;      ///< table reaches x = x_cap_factor * x_under
  double boundary_offset = 1e-8;  ///< relative psi offset for the boundary regime
  double strip_tolerance = 1e-9;
};

/// Tabulated solution of the dual problem.
///
/// The curve y(psi) is stored in the coordinates l = ln c, with
/// psi = c^(-gamma), and m = ln(psi / y) = ln(1 + rho x). Along the curve m
/// is strictly increasing in l. Each node carries m, dm/dl and d2m/dl2 so
/// the table is interpolated by quintic Hermite polynomials. The second
/// derivative is undefined at the patient singular point; segments touching
/// that node fall back to cubic Hermite.
class DualSolution {
 public:
  struct Node {
    double ell = 0.0;
    double m = 0.0;
    double dm = 0.0;
    double d2m = 0.0;  ///< NaN at the singular node
  };

  DualSolution(Parameters params, DerivedConstants derived, std::vector<Node> nodes, double y_alpha,
               double eps_used, DualSolverOptions options);

  const Parameters& params() const noexcept { return params_; }
  const DerivedConstants& derived() const noexcept { return derived_; }
  /// Patient or Impatient; the boundary case is solved as impatient.
  Regime regime() const noexcept { return regime_; }
  double y_alpha() const noexcept { return y_alpha_; }
  /// Upper dual boundary; nullopt stands for +infinity (patient regime).
  std::optional<double> y_bar() const noexcept;
  /// Coefficient C of u(y) = C y^(-beta) - x_under y + const above y_alpha (patient only, else 0).
  double closed_form_coeff() const noexcept;
  double beta() const noexcept { return beta_; }
  double eps_used() const noexcept { return eps_used_; }
  const DualSolverOptions& options() const noexcept { return options_; }
  const std::vector<Node>& nodes() const noexcept { return nodes_; }

  /// Largest wealth-to-habit ratio covered by the table.
  double x_max() const noexcept;
  /// Smallest dual value covered by the table (at x_max).
  double y_min() const noexcept;
  /// Index of the singular node, if any.
  std::optional<std::size_t> singular_index() const noexcept { return singular_; }

  /// m at log-consumption ell, ell within the tabulated range.
  double m_at(double ell) const;
  /// Inverse of m_at. Throws DomainError outside the table.
  double ell_of_m(double m) const;
  /// ell such that ln y(ell) = log_y. Throws DomainError outside the table.
  double ell_of_log_y(double log_y) const;

  /// y as a function of psi on the tabulated part of (0, alpha^(-gamma)].
  double y_of_psi(double psi) const;
  /// Inverse of y_of_psi for y in [y_min, y_alpha].
  double psi_of_y(double y) const;

 private:
  std::size_t segment_for(double ell) const;
  double interpolate(std::size_t i, double ell) const;

  Parameters params_;
  DerivedConstants derived_;
  Regime regime_;
  std::vector<Node> nodes_;
  std::optional<std::size_t> singular_;
  double y_alpha_;
  double beta_ = 0.0;
  double c_prime_ = 0.0;  ///< coefficient in the normalized form C' (y / y_alpha)^(-beta)
  double eps_used_;
  DualSolverOptions options_;
};

DualSolution solve_impatient(const Parameters& params, const DerivedConstants& derived,
                             const DualSolverOptions& options = {});
DualSolution solve_patient(const Parameters& params, const DerivedConstants& derived,
                           const DualSolverOptions& options = {});
/// Dispatches on the regime.
DualSolution solve_dual(const Parameters& params, const DualSolverOptions& options = {});

/// u(y) for 0 < y <= y_bar. Throws DomainError outside the solved range.
double u_value(const DualSolution& sol, double y);
/// u'(y) for 0 < y <= y_bar.
double u_prime(const DualSolution& sol, double y);
/// The y with u'(y) = xi, for xi < -x_under.
double invert_u_prime(const DualSolution& sol, double xi);

/// Right side of the dual ODE dy/dpsi.
double dual_rhs(const Parameters& params, double psi, double y);

nlohmann::json to_json(const DualSolution& sol);

}  // namespace habitcons
