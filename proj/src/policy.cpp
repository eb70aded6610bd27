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


#include "habitcons/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "habitcons/error.hpp"

namespace habitcons {

namespace {

double clamp_state(const Policy& policy, double x) {
  const double x_under = policy.x_under();
  if (!std::isfinite(x) || x < x_under - kStateTolerance * std::max(1.0, x_under)) {
    throw DomainError("wealth-to-habit ratio " + std::to_string(x) + " is below the safe level " +
                      std::to_string(x_under));
  }
  return std::max(x, x_under);
}

// Point on the tabulated branch x >= x_alpha.
struct TablePoint {
  double c, y;
};

TablePoint table_point(const Policy& policy, double x) {
  const double m = std::log1p(policy.params().rho * x);
  const double ell = policy.dual().ell_of_m(m);
  return {std::exp(ell), std::exp(-policy.params().gamma * ell - m)};
}

// Patient closed form below x_alpha: q = (x - x_under) y_alpha / (beta C').
double closed_form_q(const Policy& policy, double x) {
  const DualSolution& d = policy.dual();
  const double c_prime = d.closed_form_coeff() * std::pow(d.y_alpha(), -d.beta());
  return (x - policy.x_under()) * d.y_alpha() / (d.beta() * c_prime);
}

double floor_value(const Parameters& p) {
  return std::pow(p.alpha, 1.0 - p.gamma) / (p.delta() * (1.0 - p.gamma));
}

// First derivative of fn at x by a second-order stencil that stays on one
// smooth piece of [x_under, x_alpha] or [x_alpha, inf).
template <class F>
double derivative(const Policy& policy, F&& fn, double x) {
  const double lo = policy.x_under();
  const double kink = policy.regime() == Regime::Patient ? policy.x_alpha() : lo;
  const double piece_lo = x < kink ? lo : kink;
  const double piece_hi = x < kink ? kink : std::numeric_limits<double>::infinity();
  double h = fd_step(x);
  for (int attempt = 0; attempt < 40; ++attempt, h *= 0.25) {
    if (x - h >= piece_lo && x + h <= piece_hi) return (fn(x + h) - fn(x - h)) / (2.0 * h);
    if (x + 2.0 * h <= piece_hi && x >= piece_lo) {
      return (-3.0 * fn(x) + 4.0 * fn(x + h) - fn(x + 2.0 * h)) / (2.0 * h);
    }
    if (x - 2.0 * h >= piece_lo && x <= piece_hi) {
      return (3.0 * fn(x) - 4.0 * fn(x - h) + fn(x - 2.0 * h)) / (2.0 * h);
    }
  }
  throw DomainError("no finite-difference stencil fits at x = " + std::to_string(x));
}

}  // namespace

Policy::Policy(std::shared_ptr<const DualSolution> dual)
    : dual_(std::move(dual)), x_alpha_(habitcons::x_alpha(*dual_)) {}

Policy make_policy(const Parameters& params, const DualSolverOptions& options) {
  return Policy(std::make_shared<const DualSolution>(solve_dual(params, options)));
}

double x_alpha(const DualSolution& dual) {
  const Parameters& p = dual.params();
  if (dual.regime() != Regime::Patient) return dual.derived().x_under;
  return dual.derived().alpha_pow / (p.rho * dual.y_alpha()) - 1.0 / p.rho;
}

double c_star(const Policy& policy, double x) {
  x = clamp_state(policy, x);
  if (x <= policy.x_alpha()) return policy.params().alpha;
  return table_point(policy, x).c;
}

double value(const Policy& policy, double x) {
  x = clamp_state(policy, x);
  const Parameters& p = policy.params();
  if (policy.regime() == Regime::Patient && x < policy.x_alpha()) {
    if (x == policy.x_under()) return floor_value(p);
    const double beta = policy.dual().beta();
    const double c_prime = policy.dual().closed_form_coeff() * std::pow(policy.dual().y_alpha(), -beta);
    return c_prime * (1.0 + beta) * std::pow(closed_form_q(policy, x), beta / (beta + 1.0)) + floor_value(p);
  }
  const TablePoint tp = table_point(policy, x);
  return ((p.r + p.rho) * x * tp.y + p.gamma * std::pow(tp.c, 1.0 - p.gamma) / (1.0 - p.gamma)) / p.delta();
}

double v_prime(const Policy& policy, double x) {
  x = clamp_state(policy, x);
  if (policy.regime() == Regime::Patient && x < policy.x_alpha()) {
    if (x == policy.x_under()) return std::numeric_limits<double>::infinity();
    const double beta = policy.dual().beta();
    return policy.dual().y_alpha() * std::pow(closed_form_q(policy, x), -1.0 / (beta + 1.0));
  }
  return table_point(policy, x).y;
}

double fd_step(double x) { return std::max(1e-6, 1e-5 * std::abs(x)); }

double hjb_residual(const Policy& policy, double x) {
  const Parameters& p = policy.params();
  const double v = value(policy, x);
  const double vp = derivative(policy, [&](double s) { return value(policy, s); }, x);
  const double marginal = (1.0 + p.rho * x) * vp;
  const double c = std::max(p.alpha, std::pow(marginal, -1.0 / p.gamma));
  const double hamiltonian = std::pow(c, 1.0 - p.gamma) / (1.0 - p.gamma) - marginal * c;
  return -p.delta() * v + (p.r + p.rho) * x * vp + hamiltonian;
}

double variational_gap(const Policy& policy, double x) {
  return (1.0 + policy.params().rho * x) * v_prime(policy, x) - policy.derived().alpha_pow;
}

bool variational_flag_holds(const Policy& policy, double x) {
  const double gap = variational_gap(policy, x);
  if (x <= policy.x_alpha()) return gap >= -1e-12 * policy.derived().alpha_pow;
  return gap < 0.0;
}

double c_star_ode_check(const Policy& policy, double x) {
  const Parameters& p = policy.params();
  const double c = c_star(policy, x);
  const double dc = derivative(policy, [&](double s) { return c_star(policy, s); }, x);
  const double x0 = policy.derived().x0;
  const double q = 1.0 + p.rho * x;
  return (c - (p.r + p.rho) * x / q) * dc - p.delta() * p.rho / p.gamma * (x - x0) / (q * q) * c;
}

}  // namespace habitcons
