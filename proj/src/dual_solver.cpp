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


#include "habitcons/dual_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "habitcons/error.hpp"
#include "habitcons/ode.hpp"
#include "habitcons/roots.hpp"

namespace habitcons {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// The dual ODE rewritten for m(l), with l = ln c and m = ln(1 + rho x):
//   dm/dl = -gamma [1 - a (c0 - c) / (E - k)],  E = exp(-m) = y / psi.
struct Field {
  double gamma, a, k, c0;

  explicit Field(const Parameters& p)
      : gamma(p.gamma),
        a(p.rho / (p.r + p.rho)),
        k(p.delta() / (p.r + p.rho)),
        c0((p.r + p.rho - p.delta()) / p.rho) {}

  double slope(double ell, double m) const {
    const double c = std::exp(ell);
    const double e = std::exp(-m);
    return -gamma * (1.0 - a * (c0 - c) / (e - k));
  }

  double second(double ell, double m, double g) const {
    const double c = std::exp(ell);
    const double e = std::exp(-m);
    const double d = e - k;
    const double g_ell = -gamma * a * c / d;
    const double g_m = gamma * a * (c0 - c) * e / (d * d);
    return g_ell + g_m * g;
  }

  DualSolution::Node node(double ell, double m) const {
    const double g = slope(ell, m);
    return {ell, m, g, second(ell, m, g)};
  }

  /// Slope of the curve leaving the singular point (c0, E = k).
  double tangent() const {
    const double t = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * a * c0 / (k * gamma)));
    return gamma * (t - 1.0);
  }
};

enum class Side { BelowSingular, AboveSingular, Impatient };

void check_strip(const Field& f, Side side, double ell, double m, double tol) {
  const double c = std::exp(ell);
  const double e = std::exp(-m);
  const double upper_psi = 1.0 - f.a * c;  // psi - a psi^(1 - 1/gamma), divided by psi
  bool ok = true;
  switch (side) {
    case Side::BelowSingular:
      ok = e > f.k - tol && e < upper_psi + tol;
      break;
    case Side::AboveSingular:
      ok = e < f.k + tol && e > std::max(0.0, upper_psi) - tol;
      break;
    case Side::Impatient:
      ok = e > 0.0 && e < f.k + tol;
      break;
  }
  if (!ok) {
    throw BoundViolation("dual solution left its admissible strip at c = " + std::to_string(c) +
                         ", y/psi = " + std::to_string(e));
  }
}

ode::Tolerances tolerances(const DualSolverOptions& o) {
  ode::Tolerances t;
  t.rtol = o.rtol;
  t.atol = o.atol;
  t.h_max = o.h_max;
  return t;
}

// Integrates upward in l until m reaches m_cap. The first node is the start.
std::vector<DualSolution::Node> integrate_up(const Field& f, Side side, double ell0, double m0, double m_cap,
                                             const DualSolverOptions& o) {
  std::vector<DualSolution::Node> nodes{f.node(ell0, m0)};
  if (m0 >= m_cap) throw DomainError("dual integration starts beyond the table cap");
  const double tol = o.strip_tolerance * f.k;
  auto rhs = [&](double ell, const ode::State<1>& y) { return ode::State<1>{f.slope(ell, y[0])}; };
  bool reached = false;
  auto observer = [&](const ode::Step<1>& step) {
    if (step.y1[0] >= m_cap) {
      const double ell =
          ode::locate_crossing<1>(step, [&](const ode::State<1>& s) { return s[0] - m_cap; });
      nodes.push_back(f.node(ell, step.interpolate(ell)[0]));
      reached = true;
      return ode::StepAction::Stop;
    }
    check_strip(f, side, step.t1, step.y1[0], tol);
    nodes.push_back(f.node(step.t1, step.y1[0]));
    return ode::StepAction::Continue;
  };
  // m grows at least linearly in l once c is large, so this bound is never binding in practice.
  const double ell_limit = ell0 + 50.0 + std::log(std::max(1.0, m_cap));
  ode::integrate<1>(rhs, ell0, {m0}, ell_limit, tolerances(o), observer);
  if (!reached) throw IntegrationFailure("dual table did not reach the wealth cap");
  return nodes;
}

// Integrates downward in l to ell_end. Nodes are returned in increasing l.
std::vector<DualSolution::Node> integrate_down(const Field& f, double ell0, double m0, double ell_end,
                                               const DualSolverOptions& o) {
  std::vector<DualSolution::Node> nodes{f.node(ell0, m0)};
  const double tol = o.strip_tolerance * f.k;
  auto rhs = [&](double ell, const ode::State<1>& y) { return ode::State<1>{f.slope(ell, y[0])}; };
  auto observer = [&](const ode::Step<1>& step) {
    check_strip(f, Side::BelowSingular, step.t1, step.y1[0], tol);
    nodes.push_back(f.node(step.t1, step.y1[0]));
    return ode::StepAction::Continue;
  };
  ode::integrate<1>(rhs, ell0, {m0}, ell_end, tolerances(o), observer);
  std::reverse(nodes.begin(), nodes.end());
  return nodes;
}

double m_cap_for(const Parameters& p, const DerivedConstants& d, const DualSolverOptions& o) {
  return std::log1p(p.rho * o.x_cap_factor * d.x_under);
}

}  // namespace

DualSolution::DualSolution(Parameters params, DerivedConstants derived, std::vector<Node> nodes, double y_alpha,
                           double eps_used, DualSolverOptions options)
    : params_(params),
      derived_(derived),
      regime_(derived.regime == Regime::Patient ? Regime::Patient : Regime::Impatient),
      nodes_(std::move(nodes)),
      y_alpha_(y_alpha),
      eps_used_(eps_used),
      options_(options) {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (std::isnan(nodes_[i].d2m)) singular_ = i;
  }
  if (regime_ == Regime::Patient) {
    const double gap = derived_.threshold - params_.delta();
    beta_ = params_.delta() / gap;
    c_prime_ = gap / (params_.delta() * params_.rho) *
               (derived_.alpha_pow - y_alpha_ * (1.0 + params_.rho * derived_.x_under));
  }
}

std::optional<double> DualSolution::y_bar() const noexcept {
  if (regime_ == Regime::Patient) return std::nullopt;
  return y_alpha_;
}

double DualSolution::closed_form_coeff() const noexcept {
  if (regime_ != Regime::Patient) return 0.0;
  return c_prime_ * std::pow(y_alpha_, beta_);
}

double DualSolution::x_max() const noexcept { return std::expm1(nodes_.back().m) / params_.rho; }

double DualSolution::y_min() const noexcept {
  return std::exp(-params_.gamma * nodes_.back().ell - nodes_.back().m);
}

std::size_t DualSolution::segment_for(double ell) const {
  const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), ell,
                                   [](double v, const Node& n) { return v < n.ell; });
  const auto idx = static_cast<std::size_t>(std::distance(nodes_.begin(), it));
  if (idx == 0) return 0;
  return std::min(idx - 1, nodes_.size() - 2);
}

double DualSolution::interpolate(std::size_t i, double ell) const {
  const Node& p = nodes_[i];
  const Node& q = nodes_[i + 1];
  const double h = q.ell - p.ell;
  const double s = (ell - p.ell) / h;
  const double s2 = s * s, s3 = s2 * s;
  if (std::isnan(p.d2m) || std::isnan(q.d2m)) {
    const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    const double h10 = s3 - 2.0 * s2 + s;
    const double h01 = -2.0 * s3 + 3.0 * s2;
    const double h11 = s3 - s2;
    return h00 * p.m + h10 * h * p.dm + h01 * q.m + h11 * h * q.dm;
  }
  const double s4 = s3 * s, s5 = s4 * s;
  const double h0 = 1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5;
  const double h1 = s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5;
  const double h2 = 0.5 * (s2 - 3.0 * s3 + 3.0 * s4 - s5);
  const double h3 = 0.5 * (s3 - 2.0 * s4 + s5);
  const double h4 = -4.0 * s3 + 7.0 * s4 - 3.0 * s5;
  const double h5 = 10.0 * s3 - 15.0 * s4 + 6.0 * s5;
  return h0 * p.m + h1 * h * p.dm + h2 * h * h * p.d2m + h3 * h * h * q.d2m + h4 * h * q.dm + h5 * q.m;
}

double DualSolution::m_at(double ell) const {
  const double lo = nodes_.front().ell, hi = nodes_.back().ell;
  if (ell < lo || ell > hi) {
    throw DomainError("log-consumption " + std::to_string(ell) + " outside the dual table");
  }
  return interpolate(segment_for(ell), ell);
}

double DualSolution::ell_of_m(double m) const {
  if (m < nodes_.front().m || m > nodes_.back().m) {
    throw DomainError("wealth-to-habit ratio outside the dual table [" + std::to_string(derived_.x_under) +
                      ", " + std::to_string(x_max()) + "]");
  }
  const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), m,
                                   [](double v, const Node& n) { return v < n.m; });
  std::size_t i = static_cast<std::size_t>(std::distance(nodes_.begin(), it));
  i = i == 0 ? 0 : std::min(i - 1, nodes_.size() - 2);
  if (m == nodes_[i].m) return nodes_[i].ell;
  if (m == nodes_[i + 1].m) return nodes_[i + 1].ell;
  return find_root([&](double ell) { return interpolate(i, ell) - m; }, nodes_[i].ell, nodes_[i + 1].ell,
                   1e-15 * std::max(1.0, std::abs(nodes_[i].ell)));
}

double DualSolution::ell_of_log_y(double log_y) const {
  const double gamma = params_.gamma;
  auto ly = [&](const Node& n) { return -gamma * n.ell - n.m; };
  if (log_y > ly(nodes_.front()) || log_y < ly(nodes_.back())) {
    throw DomainError("dual value outside the tabulated range");
  }
  // ln y is strictly decreasing along the table.
  std::size_t lo = 0, hi = nodes_.size() - 1;
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    if (ly(nodes_[mid]) >= log_y) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  if (log_y == ly(nodes_[lo])) return nodes_[lo].ell;
  if (log_y == ly(nodes_[hi])) return nodes_[hi].ell;
  return find_root([&](double ell) { return -gamma * ell - interpolate(lo, ell) - log_y; }, nodes_[lo].ell,
                   nodes_[hi].ell, 1e-15 * std::max(1.0, std::abs(nodes_[lo].ell)));
}

double DualSolution::y_of_psi(double psi) const {
  if (!(psi > 0.0)) throw DomainError("psi must be positive");
  const double ell = -std::log(psi) / params_.gamma;
  return std::exp(-params_.gamma * ell - m_at(ell));
}

double DualSolution::psi_of_y(double y) const {
  if (!(y > 0.0)) throw DomainError("y must be positive");
  return std::exp(-params_.gamma * ell_of_log_y(std::log(y)));
}

DualSolution solve_impatient(const Parameters& params, const DerivedConstants& derived,
                             const DualSolverOptions& options) {
  if (derived.regime == Regime::Patient) throw DomainError("solve_impatient called in the patient regime");
  const Field f(params);
  const double ell_a = std::log(params.alpha);
  const double m_under = std::log1p(params.rho * derived.x_under);
  const double m_cap = m_cap_for(params, derived, options);
  const double y_alpha = derived.alpha_pow / (1.0 + params.rho * derived.x_under);

  std::vector<DualSolution::Node> nodes;
  if (derived.regime == Regime::Boundary) {
    // The start is itself singular; leave it along the tangent of the increasing branch.
    const double sigma = f.tangent();
    const double d_ell = -std::log1p(-options.boundary_offset) / params.gamma;
    nodes.push_back({ell_a, m_under, sigma, kNaN});
    auto up = integrate_up(f, Side::Impatient, ell_a + d_ell, m_under + sigma * d_ell, m_cap, options);
    nodes.insert(nodes.end(), up.begin(), up.end());
  } else {
    nodes = integrate_up(f, Side::Impatient, ell_a, m_under, m_cap, options);
    nodes.front().dm = 0.0;  // exact: c* meets x_under with a vertical tangent
  }
  return DualSolution(params, derived, std::move(nodes), y_alpha, 0.0, options);
}

DualSolution solve_patient(const Parameters& params, const DerivedConstants& derived,
                           const DualSolverOptions& options) {
  if (derived.regime != Regime::Patient) throw DomainError("solve_patient called outside the patient regime");
  const Field f(params);
  const double gamma = params.gamma;
  const double ell_a = std::log(params.alpha);
  const double ell0 = std::log(derived.c0);
  const double m0 = -std::log(f.k);
  const double sigma = f.tangent();
  const double m_cap = m_cap_for(params, derived, options);

  // Keep the left start well inside (ln alpha, ln c0).
  double eps = std::min(options.eps_initial, 0.1 * std::expm1(gamma * (ell0 - ell_a)));

  auto left_branch = [&](double e) {
    const double d_ell = -std::log1p(e) / gamma;
    return integrate_down(f, ell0 + d_ell, m0 + sigma * d_ell, ell_a, options);
  };
  auto y_alpha_of = [&](const std::vector<DualSolution::Node>& left) {
    return std::exp(-gamma * ell_a - left.front().m);
  };

  auto left = left_branch(eps);
  double y_alpha = y_alpha_of(left);
  bool accepted = false;
  for (int i = 0; i < options.max_halvings; ++i) {
    auto next = left_branch(0.5 * eps);
    const double y_next = y_alpha_of(next);
    const double change = std::abs(y_next - y_alpha) / y_next;
    eps *= 0.5;
    left = std::move(next);
    y_alpha = y_next;
    if (change < options.eps_rel_change) {
      accepted = true;
      break;
    }
  }
  if (!accepted) throw ConvergenceFailure("singular shooting did not settle as the offset was halved");

  const double d_right = -std::log1p(-eps) / gamma;
  auto right = integrate_up(f, Side::AboveSingular, ell0 + d_right, m0 + sigma * d_right, m_cap, options);

  std::vector<DualSolution::Node> nodes = std::move(left);
  nodes.push_back({ell0, m0, sigma, kNaN});
  nodes.insert(nodes.end(), right.begin(), right.end());
  return DualSolution(params, derived, std::move(nodes), y_alpha, eps, options);
}

DualSolution solve_dual(const Parameters& params, const DualSolverOptions& options) {
  const DerivedConstants d = derived_constants(validate(params));
  if (d.regime == Regime::Patient) return solve_patient(params, d, options);
  return solve_impatient(params, d, options);
}

namespace {

bool above_table(const DualSolution& sol, double y) { return y > sol.y_alpha(); }

void require_dual_domain(const DualSolution& sol, double y) {
  if (!(y > 0.0) || !std::isfinite(y)) throw DomainError("dual variable must be positive and finite");
  if (above_table(sol, y) && sol.regime() != Regime::Patient) {
    throw DomainError("dual variable " + std::to_string(y) + " exceeds y_bar = " + std::to_string(sol.y_alpha()));
  }
  if (y < sol.y_min()) {
    throw DomainError("dual variable " + std::to_string(y) + " is below the tabulated range");
  }
}

}  // namespace

double u_value(const DualSolution& sol, double y) {
  require_dual_domain(sol, y);
  const Parameters& p = sol.params();
  const DerivedConstants& d = sol.derived();
  const double delta = p.delta();
  if (above_table(sol, y)) {
    const double c_prime = sol.closed_form_coeff() * std::pow(sol.y_alpha(), -sol.beta());
    return c_prime * std::pow(y / sol.y_alpha(), -sol.beta()) - d.x_under * y +
           std::pow(p.alpha, 1.0 - p.gamma) / (delta * (1.0 - p.gamma));
  }
  const double ell = sol.ell_of_log_y(std::log(y));
  const double psi = std::exp(-p.gamma * ell);
  return p.gamma / (delta * (1.0 - p.gamma)) * std::exp((1.0 - p.gamma) * ell) + d.c0 / delta * (psi - y);
}

double u_prime(const DualSolution& sol, double y) {
  require_dual_domain(sol, y);
  const Parameters& p = sol.params();
  if (above_table(sol, y)) {
    const double c_prime = sol.closed_form_coeff() * std::pow(sol.y_alpha(), -sol.beta());
    const double beta = sol.beta();
    return -beta * c_prime / sol.y_alpha() * std::pow(y / sol.y_alpha(), -beta - 1.0) - sol.derived().x_under;
  }
  const double ell = sol.ell_of_log_y(std::log(y));
  return -std::expm1(sol.m_at(ell)) / p.rho;
}

double invert_u_prime(const DualSolution& sol, double xi) {
  const Parameters& p = sol.params();
  const double x_under = sol.derived().x_under;
  const double x = -xi;
  if (!(x > x_under)) throw DomainError("invert_u_prime needs xi < -x_under");
  const double x_alpha = std::expm1(sol.nodes().front().m) / p.rho;
  if (sol.regime() == Regime::Patient && x < x_alpha) {
    const double beta = sol.beta();
    const double c_prime = sol.closed_form_coeff() * std::pow(sol.y_alpha(), -beta);
    const double s = std::pow((x - x_under) * sol.y_alpha() / (beta * c_prime), -1.0 / (beta + 1.0));
    return sol.y_alpha() * s;
  }
  const double m = std::log1p(p.rho * x);
  const double ell = sol.ell_of_m(m);
  return std::exp(-p.gamma * ell - m);
}

double dual_rhs(const Parameters& p, double psi, double y) {
  const double a = p.rho / (p.r + p.rho);
  const double k = p.delta() / (p.r + p.rho);
  const double c0 = (p.r + p.rho - p.delta()) / p.rho;
  return a * (c0 - std::pow(psi, -1.0 / p.gamma)) * y / (y - k * psi);
}

nlohmann::json to_json(const DualSolution& sol) {
  const double gamma = sol.params().gamma;
  nlohmann::json psi = nlohmann::json::array();
  nlohmann::json y = nlohmann::json::array();
  const auto& nodes = sol.nodes();
  for (auto it = nodes.rbegin(); it != nodes.rend(); ++it) {
    psi.push_back(std::exp(-gamma * it->ell));
    y.push_back(std::exp(-gamma * it->ell - it->m));
  }
  nlohmann::json j;
  j["regime"] = std::string(to_string(sol.regime()));
  j["params"] = to_json(sol.params());
  j["y_alpha"] = sol.y_alpha();
  j["y_bar"] = sol.y_bar() ? nlohmann::json(*sol.y_bar()) : nlohmann::json(nullptr);
  j["C"] = sol.closed_form_coeff();
  j["psi"] = std::move(psi);
  j["y"] = std::move(y);
  const auto& o = sol.options();
  j["tolerances"] = {{"rtol", o.rtol},
                     {"atol", o.atol},
                     {"h_max", o.h_max},
                     {"singular_offset", sol.eps_used()},
                     {"x_cap", sol.x_max()}};
  return j;
}

}  // namespace habitcons
