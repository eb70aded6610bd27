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


#include "habitcons/hump.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "habitcons/error.hpp"
#include "habitcons/roots.hpp"

namespace habitcons {

std::string_view to_string(HumpCondition condition) noexcept {
  switch (condition) {
    case HumpCondition::None:
      return "none";
    case HumpCondition::CondI:
      return "cond_i";
    case HumpCondition::CondII:
      return "cond_ii";
  }
  return "unknown";
}

namespace {

constexpr double kRootTolerance = 1e-10;

bool cond_ii_applies(const Policy& policy, const HumpDiagnostics& d) {
  const Parameters& p = policy.params();
  return policy.regime() == Regime::Patient && p.delta() > p.r && d.patience_gap > 0.0 && d.g_at_x_alpha < 0.0 &&
         p.gamma <= d.gamma_threshold;
}

}  // namespace

double hump_g(const Policy& policy, double x) {
  const Parameters& p = policy.params();
  return 1.0 + p.delta() / p.gamma * (x - policy.derived().x0) / (1.0 + p.rho * x) - c_star(policy, x);
}

double f_of_x(const Policy& policy, double x) {
  const Parameters& p = policy.params();
  if (x < policy.x_under() - kStateTolerance * std::max(1.0, policy.x_under())) {
    throw DomainError("f is defined for x >= x_under");
  }
  if (x < policy.x_alpha()) return p.rho * p.alpha * (1.0 - p.alpha);
  return p.rho * c_star(policy, x) * hump_g(policy, x);
}

std::optional<double> find_x_h(const Policy& policy) {
  const Parameters& p = policy.params();
  if (p.delta() <= p.r) return std::nullopt;
  const double lo = std::max(policy.derived().x0, policy.x_under());
  auto g = [&](double x) { return hump_g(policy, x); };
  double hi = 2.0 * lo;
  while (g(hi) >= 0.0) {
    if (hi >= policy.x_max()) throw ConvergenceFailure("no sign change of g below the table cap");
    hi = std::min(2.0 * hi, policy.x_max());
  }
  const double bracket_lo = std::max(lo, 0.5 * hi);
  return find_root(g, g(bracket_lo) > 0.0 ? bracket_lo : lo, hi, kRootTolerance);
}

std::optional<double> find_x_h_prime(const Policy& policy) {
  const HumpDiagnostics d = hump_diagnostics(policy);
  if (!cond_ii_applies(policy, d)) return std::nullopt;
  return find_root([&](double x) { return hump_g(policy, x); }, policy.x_alpha(), policy.derived().x0,
                   kRootTolerance);
}

HumpDiagnostics hump_diagnostics(const Policy& policy) {
  const Parameters& p = policy.params();
  HumpDiagnostics d;
  d.delta_minus_r = p.delta() - p.r;
  d.patience_gap = policy.derived().threshold - p.delta();
  d.g_at_x_alpha = hump_g(policy, policy.x_alpha());
  d.gamma_threshold = p.alpha < 1.0 ? 1.0 - (p.delta() - p.r) / (p.rho * (1.0 - p.alpha))
                                    : -std::numeric_limits<double>::infinity();
  return d;
}

HumpReport classify(const Policy& policy, const InitialState& init) {
  HumpReport rep;
  rep.diagnostics = hump_diagnostics(policy);
  rep.x_h = find_x_h(policy);
  rep.x_h_prime = find_x_h_prime(policy);
  const double x = init.ratio();
  if (x < policy.x_under() - kStateTolerance * std::max(1.0, policy.x_under())) {
    throw InadmissibleStart("w/z is below the safe level");
  }
  std::optional<double> root;
  if (rep.x_h && x > *rep.x_h) {
    rep.condition = HumpCondition::CondI;
    root = rep.x_h;
  } else if (rep.x_h_prime && x > policy.x_alpha() && x < *rep.x_h_prime) {
    rep.condition = HumpCondition::CondII;
    root = rep.x_h_prime;
  }
  if (root) {
    rep.exists = true;
    SimulationOptions o;
    o.horizon = 1000.0;
    rep.tau_h = time_to_reach(policy, x, *root, o);
  }
  return rep;
}

nlohmann::json to_json(const HumpReport& r) {
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  nlohmann::json j;
  j["exists"] = r.exists;
  j["condition"] = std::string(to_string(r.condition));
  j["x_h"] = opt(r.x_h);
  j["x_h_prime"] = opt(r.x_h_prime);
  j["tau_h"] = opt(r.tau_h);
  j["diagnostics"] = {{"delta_minus_r", r.diagnostics.delta_minus_r},
                      {"patience_gap", r.diagnostics.patience_gap},
                      {"g_at_x_alpha", r.diagnostics.g_at_x_alpha},
                      {"gamma_threshold", r.diagnostics.gamma_threshold}};
  return j;
}

}  // namespace habitcons
