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


#include "habitcons/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "habitcons/error.hpp"
#include "habitcons/ode.hpp"
#include "habitcons/roots.hpp"

namespace habitcons {

namespace {

double start_ratio(const Parameters& p, const InitialState& init) {
  if (!(init.w > 0.0) || !(init.z > 0.0) || !std::isfinite(init.w) || !std::isfinite(init.z)) {
    throw InadmissibleStart("initial wealth and habit must be positive and finite");
  }
  const double x = init.ratio();
  const double x_under = safe_level(p);
  if (x < x_under - kStateTolerance * std::max(1.0, x_under)) {
    throw InadmissibleStart("w/z = " + std::to_string(x) + " is below the safe level " + std::to_string(x_under));
  }
  return std::max(x, x_under);
}

std::vector<double> sample_times(double horizon, double dt) {
  std::vector<double> times;
  const auto n = static_cast<std::size_t>(std::floor(horizon / dt + 1e-9));
  times.reserve(n + 2);
  for (std::size_t k = 0; k <= n; ++k) times.push_back(static_cast<double>(k) * dt);
  if (horizon - times.back() > 1e-9 * std::max(1.0, horizon)) times.push_back(horizon);
  return times;
}

}  // namespace

Asymptote asymptote(const Policy& policy) {
  const DerivedConstants& d = policy.derived();
  if (policy.regime() == Regime::Patient) return {d.x0, d.c0};
  return {d.x_under, policy.params().alpha};
}

Trajectory simulate_feedback(const Parameters& p, const Feedback& feedback, const InitialState& init,
                             const SimulationOptions& o, std::optional<double> attractor,
                             std::optional<double> tail_rate) {
  if (!(o.horizon > 0.0) || !(o.sample_dt > 0.0)) throw ConfigError("horizon and sample_dt must be positive");
  const double x_start = start_ratio(p, init);
  const double x_under = safe_level(p);
  const double delta = p.delta();
  const double a = p.r + p.rho;
  auto rate = [&](double x) { return feedback(std::max(x, x_under)); };
  auto utility = [&](double c) { return std::pow(c, 1.0 - p.gamma) / (1.0 - p.gamma); };

  using S = ode::State<3>;  // X, ln Z, accumulated discounted utility
  auto rhs = [&](double t, const S& s) {
    const double c = rate(s[0]);
    return S{a * s[0] - (1.0 + p.rho * s[0]) * c, -p.rho * (1.0 - c), std::exp(-delta * t) * utility(c)};
  };

  const std::vector<double> times = sample_times(o.horizon, o.sample_dt);
  Trajectory tr;
  tr.horizon = o.horizon;
  tr.samples.reserve(times.size());
  std::size_t next = 0;
  auto record = [&](double t, double x, double ln_z) {
    const double c = rate(x);
    const double z = std::exp(ln_z);
    tr.samples.push_back({t, x, c, z, x * z, c * z});
  };

  const double side = attractor ? (x_start >= *attractor ? 1.0 : -1.0) : 1.0;
  auto event = [&](const S& s) {
    double g = s[0] - x_under - o.pin_tolerance;
    if (attractor) g = std::min(g, (s[0] - *attractor) * side - o.pin_tolerance);
    return g;
  };

  bool pinned = false;
  double t_pin = 0.0;
  S at_pin{x_start, std::log(init.z), 0.0};
  auto pin_to = [&](const S& s) {
    S out = s;
    const double g_safe = s[0] - x_under - o.pin_tolerance;
    const double g_attr =
        attractor ? (s[0] - *attractor) * side - o.pin_tolerance : std::numeric_limits<double>::infinity();
    if (g_attr <= g_safe) {
      out[0] = *attractor;
    } else {
      out[0] = x_under;
      if (feedback(x_under) > p.alpha * (1.0 + 1e-9)) {
        throw InadmissiblePolicy("feedback drives the state below the safe level");
      }
    }
    return out;
  };

  S y0{x_start, std::log(init.z), 0.0};
  if (event(y0) <= 0.0) {
    pinned = true;
    at_pin = pin_to(y0);
  } else {
    ode::Tolerances tol;
    tol.rtol = o.rtol;
    tol.atol = o.atol;
    tol.h_max = o.h_max;
    auto observer = [&](const ode::Step<3>& step) {
      double t_stop = step.t1;
      if (event(step.y1) <= 0.0) {
        t_stop = ode::locate_crossing<3>(step, event);
        pinned = true;
        t_pin = t_stop;
        at_pin = pin_to(step.interpolate(t_stop));
      }
      while (next < times.size() && times[next] <= t_stop) {
        const double t = times[next];
        const S s = t == step.t1 ? step.y1 : step.interpolate(t);
        record(t, std::max(s[0], x_under), s[1]);
        ++next;
      }
      return pinned ? ode::StepAction::Stop : ode::StepAction::Continue;
    };
    const auto res = ode::integrate<3>(rhs, 0.0, y0, o.horizon, tol, observer);
    if (!pinned) {
      const double c_end = tail_rate.value_or(rate(res.y[0]));
      tr.objective = res.y[2] + std::exp(-delta * o.horizon) * utility(c_end) / delta;
      tr.x_limit = attractor.value_or(res.y[0]);
      tr.c_limit = c_end;
    }
  }

  if (pinned) {
    const double c_pin = rate(at_pin[0]);
    tr.pinned_at = t_pin;
    tr.objective = at_pin[2] + std::exp(-delta * t_pin) * utility(c_pin) / delta;
    tr.x_limit = at_pin[0];
    tr.c_limit = tail_rate.value_or(c_pin);
    for (; next < times.size(); ++next) {
      const double t = times[next];
      record(t, at_pin[0], at_pin[1] - p.rho * (1.0 - c_pin) * (t - t_pin));
    }
  }

  tr.min_x_slack = std::numeric_limits<double>::infinity();
  tr.min_c_slack = std::numeric_limits<double>::infinity();
  for (const Sample& s : tr.samples) {
    tr.min_x_slack = std::min(tr.min_x_slack, s.x - x_under);
    tr.min_c_slack = std::min(tr.min_c_slack, s.c - p.alpha);
  }
  return tr;
}

Trajectory simulate(const Policy& policy, const InitialState& init, const SimulationOptions& options) {
  const Asymptote lim = asymptote(policy);
  return simulate_feedback(
      policy.params(), [&](double x) { return c_star(policy, x); }, init, options, lim.x_limit, lim.c_limit);
}

AdmissibilityReport check_admissible(const Parameters& p, const std::vector<ConsumptionSegment>& path,
                                     double horizon, const InitialState& init) {
  AdmissibilityReport rep;
  const double x_under = safe_level(p);
  const double tol = kStateTolerance * std::max(1.0, x_under);
  double x = init.ratio();
  rep.min_x_slack = x - x_under;
  rep.min_c_slack = std::numeric_limits<double>::infinity();
  if (x < x_under - tol) {
    rep.admissible = false;
    rep.violation_time = 0.0;
    rep.violation = "initial ratio below the safe level";
    return rep;
  }
  for (std::size_t i = 0; i < path.size(); ++i) {
    const double t0 = path[i].t_start;
    if (t0 >= horizon) break;
    const double t1 = i + 1 < path.size() ? std::min(path[i + 1].t_start, horizon) : horizon;
    const double c = path[i].c;
    rep.min_c_slack = std::min(rep.min_c_slack, c - p.alpha);
    if (c < p.alpha) {
      rep.admissible = false;
      rep.violation_time = t0;
      rep.violation = "consumption below alpha times habit";
      return rep;
    }
    // X' = g X - c with g = r + rho - rho c, solved exactly.
    const double g = p.r + p.rho - p.rho * c;
    // A start within tolerance of the rest point c / g is pinned to it; otherwise
    // rounding in x - c / g is amplified by exp(g t).
    const bool at_rest = std::abs(g) >= 1e-14 && std::abs(x - c / g) <= tol;
    const double x_seg = at_rest ? c / g : x;
    auto x_at = [&](double tau) {
      if (at_rest) return x_seg;
      if (std::abs(g) < 1e-14) return x_seg - c * tau;
      return (x_seg - c / g) * std::exp(g * tau) + c / g;
    };
    const double len = t1 - t0;
    const double x_end = x_at(len);
    // X is monotone on a segment, so the endpoint carries the minimum.
    if (x_end < x_under - tol) {
      const double tau = find_root([&](double s) { return x_at(s) - (x_under - tol); }, 0.0, len, 1e-12);
      rep.admissible = false;
      rep.violation_time = t0 + tau;
      rep.violation = "wealth-to-habit ratio fell below the safe level";
      rep.min_x_slack = std::min(rep.min_x_slack, x_end - x_under);
      return rep;
    }
    rep.min_x_slack = std::min(rep.min_x_slack, x_end - x_under);
    x = x_end;
  }
  return rep;
}

AdmissibilityReport check_admissible(const Parameters& p, const Trajectory& trajectory) {
  AdmissibilityReport rep;
  const double x_under = safe_level(p);
  const double tol = kStateTolerance * std::max(1.0, x_under);
  rep.min_x_slack = std::numeric_limits<double>::infinity();
  rep.min_c_slack = std::numeric_limits<double>::infinity();
  for (const Sample& s : trajectory.samples) {
    rep.min_x_slack = std::min(rep.min_x_slack, s.x - x_under);
    rep.min_c_slack = std::min(rep.min_c_slack, s.c - p.alpha);
    if (rep.admissible && (s.x < x_under - tol || s.c < p.alpha * (1.0 - 1e-12))) {
      rep.admissible = false;
      rep.violation_time = s.t;
      rep.violation = s.c < p.alpha * (1.0 - 1e-12) ? "consumption below alpha times habit"
                                                    : "wealth-to-habit ratio fell below the safe level";
    }
  }
  return rep;
}

std::vector<double> transversality_probe(const Policy& policy, const InitialState& init,
                                         const std::vector<double>& horizons) {
  std::vector<double> out;
  out.reserve(horizons.size());
  for (double T : horizons) {
    SimulationOptions o;
    o.horizon = T;
    o.sample_dt = T;
    const Trajectory tr = simulate(policy, init, o);
    out.push_back(std::exp(-policy.params().delta() * T) * value(policy, tr.samples.back().x));
  }
  return out;
}

std::optional<double> time_to_reach(const Policy& policy, double x_start, double x_target,
                                    const SimulationOptions& o) {
  if (x_start == x_target) return 0.0;
  const Parameters& p = policy.params();
  const double x_under = policy.x_under();
  const double lim = asymptote(policy).x_limit;
  const double side = x_start > x_target ? 1.0 : -1.0;
  // The target must lie between the start and the attractor.
  if ((x_target - lim) * side < 0.0) return std::nullopt;
  auto rhs = [&](double, const ode::State<1>& s) {
    const double x = std::max(s[0], x_under);
    return ode::State<1>{(p.r + p.rho) * s[0] - (1.0 + p.rho * s[0]) * c_star(policy, x)};
  };
  auto g = [&](const ode::State<1>& s) { return (s[0] - x_target) * side; };
  std::optional<double> hit;
  ode::Tolerances tol;
  tol.rtol = o.rtol;
  tol.atol = o.atol;
  tol.h_max = o.h_max;
  auto observer = [&](const ode::Step<1>& step) {
    if (g(step.y1) <= 0.0) {
      hit = ode::locate_crossing<1>(step, g);
      return ode::StepAction::Stop;
    }
    if (std::abs(step.y1[0] - lim) <= o.pin_tolerance) return ode::StepAction::Stop;
    return ode::StepAction::Continue;
  };
  ode::integrate<1>(rhs, 0.0, {x_start}, o.horizon, tol, observer);
  return hit;
}

nlohmann::json summary_json(const Trajectory& tr) {
  nlohmann::json j;
  j["objective"] = tr.objective;
  j["horizon"] = tr.horizon;
  j["x_limit"] = tr.x_limit;
  j["c_limit"] = tr.c_limit;
  j["pinned_at"] = tr.pinned_at ? nlohmann::json(*tr.pinned_at) : nlohmann::json(nullptr);
  j["min_x_slack"] = tr.min_x_slack;
  j["min_c_slack"] = tr.min_c_slack;
  j["max_constraint_violation"] = std::max({0.0, -tr.min_x_slack, -tr.min_c_slack});
  if (!tr.samples.empty()) {
    j["x_end"] = tr.samples.back().x;
    j["c_end"] = tr.samples.back().c;
  }
  return j;
}

}  // namespace habitcons
