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

#include <optional>
#include <string_view>

#include "habitcons/policy.hpp"
#include "habitcons/trajectory.hpp"
#include "json.hpp"

namespace habitcons {

enum class HumpCondition { None, CondI, CondII };

std::string_view to_string(HumpCondition condition) noexcept;

struct HumpDiagnostics {
  double delta_minus_r = 0.0;
  double patience_gap = 0.0;  ///< r + rho (1 - alpha) - delta
  double g_at_x_alpha = 0.0;
  double gamma_threshold = 0.0;  ///< 1 - (delta - r) / (rho (1 - alpha))
};

struct HumpReport {
  bool exists = false;
  HumpCondition condition = HumpCondition::None;
  std::optional<double> x_h;
  std::optional<double> x_h_prime;
  std::optional<double> tau_h;  ///< time of peak consumption
  HumpDiagnostics diagnostics;
};

/// 1 + (delta / gamma) (x - x0) / (1 + rho x) - c*(x).
double hump_g(const Policy& policy, double x);

/// Rate with dC*/dt = -Z* f(X*).
double f_of_x(const Policy& policy, double x);

/// Root of g above max(x0, x_under), present when delta > r.
std::optional<double> find_x_h(const Policy& policy);

/// Root of g on (x_alpha, x0), present when r < delta < r + rho (1 - alpha) and g(x_alpha) < 0.
std::optional<double> find_x_h_prime(const Policy& policy);

HumpDiagnostics hump_diagnostics(const Policy& policy);

/// Decides whether C* is hump-shaped from the given start, and when it peaks.
HumpReport classify(const Policy& policy, const InitialState& init);

nlohmann::json to_json(const HumpReport& report);

}  // namespace habitcons
