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

#include "json.hpp"

namespace habitcons {

/// Market and preference inputs of the habit-constrained consumption problem.
///
/// All rates are per unit time. Mortality is folded into the effective
/// discount rate, so downstream code only ever sees delta().
struct Parameters {
  double r = 0.0;            ///< risk-free rate, > 0
  double rho = 0.0;          ///< habit weighting rate, > 0
  double alpha = 0.0;        ///< consumption floor as a fraction of habit, in (0, 1]
  double delta_tilde = 0.0;  ///< subjective time preference, >= 0
  double lambda = 0.0;       ///< mortality intensity, >= 0
  double gamma = 0.0;        ///< relative risk aversion, > 0 and != 1

  double delta() const noexcept { return delta_tilde + lambda; }

  /// Convenience constructor for the common case lambda = 0.
  static Parameters with_delta(double r, double rho, double alpha, double delta, double gamma) {
    return Parameters{r, rho, alpha, delta, 0.0, gamma};
  }
};

enum class Regime { Patient, Impatient, Boundary };

std::string_view to_string(Regime regime) noexcept;

/// Closed-form constants derived from validated parameters.
struct DerivedConstants {
  double x_under = 0.0;  ///< safe wealth-to-habit level
  double x0 = 0.0;       ///< aspiration wealth-to-habit ratio (may be negative if delta > r + rho)
  double c0 = 0.0;       ///< aspiration consumption-to-habit rate
  double alpha_pow = 0.0;  ///< alpha^(-gamma)
  double threshold = 0.0;  ///< r + rho (1 - alpha), the patience threshold for delta
  Regime regime = Regime::Patient;
  std::optional<double> psi0;  ///< dual singular point (patient only)
  std::optional<double> y0;    ///< dual singular value (patient only)
};

inline constexpr double kGammaExclusion = 1e-6;
inline constexpr double kRegimeRelTolerance = 1e-10;

/// Returns params unchanged if all standing assumptions hold.
/// Throws OutOfRange naming the first violated field, or GammaNearOne.
Parameters validate(const Parameters& params);

/// alpha / (r + rho (1 - alpha)); no validation, so alpha -> 0 is allowed.
double safe_level(double r, double rho, double alpha) noexcept;
double safe_level(const Parameters& params) noexcept;

/// Patient if delta is below r + rho (1 - alpha) by more than the tolerance
/// 1e-10 (r + rho), Impatient if above it, Boundary otherwise.
Regime classify_regime(const Parameters& params) noexcept;

DerivedConstants derived_constants(const Parameters& params);

/// Reads {r, rho, alpha, delta_tilde, lambda, gamma} or {r, rho, alpha, delta, gamma}.
/// Giving delta together with delta_tilde or lambda is a ConfigError. The
/// result is validated.
Parameters parameters_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Parameters& params);

}  // namespace habitcons
