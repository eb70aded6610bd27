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

#include "habitcons/model.hpp"

#include <cmath>
#include <string>

#include "habitcons/error.hpp"

namespace habitcons {

std::string_view to_string(Regime regime) noexcept {
  switch (regime) {
    case Regime::Patient:
      return "patient";
    case Regime::Impatient:
      return "impatient";
    case Regime::Boundary:
      return "boundary";
  }
  return "unknown";
}

namespace {

void require(bool ok, const char* field, const std::string& what) {
  if (!ok) throw OutOfRange(field, what);
}

}  // namespace

Parameters validate(const Parameters& p) {
  require(std::isfinite(p.r) && p.r > 0.0, "r", "must be > 0");
  require(std::isfinite(p.rho) && p.rho > 0.0, "rho", "must be > 0");
  require(std::isfinite(p.alpha) && p.alpha > 0.0 && p.alpha <= 1.0, "alpha", "must lie in (0, 1]");
  require(std::isfinite(p.delta_tilde) && p.delta_tilde >= 0.0, "delta_tilde", "must be >= 0");
  require(std::isfinite(p.lambda) && p.lambda >= 0.0, "lambda", "must be >= 0");
  require(p.delta() > 0.0, "delta", "delta_tilde + lambda must be > 0");
  require(std::isfinite(p.gamma) && p.gamma > 0.0, "gamma", "must be > 0");
  if (std::abs(p.gamma - 1.0) < kGammaExclusion) throw GammaNearOne(p.gamma);
  return p;
}

double safe_level(double r, double rho, double alpha) noexcept {
  return alpha / (r + rho * (1.0 - alpha));
}

double safe_level(const Parameters& p) noexcept { return safe_level(p.r, p.rho, p.alpha); }

Regime classify_regime(const Parameters& p) noexcept {
  const double threshold = p.r + p.rho * (1.0 - p.alpha);
  const double tau = kRegimeRelTolerance * (p.r + p.rho);
  const double delta = p.delta();
  if (delta > threshold + tau) return Regime::Impatient;
  if (delta < threshold - tau) return Regime::Patient;
  return Regime::Boundary;
}

DerivedConstants derived_constants(const Parameters& p) {
  DerivedConstants d;
  const double delta = p.delta();
  d.x_under = safe_level(p);
  d.c0 = (p.r + p.rho - delta) / p.rho;
  d.x0 = d.c0 / delta;
  d.alpha_pow = std::pow(p.alpha, -p.gamma);
  d.threshold = p.r + p.rho * (1.0 - p.alpha);
  d.regime = classify_regime(p);
  if (d.regime == Regime::Patient) {
    d.psi0 = std::pow(d.c0, -p.gamma);
    d.y0 = delta * *d.psi0 / (p.r + p.rho);
  }
  return d;
}

Parameters parameters_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("parameters must be a JSON object");
  auto number = [&](const char* key) -> double {
    const auto it = j.find(key);
    if (it == j.end()) throw ConfigError(std::string("missing parameter '") + key + "'");
    if (!it->is_number()) throw ConfigError(std::string("parameter '") + key + "' must be a number");
    return it->get<double>();
  };
  static constexpr const char* kKnown[] = {"r", "rho", "alpha", "delta_tilde", "lambda", "delta", "gamma"};
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* k : kKnown) known = known || key == k;
    if (!known) throw ConfigError("unknown parameter '" + key + "'");
  }

  Parameters p;
  p.r = number("r");
  p.rho = number("rho");
  p.alpha = number("alpha");
  p.gamma = number("gamma");
  const bool has_delta = j.contains("delta");
  const bool has_split = j.contains("delta_tilde") || j.contains("lambda");
  if (has_delta && has_split) {
    throw ConfigError("give either 'delta' or 'delta_tilde'/'lambda', not both");
  }
  if (has_delta) {
    p.delta_tilde = number("delta");
    p.lambda = 0.0;
  } else {
    p.delta_tilde = number("delta_tilde");
    p.lambda = j.contains("lambda") ? number("lambda") : 0.0;
  }
  return validate(p);
}

nlohmann::json to_json(const Parameters& p) {
  return nlohmann::json{{"r", p.r},
                        {"rho", p.rho},
                        {"alpha", p.alpha},
                        {"delta_tilde", p.delta_tilde},
                        {"lambda", p.lambda},
                        {"gamma", p.gamma}};
}

}  // namespace habitcons
