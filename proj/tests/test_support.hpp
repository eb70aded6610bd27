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

#include <cmath>
#include <random>
#include <vector>

#include "habitcons/model.hpp"

namespace habitcons::testing {

// r = 0.02, rho = 0.18, delta = 0.125 throughout; alpha and gamma vary.
inline Parameters low_gamma_patient() { return Parameters::with_delta(0.02, 0.18, 0.2, 0.125, 0.05); }
inline Parameters patient_gamma2() { return Parameters::with_delta(0.02, 0.18, 0.2, 0.125, 2.0); }
inline Parameters impatient_gamma2() { return Parameters::with_delta(0.02, 0.18, 0.6, 0.125, 2.0); }

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

inline std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(a + (b - a) * i / (n - 1));
  return out;
}

/// Valid parameter draws alternating between the patient and impatient regimes.
inline std::vector<Parameters> random_parameter_sets(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  auto uni = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
  std::vector<Parameters> out;
  while (static_cast<int>(out.size()) < n) {
    Parameters p;
    p.r = uni(0.01, 0.06);
    p.rho = uni(0.08, 0.4);
    p.alpha = uni(0.1, 0.8);
    p.gamma = uni(0.0, 1.0) < 0.5 ? uni(0.3, 0.9) : uni(1.2, 4.0);
    const double thr = p.r + p.rho * (1.0 - p.alpha);
    const bool patient = out.size() % 2 == 0;
    const double delta = patient ? uni(0.3, 0.9) * thr : uni(1.1, 2.0) * thr;
    p.delta_tilde = 0.7 * delta;
    p.lambda = 0.3 * delta;
    out.push_back(validate(p));
  }
  return out;
}

}  // namespace habitcons::testing
