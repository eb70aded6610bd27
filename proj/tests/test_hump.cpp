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

#include <cmath>
#include <vector>

#include "doctest.h"
#include "habitcons/error.hpp"
#include "test_support.hpp"

using namespace habitcons;
using namespace habitcons::testing;

namespace {

// Times at which the sampled C changes from rising to falling or back.
std::vector<double> turning_points(const Trajectory& tr) {
  std::vector<double> out;
  int prev_sign = 0;
  for (std::size_t i = 1; i < tr.samples.size(); ++i) {
    const double d = tr.samples[i].C - tr.samples[i - 1].C;
    if (std::abs(d) < 1e-13 * std::abs(tr.samples[i].C)) continue;
    const int sign = d > 0.0 ? 1 : -1;
    if (prev_sign != 0 && sign != prev_sign) out.push_back(tr.samples[i - 1].t);
    prev_sign = sign;
  }
  return out;
}

// Differentiating g and eliminating c*' with the c* ODE gives
// g' = (delta / gamma) N / ((1 + rho x)^2 D) with D = c* - b, b = (r + rho) x / (1 + rho x)
// and N = c* (1 + 2 rho x0 - rho x) - (1 + rho x0) b. N is not of one sign on
// either side of x0, so g need not be monotone there.
double g_prime_exact(const Policy& pol, double x) {
  const Parameters& p = pol.params();
  const double x0 = pol.derived().x0;
  const double c = c_star(pol, x);
  const double b = (p.r + p.rho) * x / (1.0 + p.rho * x);
  const double n = c * (1.0 + 2.0 * p.rho * x0 - p.rho * x) - (1.0 + p.rho * x0) * b;
  return p.delta() / p.gamma * n / ((1.0 + p.rho * x) * (1.0 + p.rho * x) * (c - b));
}

}  // namespace

TEST_CASE("rate of change of consumption") {
  const Policy pol = make_policy(low_gamma_patient());
  CHECK(f_of_x(pol, 0.5 * (pol.x_under() + pol.x_alpha())) == doctest::Approx(0.0288).epsilon(1e-12));
  const DerivedConstants& d = pol.derived();
  CHECK(f_of_x(pol, d.x0) == doctest::Approx(d.c0 * (0.125 - 0.02)).epsilon(1e-8));
  CHECK_THROWS_AS(f_of_x(pol, 0.5 * pol.x_under()), DomainError);

  const Policy full = make_policy(Parameters::with_delta(0.02, 0.18, 1.0, 0.01, 2.0));
  CHECK(f_of_x(full, full.x_under()) == 0.0);
}

TEST_CASE("low-gamma patient hump constants") {
  const Policy pol = make_policy(low_gamma_patient());
  const HumpDiagnostics diag = hump_diagnostics(pol);
  CHECK(diag.g_at_x_alpha == doctest::Approx(-0.567).epsilon(5e-3 / 0.567));
  CHECK(diag.g_at_x_alpha == doctest::Approx(-0.5665410049).epsilon(1e-8));
  const auto xhp = find_x_h_prime(pol);
  REQUIRE(xhp);
  CHECK(*xhp == doctest::Approx(2.90145).epsilon(1e-3 / 2.90145));
  CHECK(*xhp == doctest::Approx(2.9014569013).epsilon(1e-9));
  CHECK(*xhp > pol.x_alpha());
  CHECK(*xhp < pol.derived().x0);
  CHECK(std::abs(hump_g(pol, *xhp)) < 1e-9);
  CHECK(diag.delta_minus_r == doctest::Approx(0.105));
  CHECK(diag.patience_gap == doctest::Approx(0.039));
}

TEST_CASE("condition (ii) needs gamma below its threshold") {
  const Policy pol = make_policy(Parameters::with_delta(0.02, 0.18, 0.2, 0.125, 2.0));
  CHECK(hump_diagnostics(pol).gamma_threshold < 1.0);
  CHECK_FALSE(find_x_h_prime(pol));
}

TEST_CASE("no hump when delta does not exceed r") {
  const Parameters p = Parameters::with_delta(0.05, 0.18, 0.3, 0.04, 2.0);
  const Policy pol = make_policy(p);
  CHECK_FALSE(find_x_h(pol));
  CHECK_FALSE(find_x_h_prime(pol));
  for (double ratio : {1.1 * pol.x_under(), pol.derived().x0 * 0.9, 3.0 * pol.derived().x0}) {
    const HumpReport rep = classify(pol, {ratio * 2.0, 2.0});
    CHECK_FALSE(rep.exists);
    CHECK(rep.condition == HumpCondition::None);
  }
}

TEST_CASE("condition (i) root lies above the aspiration level") {
  for (const Parameters& p : {impatient_gamma2(), patient_gamma2(), low_gamma_patient()}) {
    const Policy pol = make_policy(p);
    const auto xh = find_x_h(pol);
    REQUIRE(xh);
    CHECK(*xh > std::max(pol.derived().x0, pol.x_under()));
    CHECK(std::abs(hump_g(pol, *xh)) < 1e-9);
  }
}

TEST_CASE("low-wealth hump peaks at about two years") {
  const Policy pol = make_policy(low_gamma_patient());
  const InitialState init{2.6 * 2.253, 2.253};
  const HumpReport rep = classify(pol, init);
  CHECK(rep.exists);
  CHECK(rep.condition == HumpCondition::CondII);
  REQUIRE(rep.tau_h);
  CHECK(*rep.tau_h == doctest::Approx(2.0).epsilon(0.25));

  SimulationOptions o;
  o.horizon = 20.0;
  o.sample_dt = 0.01;
  const Trajectory tr = simulate(pol, init, o);
  const auto turns = turning_points(tr);
  REQUIRE(turns.size() == 1);
  CHECK(std::abs(turns[0] - *rep.tau_h) <= o.sample_dt + 1e-12);
}

TEST_CASE("high-wealth hump peaks at about fifteen years for either alpha") {
  for (double alpha : {0.6, 0.2}) {
    const Policy pol = make_policy(Parameters::with_delta(0.02, 0.18, alpha, 0.125, 2.0));
    const InitialState init{370.0, 2.253};
    const HumpReport rep = classify(pol, init);
    CHECK(rep.exists);
    CHECK(rep.condition == HumpCondition::CondI);
    REQUIRE(rep.tau_h);
    CHECK(*rep.tau_h == doctest::Approx(15.0).epsilon(0.2));
    SimulationOptions o;
    o.horizon = 60.0;
    o.sample_dt = 0.01;
    const auto turns = turning_points(simulate(pol, init, o));
    REQUIRE(turns.size() == 1);
    CHECK(std::abs(turns[0] - *rep.tau_h) <= o.sample_dt + 1e-12);
  }
}

TEST_CASE("patient starts at or below the free boundary have no hump") {
  const Policy pol = make_policy(low_gamma_patient());
  for (double ratio : {pol.x_under(), 0.5 * (pol.x_under() + pol.x_alpha()), pol.x_alpha()}) {
    CHECK_FALSE(classify(pol, {ratio * 2.0, 2.0}).exists);
  }
  CHECK_THROWS_AS(classify(pol, {0.5 * pol.x_under(), 1.0}), InadmissibleStart);
}

TEST_CASE("g between the free boundary and the aspiration level") {
  for (const Parameters& p : {low_gamma_patient(), patient_gamma2()}) {
    const Policy pol = make_policy(p);
    const bool cond_ii = p.gamma < hump_diagnostics(pol).gamma_threshold;
    int sign_changes = 0;
    const auto xs = linspace(pol.x_alpha() * 1.001, pol.derived().x0 * 0.999, 200);
    double prev_g = hump_g(pol, xs.front());
    for (double x : xs) {
      const double h = 1e-6 * x;
      const double fd = (hump_g(pol, x + h) - hump_g(pol, x - h)) / (2.0 * h);
      const double exact = g_prime_exact(pol, x);
      CHECK(std::abs(fd - exact) <= 1e-5 * (1.0 + std::abs(exact)));
      if (cond_ii) CHECK(fd > 0.0);
      const double g = hump_g(pol, x);
      if ((g < 0.0) != (prev_g < 0.0)) ++sign_changes;
      prev_g = g;
    }
    CHECK(sign_changes == (cond_ii ? 1 : 0));
  }
}

TEST_CASE("g above the aspiration level") {
  for (const Parameters& p : {low_gamma_patient(), patient_gamma2(), impatient_gamma2()}) {
    const Policy pol = make_policy(p);
    const double lo = std::max(pol.derived().x0, pol.x_under());
    int sign_changes = 0;
    double prev_g = hump_g(pol, lo * 1.001);
    for (double x : linspace(lo * 1.001, 20.0 * lo, 400)) {
      const double h = 1e-6 * x;
      const double fd = (hump_g(pol, x + h) - hump_g(pol, x - h)) / (2.0 * h);
      const double exact = g_prime_exact(pol, x);
      CHECK(std::abs(fd - exact) <= 1e-5 * (1.0 + std::abs(exact)));
      const double g = hump_g(pol, x);
      if ((g < 0.0) != (prev_g < 0.0)) ++sign_changes;
      prev_g = g;
      if (p.gamma > 1.0) CHECK(fd < 0.0);
    }
    CHECK(sign_changes == 1);
  }
  const Policy low = make_policy(low_gamma_patient());
  const double x = 1.01 * low.derived().x0;
  CHECK(hump_g(low, x * (1 + 1e-6)) > hump_g(low, x * (1 - 1e-6)));
}

TEST_CASE("report JSON") {
  const Policy pol = make_policy(low_gamma_patient());
  const nlohmann::json j = to_json(classify(pol, {2.6 * 2.253, 2.253}));
  CHECK(j.at("exists") == true);
  CHECK(j.at("condition") == "cond_ii");
  CHECK(j.at("x_h").is_number());
  CHECK(j.at("diagnostics").at("g_at_x_alpha").get<double>() < 0.0);
}
