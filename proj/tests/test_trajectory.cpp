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

#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "habitcons/error.hpp"
#include "habitcons/oracle.hpp"
#include "test_support.hpp"

using namespace habitcons;
using namespace habitcons::testing;

TEST_CASE("starting at the safe level stays there") {
  for (const Parameters& p : {patient_gamma2(), impatient_gamma2()}) {
    const Policy pol = make_policy(p);
    const Trajectory flat = simulate(pol, {pol.x_under() * 3.0, 3.0});
    for (const Sample& s : flat.samples) {
      CHECK(s.x == pol.x_under());
      CHECK(s.c == p.alpha);
    }
    const double v_floor = std::pow(p.alpha, 1.0 - p.gamma) / (p.delta() * (1.0 - p.gamma));
    CHECK(flat.objective == doctest::Approx(v_floor).epsilon(1e-12));
  }
}

TEST_CASE("patient aspiration level is a rest point") {
  const Policy pol = make_policy(patient_gamma2());
  const double x0 = pol.derived().x0;
  const Trajectory tr = simulate(pol, {x0 * 2.253, 2.253});
  for (const Sample& s : tr.samples) {
    CHECK(s.x == doctest::Approx(x0).epsilon(1e-12));
    CHECK(s.c == doctest::Approx(pol.derived().c0).epsilon(1e-9));
    const double growth = pol.params().rho * (pol.derived().c0 - 1.0);
    CHECK(s.z == doctest::Approx(2.253 * std::exp(growth * s.t)).epsilon(1e-9));
  }
}

TEST_CASE("patient paths rise toward the aspiration level") {
  const Policy pol = make_policy(low_gamma_patient());
  const double x0 = pol.derived().x0;
  const Trajectory tr = simulate(pol, {2.0 * 2.253, 2.253});
  for (std::size_t i = 1; i < tr.samples.size(); ++i) {
    CHECK(tr.samples[i].x >= tr.samples[i - 1].x);
    CHECK(tr.samples[i].x <= x0 + 1e-12);
  }
  CHECK(std::abs(tr.samples.back().x - x0) < 1e-3);
  CHECK(tr.pinned_at);
}

TEST_CASE("asymptotes by regime") {
  const Asymptote imp = asymptote(make_policy(impatient_gamma2()));
  CHECK(imp.x_limit == doctest::Approx(6.521739).epsilon(1e-6));
  CHECK(imp.c_limit == 0.6);
  const Asymptote pat = asymptote(make_policy(patient_gamma2()));
  CHECK(pat.x_limit == doctest::Approx(3.3333).epsilon(1e-4));
  CHECK(pat.c_limit == doctest::Approx(0.416667).epsilon(1e-6));
  const Policy b = make_policy(Parameters::with_delta(0.02, 0.18, 0.6, 0.02 + 0.18 * 0.4, 2.0));
  const Asymptote bnd = asymptote(b);
  CHECK(bnd.x_limit == b.x_under());
  CHECK(bnd.c_limit == 0.6);
}

TEST_CASE("admissibility of constant rate paths") {
  const Parameters p = impatient_gamma2();
  const double xu = safe_level(p);
  const AdmissibilityReport ok = check_admissible(p, {{0.0, p.alpha}}, 500.0, {xu * 2.0, 2.0});
  CHECK(ok.admissible);
  CHECK(ok.min_x_slack >= -1e-12);

  const AdmissibilityReport bad = check_admissible(p, {{0.0, 2.0 * p.alpha}}, 500.0, {xu * 2.0, 2.0});
  CHECK_FALSE(bad.admissible);
  REQUIRE(bad.violation_time);
  CHECK(*bad.violation_time > 0.0);
  CHECK(*bad.violation_time < 500.0);

  const AdmissibilityReport low = check_admissible(p, {{0.0, p.alpha}, {3.0, 0.5 * p.alpha}}, 10.0, {xu * 4.0, 2.0});
  CHECK_FALSE(low.admissible);
  REQUIRE(low.violation_time);
  CHECK(*low.violation_time == doctest::Approx(3.0));
}

TEST_CASE("optimal paths are admissible and respect the habit floor") {
  for (const Parameters& p : {low_gamma_patient(), patient_gamma2(), impatient_gamma2()}) {
    const Policy pol = make_policy(p);
    for (double ratio : {1.05 * pol.x_under(), 1.5 * pol.x_under(), 10.0, 40.0}) {
      const Trajectory tr = simulate(pol, {ratio * 2.253, 2.253});
      CHECK(check_admissible(p, tr).admissible);
      CHECK(tr.min_x_slack >= -1e-12);
      CHECK(tr.min_c_slack >= -1e-12);
      const double decay = p.rho * (1.0 - p.alpha);
      for (std::size_t i = 1; i < tr.samples.size(); ++i) {
        const Sample& a = tr.samples[i - 1];
        const Sample& b = tr.samples[i];
        CHECK(b.z >= a.z * std::exp(-decay * (b.t - a.t)) * (1.0 - 1e-12));
        CHECK(b.w == doctest::Approx(b.x * b.z));
        CHECK(b.C == doctest::Approx(b.c * b.z));
      }
    }
  }
}

TEST_CASE("inadmissible starts are refused") {
  const Policy pol = make_policy(patient_gamma2());
  CHECK_THROWS_AS(simulate(pol, {0.9 * pol.x_under(), 1.0}), InadmissibleStart);
  CHECK_THROWS_AS(simulate(pol, {1.0, 0.0}), InadmissibleStart);
}

TEST_CASE("realized objective equals the value function") {
  for (const Parameters& p : {low_gamma_patient(), patient_gamma2()}) {
    const Policy pol = make_policy(p);
    const double x0 = pol.derived().x0;
    for (double x : {1.1 * pol.x_under(), x0, 2.0 * x0}) {
      SimulationOptions o;
      o.horizon = 40.0 / p.delta();
      const Trajectory tr = simulate(pol, {x, 1.0}, o);
      CHECK(rel_err(tr.objective, value(pol, x)) < 1e-4);
    }
  }
  const Policy imp = make_policy(impatient_gamma2());
  for (double x : {1.1 * imp.x_under(), 2.0 * imp.x_under(), 4.0 * imp.x_under()}) {
    CHECK(rel_err(simulate(imp, {x, 1.0}).objective, value(imp, x)) < 1e-4);
  }
}

TEST_CASE("transversality probe decays") {
  const Policy imp = make_policy(impatient_gamma2());
  const InitialState init{3.0 * imp.x_under(), 1.0};
  const auto probe = transversality_probe(imp, init, {10.0, 50.0, 100.0});
  REQUIRE(probe.size() == 3);
  for (double v : probe) CHECK(v < 0.0);
  CHECK(probe[1] > probe[0]);
  CHECK(probe[2] > probe[1]);
  CHECK(std::abs(probe[2]) < 1e-3 * std::abs(value(imp, init.ratio())));

  const auto flat = transversality_probe(imp, {imp.x_under(), 1.0}, {10.0, 50.0});
  const double v_floor = value(imp, imp.x_under());
  CHECK(flat[0] == doctest::Approx(std::exp(-0.125 * 10.0) * v_floor).epsilon(1e-12));
  CHECK(flat[1] == doctest::Approx(std::exp(-0.125 * 50.0) * v_floor).epsilon(1e-12));
}

TEST_CASE("perturbed policies do no better") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const Parameters& p : {low_gamma_patient(), patient_gamma2(), impatient_gamma2()}) {
    const Policy pol = make_policy(p);
    const double x = 1.5 * std::max(pol.derived().x0, pol.x_under());
    const double v = value(pol, x);
    for (int k = 0; k < 6; ++k) {
      const double s = k % 2 == 0 ? 1.0 + 0.1 * u(rng) : 1.0 - 0.1 * u(rng);
      const Feedback fb = [&, s](double xx) { return p.alpha + s * (c_star(pol, xx) - p.alpha); };
      CHECK(evaluate_policy(p, fb, {x, 1.0}, 40.0 / p.delta()) <= v + 1e-6);
    }
  }
}

TEST_CASE("time to reach a level along the optimal path") {
  const Policy pol = make_policy(low_gamma_patient());
  const auto t = time_to_reach(pol, 2.6, 3.0);
  REQUIRE(t);
  CHECK(*t > 0.0);
  CHECK_FALSE(time_to_reach(pol, 2.6, 2.5));
}

TEST_CASE("summary JSON carries objective and limits") {
  const Policy pol = make_policy(impatient_gamma2());
  const nlohmann::json j = summary_json(simulate(pol, {370.0, 2.253}));
  CHECK(j.contains("objective"));
  CHECK(j.at("x_limit").get<double>() == doctest::Approx(pol.x_under()));
  CHECK(j.at("c_limit").get<double>() == 0.6);
}
