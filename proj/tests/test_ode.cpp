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


#include "habitcons/ode.hpp"

#include <cmath>

#include "doctest.h"
#include "habitcons/error.hpp"
#include "habitcons/roots.hpp"

using namespace habitcons;

TEST_CASE("exponential growth, forward and backward") {
  auto f = [](double, const ode::State<1>& y) { return ode::State<1>{y[0]}; };
  const auto fwd = ode::integrate<1>(f, 0.0, {1.0}, 1.0, ode::Tolerances{});
  CHECK(fwd.y[0] == doctest::Approx(std::exp(1.0)).epsilon(1e-9));
  CHECK(fwd.t == 1.0);
  const auto bwd = ode::integrate<1>(f, 1.0, {std::exp(1.0)}, 0.0, ode::Tolerances{});
  CHECK(bwd.y[0] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("harmonic oscillator dense output") {
  auto f = [](double, const ode::State<2>& y) { return ode::State<2>{y[1], -y[0]}; };
  ode::Tolerances tol;
  tol.h_max = 0.5;
  double worst = 0.0;
  ode::integrate<2>(f, 0.0, {0.0, 1.0}, 10.0, tol, [&](const ode::Step<2>& s) {
    for (int k = 1; k < 4; ++k) {
      const double t = s.t0 + (s.t1 - s.t0) * k / 4.0;
      worst = std::max(worst, std::abs(s.interpolate(t)[0] - std::sin(t)));
    }
    return ode::StepAction::Continue;
  });
  CHECK(worst < 1e-8);
}

TEST_CASE("observer stop and event location") {
  auto f = [](double, const ode::State<1>& y) { return ode::State<1>{y[0]}; };
  double hit = -1.0;
  const auto res = ode::integrate<1>(f, 0.0, {1.0}, 10.0, ode::Tolerances{}, [&](const ode::Step<1>& s) {
    if (s.y1[0] >= 2.0) {
      hit = ode::locate_crossing<1>(s, [](const ode::State<1>& y) { return y[0] - 2.0; });
      return ode::StepAction::Stop;
    }
    return ode::StepAction::Continue;
  });
  CHECK(res.stopped_by_observer);
  CHECK(hit == doctest::Approx(std::log(2.0)).epsilon(1e-9));
}

TEST_CASE("non-finite right side is reported") {
  auto f = [](double, const ode::State<1>& y) { return ode::State<1>{y[0] * y[0]}; };
  CHECK_THROWS_AS(ode::integrate<1>(f, 0.0, {1.0}, 2.0, ode::Tolerances{}), IntegrationFailure);
}

TEST_CASE("bracketed root finding") {
  CHECK(find_root([](double x) { return x * x - 2.0; }, 0.0, 2.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
  CHECK_THROWS_AS(find_root([](double x) { return x * x + 1.0; }, 0.0, 2.0), ConvergenceFailure);
}
