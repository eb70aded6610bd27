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

// Adaptive Dormand-Prince 5(4) integrator with the standard 4th-order
// continuous extension. Fixed-size state, explicit step-by-step observer so
// callers can stop on events and locate them on the dense output.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include "habitcons/error.hpp"

namespace habitcons::ode {

template <std::size_t N>
using State = std::array<double, N>;

struct Tolerances {
  double rtol = 1e-10;
  double atol = 1e-12;
  double h_initial = 0.0;  ///< 0 selects a starting step automatically
  double h_max = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 2'000'000;
};

/// One accepted step, with dense output on [t0, t1].
template <std::size_t N>
struct Step {
  double t0 = 0.0;
  double t1 = 0.0;
  State<N> y0{};
  State<N> y1{};
  State<N> f0{};  ///< derivative at t0
  State<N> f1{};  ///< derivative at t1
  std::array<State<N>, 5> cont{};

  State<N> interpolate(double t) const {
    const double h = t1 - t0;
    const double theta = h == 0.0 ? 0.0 : (t - t0) / h;
    const double theta1 = 1.0 - theta;
    State<N> out;
    for (std::size_t i = 0; i < N; ++i) {
      out[i] = cont[0][i] +
               theta * (cont[1][i] + theta1 * (cont[2][i] + theta * (cont[3][i] + theta1 * cont[4][i])));
    }
    return out;
  }
};

enum class StepAction { Continue, Stop };

template <std::size_t N>
struct Result {
  double t = 0.0;
  State<N> y{};
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  bool stopped_by_observer = false;
};

namespace detail {

// Butcher tableau.
inline constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
inline constexpr double a21 = 1.0 / 5.0;
inline constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
inline constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
inline constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                        a54 = -212.0 / 729.0;
inline constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                        a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
inline constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                        a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
inline constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                        e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
// Continuous extension.
inline constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

template <std::size_t N>
bool all_finite(const State<N>& y) {
  return std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace detail

/// Integrates y' = f(t, y) from t0 towards t_end (either direction).
///
/// `observer(const Step<N>&)` is called after every accepted step and may
/// return StepAction::Stop. Throws IntegrationFailure when the step size
/// underflows, the step budget runs out, or the right side stops being finite.
template <std::size_t N, class Rhs, class Observer>
Result<N> integrate(Rhs&& f, double t0, State<N> y0, double t_end, const Tolerances& tol,
                    Observer&& observer) {
  using namespace detail;
  Result<N> result;
  result.t = t0;
  result.y = y0;
  if (t_end == t0) return result;
  const double dir = t_end > t0 ? 1.0 : -1.0;

  auto scale = [&](const State<N>& a, const State<N>& b, std::size_t i) {
    return tol.atol + tol.rtol * std::max(std::abs(a[i]), std::abs(b[i]));
  };

  double t = t0;
  State<N> y = y0;
  State<N> k1 = f(t, y);
  if (!all_finite<N>(k1)) throw IntegrationFailure("right-hand side not finite at the initial point");

  double h = tol.h_initial;
  if (h <= 0.0) {
    // Hairer-Norsett-Wanner starting step heuristic.
    double d0 = 0.0, d1n = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sc = tol.atol + tol.rtol * std::abs(y[i]);
      d0 += (y[i] / sc) * (y[i] / sc);
      d1n += (k1[i] / sc) * (k1[i] / sc);
    }
    d0 = std::sqrt(d0 / N);
    d1n = std::sqrt(d1n / N);
    h = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
  }
  h = std::min({h, tol.h_max, std::abs(t_end - t0)});

  const double h_floor_rel = 64.0 * std::numeric_limits<double>::epsilon();
  std::size_t steps = 0;
  bool last = false;

  while (!last) {
    if (++steps > tol.max_steps) throw IntegrationFailure("step budget exhausted");
    if (h <= h_floor_rel * std::max(1.0, std::abs(t))) {
      throw IntegrationFailure("step size underflow near t = " + std::to_string(t));
    }
    double hs = dir * h;
    if (dir * (t + hs - t_end) >= 0.0) {
      hs = t_end - t;
      last = true;
    }

    State<N> tmp, k2, k3, k4, k5, k6, k7, y1;
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + hs * a21 * k1[i];
    k2 = f(t + c2 * hs, tmp);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
    k3 = f(t + c3 * hs, tmp);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    k4 = f(t + c4 * hs, tmp);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    k5 = f(t + c5 * hs, tmp);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    k6 = f(t + hs, tmp);
    for (std::size_t i = 0; i < N; ++i)
      y1[i] = y[i] + hs * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    k7 = f(t + hs, y1);

    double err = 0.0;
    bool finite = all_finite<N>(y1) && all_finite<N>(k7);
    if (finite) {
      for (std::size_t i = 0; i < N; ++i) {
        const double e =
            hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        const double r = e / scale(y, y1, i);
        err += r * r;
      }
      err = std::sqrt(err / N);
      finite = std::isfinite(err);
    }

    if (!finite || err > 1.0) {
      ++result.rejected;
      last = false;
      const double factor = finite ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.25;
      h = std::abs(hs) * factor;
      continue;
    }

    Step<N> step;
    step.t0 = t;
    step.t1 = last ? t_end : t + hs;
    step.y0 = y;
    step.y1 = y1;
    step.f0 = k1;
    step.f1 = k7;
    for (std::size_t i = 0; i < N; ++i) {
      const double ydiff = y1[i] - y[i];
      const double bspl = hs * k1[i] - ydiff;
      step.cont[0][i] = y[i];
      step.cont[1][i] = ydiff;
      step.cont[2][i] = bspl;
      step.cont[3][i] = ydiff - hs * k7[i] - bspl;
      step.cont[4][i] =
          hs * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
    }

    t = step.t1;
    y = y1;
    k1 = k7;
    ++result.accepted;
    result.t = t;
    result.y = y;

    if (observer(static_cast<const Step<N>&>(step)) == StepAction::Stop) {
      result.stopped_by_observer = true;
      return result;
    }

    const double factor = err == 0.0 ? 5.0 : std::min(5.0, std::max(0.2, 0.9 * std::pow(err, -0.2)));
    h = std::min(std::abs(hs) * factor, tol.h_max);
  }
  return result;
}

template <std::size_t N, class Rhs>
Result<N> integrate(Rhs&& f, double t0, State<N> y0, double t_end, const Tolerances& tol) {
  return integrate<N>(std::forward<Rhs>(f), t0, y0, t_end, tol,
                      [](const Step<N>&) { return StepAction::Continue; });
}

/// Locates t in [step.t0, step.t1] where g(step.interpolate(t)) changes sign,
/// by bisection on the dense output. `g` must differ in sign at the ends.
template <std::size_t N, class G>
double locate_crossing(const Step<N>& step, G&& g, double t_tol = 1e-13) {
  double a = step.t0, b = step.t1;
  double ga = g(step.y0);
  for (int it = 0; it < 200 && std::abs(b - a) > t_tol * std::max(1.0, std::abs(a)); ++it) {
    const double mid = 0.5 * (a + b);
    const double gm = g(step.interpolate(mid));
    if ((gm < 0.0) == (ga < 0.0)) {
      a = mid;
      ga = gm;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace habitcons::ode
