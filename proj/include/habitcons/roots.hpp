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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>

#include <boost/math/tools/toms748_solve.hpp>

#include "habitcons/error.hpp"

namespace habitcons {

/// Root of f on [a, b] given a sign change, to absolute tolerance x_tol.
/// Throws ConvergenceFailure if the ends do not bracket a root or the
/// iteration budget runs out before the bracket shrinks below x_tol.
template <class F>
double find_root(F&& f, double a, double b, double x_tol = 1e-10, std::uintmax_t max_iter = 200) {
  if (a > b) std::swap(a, b);
  const double fa = f(a);
  const double fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (!std::isfinite(fa) || !std::isfinite(fb) || (fa < 0.0) == (fb < 0.0)) {
    throw ConvergenceFailure("root not bracketed on [" + std::to_string(a) + ", " + std::to_string(b) +
                             "]: f = " + std::to_string(fa) + ", " + std::to_string(fb));
  }
  auto tol = [x_tol](double lo, double hi) {
    return std::abs(hi - lo) <= std::max(x_tol, 8.0 * std::numeric_limits<double>::epsilon() * std::abs(lo));
  };
  std::uintmax_t iters = max_iter;
  const auto [lo, hi] = boost::math::tools::toms748_solve(f, a, b, fa, fb, tol, iters);
  if (!tol(lo, hi)) throw ConvergenceFailure("root finder exhausted its iteration budget");
  return 0.5 * (lo + hi);
}

}  // namespace habitcons
