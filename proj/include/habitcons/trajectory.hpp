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

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "habitcons/model.hpp"
#include "habitcons/policy.hpp"
#include "json.hpp"

namespace habitcons {

struct InitialState {
  double w = 0.0;  ///< wealth
  double z = 0.0;  ///< habit
  double ratio() const noexcept { return w / z; }
};

struct Sample {
  double t, x, c, z, w, C;
};

struct SimulationOptions {
  double horizon = 200.0;
  double sample_dt = 0.05;
  double rtol = 1e-10;
  double atol = 1e-12;
  double h_max = 1.0;
  double pin_tolerance = 1e-10;  ///< |X - attractor| at which the state is pinned
};

struct Trajectory {
  std::vector<Sample> samples;
  double objective = 0.0;  ///< discounted utility including the analytic tail
  double horizon = 0.0;
  double x_limit = 0.0;
  double c_limit = 0.0;
  std::optional<double> pinned_at;  ///< time the state was pinned to its attractor
  double min_x_slack = 0.0;         ///< min over samples of X - x_under
  double min_c_slack = 0.0;         ///< min over samples of c - alpha
};

struct Asymptote {
  double x_limit;
  double c_limit;
};

/// (x_under, alpha) when impatient, (x0, c0) when patient.
Asymptote asymptote(const Policy& policy);

/// Runs the optimal state ODE from w/z with c*(.) as feedback.
/// Throws InadmissibleStart when w/z is below the safe level.
Trajectory simulate(const Policy& policy, const InitialState& init, const SimulationOptions& options = {});

using Feedback = std::function<double(double)>;

/// Runs the state ODE under an arbitrary feedback rule x -> c.
///
/// The state is pinned once it comes within the pin tolerance of
/// `attractor` (if given) or of the safe level. Reaching the safe level with
/// a rate above alpha throws InadmissiblePolicy. The objective tail after the
/// horizon assumes the rate stays at `tail_rate`, or at the terminal rate
/// when none is given.
Trajectory simulate_feedback(const Parameters& params, const Feedback& feedback, const InitialState& init,
                             const SimulationOptions& options, std::optional<double> attractor,
                             std::optional<double> tail_rate);

struct ConsumptionSegment {
  double t_start;  ///< segment runs until the next segment's start (or the horizon)
  double c;        ///< consumption-to-habit rate on the segment
};

struct AdmissibilityReport {
  bool admissible = true;
  std::optional<double> violation_time;
  std::string violation;  ///< empty when admissible
  double min_x_slack = 0.0;
  double min_c_slack = 0.0;
};

/// Exact solve of the ratio dynamics under a piecewise-constant rate path.
AdmissibilityReport check_admissible(const Parameters& params, const std::vector<ConsumptionSegment>& path,
                                     double horizon, const InitialState& init);
/// Checks the samples of a simulated path.
AdmissibilityReport check_admissible(const Parameters& params, const Trajectory& trajectory);

/// e^(-delta T) v(X*(T)) for each horizon T.
std::vector<double> transversality_probe(const Policy& policy, const InitialState& init,
                                         const std::vector<double>& horizons);

/// First time the optimal state started at x_start reaches x_target.
std::optional<double> time_to_reach(const Policy& policy, double x_start, double x_target,
                                    const SimulationOptions& options = {});

nlohmann::json summary_json(const Trajectory& trajectory);

}  // namespace habitcons
