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

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

namespace habitcons::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kInadmissible = 3,
  kSolverFailure = 4,
  kVerificationFailure = 5,
};

/// Sets `key=value` overrides on a config object. Dotted keys address nested
/// objects; a bare key goes under "params". Values are parsed as JSON when
/// possible and kept as strings otherwise.
nlohmann::json apply_overrides(nlohmann::json config, const std::vector<std::string>& overrides);

/// Entry point shared by the executable and the tests. args excludes argv[0].
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace habitcons::cli
