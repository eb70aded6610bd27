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

#include <stdexcept>
#include <string>
#include <utility>

namespace habitcons {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Configuration / parameter errors.

class OutOfRange : public Error {
 public:
  OutOfRange(std::string field, const std::string& what)
      : Error("parameter '" + field + "' out of range: " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class GammaNearOne : public Error {
 public:
  explicit GammaNearOne(double gamma)
      : Error("gamma = " + std::to_string(gamma) + " is too close to 1 (log utility is not supported)") {}
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Numerical failures.

class IntegrationFailure : public Error {
 public:
  using Error::Error;
};

class BoundViolation : public Error {
 public:
  using Error::Error;
};

class ConvergenceFailure : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

// Admissibility.

class InadmissibleStart : public Error {
 public:
  using Error::Error;
};

class InadmissiblePolicy : public Error {
 public:
  using Error::Error;
};

// Dynamic-programming oracle.

class NoFeasibleAction : public Error {
 public:
  using Error::Error;
};

class NonConvergence : public Error {
 public:
  using Error::Error;
};

}  // namespace habitcons
