// Copyright 2026 The hyperens Authors
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

namespace hyperens {

/// Bad configuration or invalid arguments. CLI exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed, missing or inconsistent input data. CLI exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Divergent training or a solver that failed to converge. CLI exit code 3.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Solver ran out of iterations; carries the last iterate delta.
class ConvergenceError : public NumericError {
 public:
  ConvergenceError(const std::string& what, double last_delta)
      : NumericError(what), last_delta_(last_delta) {}

  double last_delta() const noexcept { return last_delta_; }

 private:
  double last_delta_;
};

}  // namespace hyperens
