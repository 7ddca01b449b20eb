// Copyright 2026 The diacal Authors.
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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace diacal {

/// Base of every error raised by the library. The CLI maps these to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameter value (bad window, factor, epsilon, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration combination.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Input violates an operation's precondition (wrong space, off-simplex row, ...).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Request exceeds what the implementation supports (e.g. powerset for huge S).
class CapabilityError : public Error {
 public:
  using Error::Error;
};

/// Malformed file content. `line` is 1-based, 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// The optimizer produced a non-finite objective.
class OptimizationError : public Error {
 public:
  OptimizationError(const std::string& what, int iteration)
      : Error(what + " at iteration " + std::to_string(iteration)), iteration_(iteration) {}
  int iteration() const noexcept { return iteration_; }

 private:
  int iteration_;
};

}  // namespace diacal
