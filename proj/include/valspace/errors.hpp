/*
 * Copyright 2026 The valspace Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace valspace {

/// Raised when an input violates a type invariant. `path()` names the
/// offending field, e.g. `transitions[2][1][0].p` or `--b`.
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string path, const std::string& what)
      : std::invalid_argument(path + ": " + what), path_(std::move(path)), reason_(what) {}

  const std::string& path() const noexcept { return path_; }
  /// Message without the path prefix.
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string path_;
  std::string reason_;
};

/// An iterative method ran out of iterations before meeting its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace valspace
