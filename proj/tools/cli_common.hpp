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

// Shared plumbing for the valspace command-line tool.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include <CLI11.hpp>

#include "valspace/errors.hpp"
#include "valspace/format.hpp"

namespace valspace::cli {

enum ExitCode : int {
  kOk = 0,
  kValidationError = 2,
  kNonConvergence = 3,
  kInvariantViolation = 4,
};

/// Options every subcommand accepts.
struct CommonOptions {
  std::string out_dir;
  double tol = 1e-12;
  std::uint64_t seed = 0;
};

/// Writes named artifacts into --out DIR, or to stdout when no directory
/// was given.
class Artifacts {
 public:
  explicit Artifacts(const std::string& dir) {
    if (!dir.empty()) {
      dir_ = std::filesystem::path(dir);
      std::error_code ec;
      std::filesystem::create_directories(*dir_, ec);
      if (ec) throw ValidationError("--out", "cannot create directory '" + dir + "'");
    }
  }

  void write(const std::string& name, const std::string& content) const {
    if (!dir_) {
      std::cout << content;
      return;
    }
    std::ofstream f(*dir_ / name, std::ios::binary);
    if (!f) throw ValidationError("--out", "cannot write '" + name + "'");
    f << content;
  }

 private:
  std::optional<std::filesystem::path> dir_;
};

/// CSV builder: header row, 17 significant digits, `inf` for infinities.
class Csv {
 public:
  explicit Csv(const std::string& header) { text_ << header << '\n'; }

  template <typename... Cells>
  void row(const Cells&... cells) {
    bool first = true;
    ((text_ << (first ? "" : ",") << cell(cells), first = false), ...);
    text_ << '\n';
  }

  std::string str() const { return text_.str(); }

 private:
  static std::string cell(double v) { return format_real(v, 17); }
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  template <typename Int>
    requires std::is_integral_v<Int>
  static std::string cell(Int v) {
    return std::to_string(v);
  }

  std::ostringstream text_;
};

/// Deferred command body chosen by the parse; returns the exit code.
using CommandAction = std::function<int()>;

void register_riccati(CLI::App& app, const CommonOptions& common, CommandAction& action);
void register_mdp(CLI::App& app, const CommonOptions& common, CommandAction& action);
void register_adaptive(CLI::App& app, const CommonOptions& common, CommandAction& action);

/// "lo:hi:step" grid specification.
std::vector<double> parse_grid(const std::string& text, const std::string& flag);

/// Comma-separated reals ("inf" allowed).
std::vector<double> parse_reals(const std::string& text, const std::string& flag);

/// Comma-separated integers.
std::vector<long long> parse_ints(const std::string& text, const std::string& flag);

}  // namespace valspace::cli
