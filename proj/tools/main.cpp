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

// valspace: command-line front end for the Riccati, finite-MDP and adaptive
// rollout experiments.
//
// Exit codes: 0 success, 2 invalid input, 3 non-convergence, 4 a checked
// invariant failed.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cli_common.hpp"

namespace {

using valspace::ValidationError;

std::string json_scalar(const nlohmann::json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return valspace::format_real(v.get<double>(), 17);
  throw ValidationError("config." + key, "expected a string or number");
}

/// Appends `--key value` for every config entry whose flag is absent from
/// the command line, so explicit flags take precedence. Arrays become
/// comma-separated lists; `true` booleans become bare flags.
std::vector<std::string> merge_config(std::vector<std::string> args) {
  auto it = std::find(args.begin(), args.end(), "--config");
  if (it == args.end()) return args;
  if (it + 1 == args.end()) throw ValidationError("--config", "missing file name");
  const std::string file = *(it + 1);
  args.erase(it, it + 2);

  std::ifstream in(file);
  if (!in) throw ValidationError("--config", "cannot open '" + file + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("--config", std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("config", "expected an object");

  for (const auto& [key, value] : doc.items()) {
    const std::string flag = "--" + key;
    const bool given = std::any_of(args.begin(), args.end(), [&](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
    if (given) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back(flag);
      continue;
    }
    std::string text;
    if (value.is_array()) {
      for (std::size_t i = 0; i < value.size(); ++i)
        text += (i ? "," : "") + json_scalar(value[i], key + "[" + std::to_string(i) + "]");
    } else {
      text = json_scalar(value, key);
    }
    args.push_back(flag);
    args.push_back(text);
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace valspace::cli;

  CLI::App app{"valspace: approximation in value space as Newton's method"};
  app.require_subcommand(1);
  CommonOptions common;
  CommandAction action;

  register_riccati(app, common, action);
  register_mdp(app, common, action);
  register_adaptive(app, common, action);
  for (CLI::App* group : app.get_subcommands({}))
    for (CLI::App* cmd : group->get_subcommands({})) {
      cmd->add_option("--out", common.out_dir, "write artifacts into this directory");
      cmd->add_option("--tol", common.tol, "tolerance")->capture_default_str();
      cmd->add_option("--seed", common.seed, "seed for all randomness")->capture_default_str();
      cmd->add_option("--config", "JSON document of flag values (flags win)");
    }

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = merge_config(std::move(args));
    std::reverse(args.begin(), args.end());
    app.parse(args);
    return action ? action() : kOk;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidationError;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidationError;
  } catch (const valspace::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << " (residual "
              << valspace::format_real(e.residual(), 0) << ")\n";
    return kNonConvergence;
  }
}
