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

#include <algorithm>
#include <cmath>
#include <iostream>
#include <memory>
#include <optional>

#include <nlohmann/json.hpp>

#include "cli_common.hpp"
#include "valspace/mdp/io.hpp"
#include "valspace/mdp/lookahead.hpp"
#include "valspace/mdp/operators.hpp"
#include "valspace/mdp/random_mdp.hpp"

namespace valspace::cli {

namespace {

using namespace valspace::mdp;

struct MdpFlags {
  std::string file;
  bool random = false;
  double alpha = 0.9;
  std::size_t max_iters = 100000;
  std::string base;
  std::optional<std::size_t> m;
  std::size_t ell = 1;
  std::string terminal;
  std::string ce = "exact";
  std::string method = "memoized";
  std::optional<std::size_t> state;

  void attach_source(CLI::App* cmd) {
    cmd->add_option("--file", file, "MDP document (JSON)");
    cmd->add_flag("--random", random, "generate a random instance from --seed");
    cmd->add_option("--alpha", alpha, "discount of a random instance")->capture_default_str();
  }
};

FiniteMDP load_source(const MdpFlags& f, const CommonOptions& common, const Artifacts& out) {
  if (f.random == !f.file.empty())
    throw ValidationError("--file", "give exactly one of --file or --random");
  if (!f.random) return load_mdp(f.file, "--file");
  if (!(f.alpha > 0.0 && f.alpha <= 1.0)) throw ValidationError("--alpha", "must lie in (0, 1]");
  Rng rng(common.seed);
  FiniteMDP m = random_mdp(rng, {.discount = f.alpha});
  if (!common.out_dir.empty()) out.write("mdp.json", mdp_to_json(m).dump(2) + "\n");
  return m;
}

/// Control ids for states 1..n-1, mapped to positions. Empty text selects
/// the first control everywhere.
StationaryPolicy policy_flag(const FiniteMDP& m, const std::string& text,
                             const std::string& flag) {
  StationaryPolicy mu(m.state_count(), 0);
  if (text.empty()) return mu;
  const auto ids = parse_ints(text, flag);
  if (ids.size() != m.state_count() - 1)
    throw ValidationError(flag, "expected one control id per nonterminal state");
  for (std::size_t x = 1; x < m.state_count(); ++x) {
    const auto& acts = m.actions(x);
    auto it = std::find_if(acts.begin(), acts.end(),
                           [&](const Action& a) { return a.id == ids[x - 1]; });
    if (it == acts.end())
      throw ValidationError(flag + "[" + std::to_string(x - 1) + "]",
                            "not an admissible control id");
    mu[x] = static_cast<std::size_t>(it - acts.begin());
  }
  return mu;
}

ValueFunction terminal_flag(const FiniteMDP& m, const std::string& text) {
  ValueFunction j(m.state_count(), 0.0);
  if (text.empty()) return j;
  const auto v = parse_reals(text, "--terminal");
  if (v.size() != m.state_count() - 1)
    throw ValidationError("--terminal", "expected one value per nonterminal state");
  for (std::size_t x = 1; x < m.state_count(); ++x) {
    if (std::isnan(v[x - 1]) || v[x - 1] < 0.0)
      throw ValidationError("--terminal[" + std::to_string(x - 1) + "]", "must be nonnegative");
    j[x] = v[x - 1];
  }
  return j;
}

int control_id(const FiniteMDP& m, std::size_t x, std::size_t u) { return m.actions(x)[u].id; }

}  // namespace

void register_mdp(CLI::App& app, const CommonOptions& common, CommandAction& action) {
  CLI::App* group = app.add_subcommand("mdp", "finite Markov decision problems");
  group->require_subcommand(1);
  auto f = std::make_shared<MdpFlags>();

  // solve -------------------------------------------------------------------
  {
    auto* cmd = group->add_subcommand("solve", "optimal cost by value and policy iteration");
    f->attach_source(cmd);
    cmd->add_option("--max-iters", f->max_iters, "value iteration budget")->capture_default_str();
    cmd->callback([&action, &common, f] {
      action = [&common, f] {
        const Artifacts out(common.out_dir);
        const FiniteMDP m = load_source(*f, common, out);
        if (!(common.tol > 0.0)) throw ValidationError("--tol", "must be positive");
        const auto vi = value_iteration_mdp(m, ValueFunction(m.state_count(), 0.0),
                                            common.tol, f->max_iters);
        if (!vi.converged)
          throw ConvergenceError("value iteration did not converge", vi.residual);
        StationaryPolicy start = greedy_policy(m, vi.values);
        if (properness_check(m, start) != Properness::stable)
          throw ConvergenceError("greedy policy of the value iterate is not stable", vi.residual);
        const auto pi = policy_iteration_mdp(m, start);
        Csv csv("state,control,J_star,J_vi");
        for (std::size_t x = 1; x < m.state_count(); ++x) {
          csv.row(x, control_id(m, x, pi.policy[x]), pi.values[x], vi.values[x]);
        }
        out.write("mdp_solve.csv", csv.str());
        std::cerr << "value iteration: " << vi.iterations << " iterations, residual "
                  << format_real(vi.residual, 0) << "; policy iteration: " << pi.iterations
                  << " iterations\n";
        return kOk;
      };
    });
  }

  // rollout -----------------------------------------------------------------
  {
    auto* cmd = group->add_subcommand("rollout", "rollout (one policy improvement) of a base policy");
    f->attach_source(cmd);
    cmd->add_option("--base", f->base, "control ids of the base policy for states 1..n-1");
    cmd->add_option("--m", f->m, "truncate the base evaluation to m steps");
    cmd->callback([&action, &common, f] {
      action = [&common, f] {
        const Artifacts out(common.out_dir);
        const FiniteMDP m = load_source(*f, common, out);
        const StationaryPolicy base = policy_flag(m, f->base, "--base");
        if (properness_check(m, base) != Properness::stable)
          throw ValidationError("--base", "base policy is not stable");
        const StationaryPolicy rolled = rollout_policy_mdp(m, base, f->m);
        const ValueFunction jb = policy_evaluation_mdp(m, base);
        const ValueFunction jr = policy_evaluation_mdp(m, rolled);
        Csv csv("state,base,rollout,J_base,J_rollout");
        bool improved = true;
        for (std::size_t x = 1; x < m.state_count(); ++x) {
          csv.row(x, control_id(m, x, base[x]), control_id(m, x, rolled[x]), jb[x], jr[x]);
          improved = improved && jr[x] <= jb[x] + 1e-9 * std::max(1.0, jb[x]);
        }
        out.write("mdp_rollout.csv", csv.str());
        if (!f->m && !improved) {
          std::cerr << "error: rollout cost exceeds base cost\n";
          return kInvariantViolation;
        }
        return kOk;
      };
    });
  }

  // lookahead ---------------------------------------------------------------
  {
    auto* cmd = group->add_subcommand("lookahead", "l-step lookahead with truncated rollout and CE");
    f->attach_source(cmd);
    cmd->add_option("--ell", f->ell, "lookahead depth")->capture_default_str();
    cmd->add_option("--m", f->m, "truncated rollout steps at the leaves");
    cmd->add_option("--base", f->base, "control ids of the base policy for states 1..n-1");
    cmd->add_option("--terminal", f->terminal, "J_tilde for states 1..n-1 (default zero)");
    cmd->add_option("--ce", f->ce, "exact | ce_after_first | ce_all")->capture_default_str();
    cmd->add_option("--method", f->method, "memoized | tree")->capture_default_str();
    cmd->add_option("--state", f->state, "single nonterminal state (default: all)");
    cmd->callback([&action, &common, f] {
      action = [&common, f] {
        const Artifacts out(common.out_dir);
        const FiniteMDP m = load_source(*f, common, out);
        LookaheadSpec spec;
        if (f->ell < 1) throw ValidationError("--ell", "must be at least 1");
        spec.ell = f->ell;
        spec.m = f->m.value_or(0);
        spec.terminal = terminal_flag(m, f->terminal);
        if (!f->base.empty() || spec.m > 0) spec.base = policy_flag(m, f->base, "--base");
        if (f->ce == "exact") spec.ce_mode = CeMode::exact;
        else if (f->ce == "ce_after_first") spec.ce_mode = CeMode::ce_after_first;
        else if (f->ce == "ce_all") spec.ce_mode = CeMode::ce_all;
        else throw ValidationError("--ce", "expected exact, ce_after_first or ce_all");
        if (f->method == "memoized") spec.method = SearchMethod::memoized;
        else if (f->method == "tree") spec.method = SearchMethod::tree;
        else throw ValidationError("--method", "expected memoized or tree");
        if (f->state && (*f->state == 0 || *f->state >= m.state_count()))
          throw ValidationError("--state", "must be a nonterminal state");

        Csv csv("state,control,value,leaf_paths");
        const auto decisions = lookahead_all_states(m, spec);
        for (std::size_t x = 1; x < m.state_count(); ++x) {
          if (f->state && *f->state != x) continue;
          csv.row(x, control_id(m, x, decisions[x].control), decisions[x].value,
                  decisions[x].leaf_paths);
        }
        out.write("mdp_lookahead.csv", csv.str());
        return kOk;
      };
    });
  }

  // lyapunov ----------------------------------------------------------------
  {
    auto* cmd = group->add_subcommand("lyapunov", "check J_tilde >= T J_tilde");
    f->attach_source(cmd);
    cmd->add_option("--terminal", f->terminal, "J_tilde for states 1..n-1 (default zero)");
    cmd->callback([&action, &common, f] {
      action = [&common, f] {
        const Artifacts out(common.out_dir);
        const FiniteMDP m = load_source(*f, common, out);
        const ValueFunction j = terminal_flag(m, f->terminal);
        for (double v : j)
          if (!std::isfinite(v)) throw ValidationError("--terminal", "must be finite");
        const auto report = lyapunov_check(m, j, common.tol);
        const StationaryPolicy greedy = greedy_policy(m, j);
        const nlohmann::json doc = {
            {"holds", report.holds},
            {"violations", report.violations},
            {"greedy_policy_stable", properness_check(m, greedy) == Properness::stable}};
        out.write("mdp_lyapunov.json", doc.dump(2) + "\n");
        return kOk;
      };
    });
  }
}

}  // namespace valspace::cli
