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
#include <optional>
#include <memory>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli_common.hpp"
#include "valspace/lq/riccati.hpp"

namespace valspace::cli {

namespace {

using lq::LinearGain;
using lq::QuadraticCoefficient;
using lq::ScalarLQProblem;

struct ProblemFlags {
  double a = 1.0, b = 2.0, q = 1.0, r = 0.5;

  void attach(CLI::App* cmd) {
    cmd->add_option("--a", a, "system coefficient")->capture_default_str();
    cmd->add_option("--b", b, "input coefficient (nonzero)")->capture_default_str();
    cmd->add_option("--q", q, "state cost weight (> 0)")->capture_default_str();
    cmd->add_option("--r", r, "control cost weight (> 0)")->capture_default_str();
  }

  ScalarLQProblem validated() const {
    const ScalarLQProblem p{a, b, q, r};
    try {
      p.validate();
    } catch (const ValidationError& e) {
      throw ValidationError("--" + e.path(), e.reason());
    }
    return p;
  }
};

QuadraticCoefficient coefficient_flag(double v, const std::string& flag) {
  if (std::isnan(v) || v < 0.0 || !std::isfinite(v))
    throw ValidationError(flag, "must be finite and nonnegative");
  return QuadraticCoefficient(v);
}

std::string shortest(double v) { return format_real(v, 0); }

nlohmann::json result_json(const lq::LookaheadResultLQ& r) {
  return {{"effective_start", shortest(r.effective_start.value())},
          {"gain", shortest(r.gain.value())},
          {"closed_loop", shortest(r.gain.closed_loop())},
          {"stable", r.gain.stable()},
          {"cost", shortest(r.cost.value())}};
}

/// Flag storage shared by the riccati subcommands; only one of them parses.
struct RiccatiFlags {
  ProblemFlags problem;
  double k0 = 0.0;
  std::size_t iters = 200;
  double l0 = 0.0;
  std::size_t max_iters = 100;
  double k_tilde = 0.0;
  std::size_t ell = 1, m = 0, steps = 1;
  std::optional<double> base;
  bool double_step = false;
  std::string grid;
};

}  // namespace

void register_riccati(CLI::App& app, const CommonOptions& common, CommandAction& action) {
  CLI::App* group = app.add_subcommand("riccati", "scalar linear-quadratic problems");
  group->require_subcommand(1);
  auto f = std::make_shared<RiccatiFlags>();

  // solve -------------------------------------------------------------------
  {
    auto* cmd = group->add_subcommand("solve", "optimal coefficient K* and gain L*");
    f->problem.attach(cmd);
    cmd->callback([&action, &common, f] {
      action = [&common, f] {
        const ScalarLQProblem p = f->problem.validated();
        const QuadraticCoefficient k = lq::solve_riccati(p);
        const LinearGain l = lq::greedy_gain(p, k);
        std::cout << "K*=" << shortest(k.value()) << "\n"
                  << "L*=" << shortest(l.value()) << "\n";
        if (!common.out_dir.empty()) {
          const nlohmann::json doc = {{"K_star", shortest(k.value())},
                                      {"L_star", shortest(l.value())},
                                      {"closed_loop", shortest(l.closed_loop())}};
          Artifacts(common.out_dir).write("riccati_solve.json", doc.dump(2) + "\n");
        }
        return kOk;
      };
    });
  }

  // vi ----------------------------------------------------------------------
  {
    auto* cmd = group->add_subcommand("vi", "value iteration K_{k+1} = F(K_k)");
    f->problem.attach(cmd);
    cmd->add_option("--k0", f->k0, "starting coefficient")->capture_default_str();
    cmd->add_option("--iters", f->iters, "number of iterations")->capture_default_str();
    cmd->callback([&action, &common, f] {
      action = [&common, f] {
        const ScalarLQProblem p = f->problem.validated();
        const auto seq = lq::value_iterate(p, coefficient_flag(f->k0, "--k0"), f->iters);
        const double k_star = lq::solve_riccati(p).value();
        Csv csv("k,K,error");
        for (std::size_t i = 0; i < seq.size(); ++i)
          csv.row(i, seq[i].value(), seq[i].value() - k_star);
        Artifacts(common.out_dir).write("riccati_vi.csv", csv.str());
        const double err = std::abs(seq.back().value() - k_star);
        std::cerr << "final |K - K*| = " << shortest(err) << "\n";
        return err <= common.tol * std::max(1.0, k_star) ? kOk : kNonConvergence;
      };
    });
  }

  // pi ----------------------------------------------------------------------
  {
    auto* cmd = group->add_subcommand("pi", "policy iteration on linear gains");
    f->problem.attach(cmd);
    cmd->add_option("--l0", f->l0, "initial (stable) gain")->required();
    cmd->add_option("--max-iters", f->max_iters, "iteration budget")->capture_default_str();
    cmd->callback([&action, &common, f] {
      action = [&common, f] {
        const ScalarLQProblem p = f->problem.validated();
        if (!(common.tol > 0.0)) throw ValidationError("--tol", "must be positive");
        const LinearGain start(p, f->l0);
        if (!start.stable()) throw ValidationError("--l0", "initial gain must be stable");
        const auto table = lq::policy_iteration_lq(p, start, common.tol, f->max_iters);
        Csv csv("k,L,K");
        for (std::size_t i = 0; i < table.size(); ++i)
          csv.row(i, table[i].gain.value(), table[i].cost.value());
        Artifacts(common.out_dir).write("riccati_pi.csv", csv.str());
        return kOk;
      };
    });
  }

  // newton ------------------------------------------------------------------
  {
    auto* cmd = group->add_subcommand(
        "newton", "l-step lookahead / truncated rollout as a Newton step at F^(l-1)(F_L^m(K))");
    f->problem.attach(cmd);
    cmd->add_option("--k", f->k_tilde, "terminal coefficient K_tilde")->required();
    cmd->add_option("--ell", f->ell, "lookahead depth")->capture_default_str();
    cmd->add_option("--m", f->m, "truncated rollout steps")->capture_default_str();
    cmd->add_option("--base-gain", f->base, "base policy gain for m > 0");
    cmd->add_option("--iterations", f->steps, "repeat the Newton step this many times")
        ->capture_default_str();
    cmd->add_flag("--double", f->double_step, "double Newton step (rollout on the lookahead policy)");
    cmd->callback([&action, &common, f] {
      action = [&common, f] {
        const ScalarLQProblem p = f->problem.validated();
        const QuadraticCoefficient k = coefficient_flag(f->k_tilde, "--k");
        if (f->ell < 1) throw ValidationError("--ell", "must be at least 1");
        std::optional<LinearGain> base_gain;
        if (f->base) base_gain = LinearGain(p, *f->base);
        if (f->m > 0 && !base_gain) throw ValidationError("--base-gain", "required when --m > 0");
        if (base_gain && f->m > 0 && !base_gain->stable())
          throw ValidationError("--base-gain", "must be stable");

        if (f->double_step) {
          if (!lq::greedy_gain(p, k).stable())
            throw ValidationError("--k", "outside the region of stability");
          const auto r = lq::double_newton(p, k);
          std::cout << result_json(r).dump(2) << "\n";
          return kOk;
        }

        const double k_star = lq::solve_riccati(p).value();
        Csv csv("iteration,effective_start,gain,closed_loop,cost,error");
        QuadraticCoefficient cur = k;
        lq::LookaheadResultLQ last{};
        for (std::size_t i = 0; i < std::max<std::size_t>(f->steps, 1); ++i) {
          last = i == 0 ? lq::lookahead_policy_lq(p, cur, f->ell, f->m, base_gain)
                        : lq::newton_step(p, cur);
          csv.row(i + 1, last.effective_start.value(), last.gain.value(),
                  last.gain.closed_loop(), last.cost.value(), last.cost.value() - k_star);
          if (!last.cost.is_finite()) break;
          cur = last.cost;
        }
        if (!common.out_dir.empty())
          Artifacts(common.out_dir).write("riccati_newton.csv", csv.str());
        std::cout << result_json(last).dump(2) << "\n";
        return kOk;
      };
    });
  }

  // sweep-stability ---------------------------------------------------------
  {
    auto* cmd = group->add_subcommand(
        "sweep-stability", "compare the region of stability with Newton-step finiteness");
    f->problem.attach(cmd);
    cmd->add_option("--grid-k", f->grid, "lo:hi:step (default straddles K_S)");
    cmd->callback([&action, &common, f] {
      action = [&common, f] {
        const ScalarLQProblem p = f->problem.validated();
        const lq::StabilityRegion region = lq::stability_region(p);
        const double ks = region.threshold.value_or(0.0);
        std::vector<double> ks_grid;
        if (!f->grid.empty()) {
          ks_grid = parse_grid(f->grid, "--grid-k");
        } else {
          const double span = std::max(1.0, 2.0 * ks);
          for (int i = 0; i <= 40; ++i) ks_grid.push_back(span * i / 40.0);
        }
        Csv csv("K,in_region,gain,closed_loop,newton_cost");
        bool consistent = true;
        for (double kv : ks_grid) {
          const auto r = lq::newton_step(p, coefficient_flag(kv, "--grid-k"));
          const bool in = region.contains(kv);
          consistent = consistent && (in == r.cost.is_finite());
          csv.row(kv, std::string(in ? "1" : "0"), r.gain.value(), r.gain.closed_loop(),
                  r.cost.value());
        }
        Artifacts(common.out_dir).write("riccati_stability.csv", csv.str());
        std::cerr << "K_S=" << (region.threshold ? shortest(*region.threshold) : "none")
                  << (region.open ? " (open)" : "") << "\n";
        if (!consistent) {
          std::cerr << "error: region of stability disagrees with Newton-step finiteness\n";
          return kInvariantViolation;
        }
        return kOk;
      };
    });
  }
}

}  // namespace valspace::cli
