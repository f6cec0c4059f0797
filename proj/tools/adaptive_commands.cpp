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

#include <nlohmann/json.hpp>

#include "cli_common.hpp"
#include "valspace/adaptive/adaptive.hpp"

namespace valspace::cli {

namespace {

using namespace valspace::adaptive;

struct AdaptiveFlags {
  double nominal_b = 2.0;
  double nominal_r = 0.5;
  std::string grid_b = "0.5:3.0:0.05";
  std::string grid_r = "0.1:2.0:0.05";
  bool cartesian = false;
  std::string schedule = "0:2:0.5,10:1:0.5";
  double x0 = 1.0;
  std::size_t horizon = 40;
  std::string mode = "all";
  double b = 1.0;
  double r = 0.5;
  std::size_t halvings = 20;

  void attach_design(CLI::App* cmd) {
    cmd->add_option("--nominal-b", nominal_b, "b of the nominal design")->capture_default_str();
    cmd->add_option("--nominal-r", nominal_r, "r of the nominal design")->capture_default_str();
  }

  NominalDesign design() const {
    lq::ScalarLQProblem p{1.0, nominal_b, 1.0, nominal_r};
    try {
      p.validate();
    } catch (const ValidationError& e) {
      throw ValidationError("--nominal-" + e.path(), e.reason());
    }
    return make_design(p);
  }
};

std::vector<ScheduleEntry> parse_schedule(const std::string& text) {
  std::vector<ScheduleEntry> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find(',', start), text.size());
    const std::string item = text.substr(start, end - start);
    const std::string path = "--schedule[" + std::to_string(out.size()) + "]";
    const std::size_t c1 = item.find(':');
    const std::size_t c2 = c1 == std::string::npos ? c1 : item.find(':', c1 + 1);
    if (c2 == std::string::npos) throw ValidationError(path, "expected time:b:r");
    const auto times = parse_ints(item.substr(0, c1), path);
    double b = 0.0, r = 0.0;
    if (times.front() < 0 || !parse_real(item.substr(c1 + 1, c2 - c1 - 1), b) ||
        !parse_real(item.substr(c2 + 1), r))
      throw ValidationError(path, "expected time:b:r");
    out.push_back({static_cast<std::size_t>(times.front()), b, r});
    start = end + 1;
  }
  return out;
}

void write_sweep(const Artifacts& out, const std::string& name,
                 const std::vector<SweepPoint>& pts) {
  Csv csv("b,r,K_star,K_rollout,K_L");
  for (const auto& p : pts) csv.row(p.b, p.r, p.k_star, p.k_rollout, p.k_base);
  out.write(name, csv.str());
}

}  // namespace

void register_adaptive(CLI::App& app, const CommonOptions& common, CommandAction& action) {
  CLI::App* group = app.add_subcommand("adaptive", "adaptive control by rollout");
  group->require_subcommand(1);
  auto f = std::make_shared<AdaptiveFlags>();

  // sweep -------------------------------------------------------------------
  {
    auto* cmd = group->add_subcommand("sweep", "K*, rollout and base coefficients as (b, r) vary");
    f->attach_design(cmd);
    cmd->add_option("--grid-b", f->grid_b, "b grid lo:hi:step")->capture_default_str();
    cmd->add_option("--grid-r", f->grid_r, "r grid lo:hi:step")->capture_default_str();
    cmd->add_flag("--cartesian", f->cartesian,
                  "sweep the product grid instead of one panel per parameter");
    cmd->callback([&action, &common, f] {
      action = [&common, f] {
        const NominalDesign d = f->design();
        const auto bs = parse_grid(f->grid_b, "--grid-b");
        const auto rs = parse_grid(f->grid_r, "--grid-r");
        const Artifacts out(common.out_dir);
        std::vector<SweepPoint> all;
        if (f->cartesian) {
          all = robustness_sweep(d, bs, rs);
          write_sweep(out, "sweep.csv", all);
        } else {
          const auto b_panel = robustness_sweep(d, bs, {d.nominal.r});
          const auto r_panel = robustness_sweep(d, {d.nominal.b}, rs);
          if (common.out_dir.empty()) {
            all = b_panel;
            all.insert(all.end(), r_panel.begin(), r_panel.end());
            write_sweep(out, "", all);
          } else {
            write_sweep(out, "sweep_b.csv", b_panel);
            write_sweep(out, "sweep_r.csv", r_panel);
            all = b_panel;
            all.insert(all.end(), r_panel.begin(), r_panel.end());
          }
        }
        const auto bad = sweep_ordering_violations(all, 1e-9);
        if (!bad.empty()) {
          std::cerr << "error: K* <= K_rollout <= K_L violated at " << bad.size()
                    << " point(s), first b=" << format_real(all[bad[0]].b, 0)
                    << " r=" << format_real(all[bad[0]].r, 0) << "\n";
          return kInvariantViolation;
        }
        return kOk;
      };
    });
  }

  // replan ------------------------------------------------------------------
  {
    auto* cmd = group->add_subcommand("replan", "closed-loop simulation under changing (b, r)");
    f->attach_design(cmd);
    cmd->add_option("--schedule", f->schedule, "change points time:b:r,...")->capture_default_str();
    cmd->add_option("--x0", f->x0, "initial state")->capture_default_str();
    cmd->add_option("--horizon", f->horizon, "number of steps")->capture_default_str();
    cmd->add_option("--mode", f->mode, "all | fixed_base | rollout_replan | oracle_reoptimize")
        ->capture_default_str();
    cmd->callback([&action, &common, f] {
      action = [&common, f] {
        const NominalDesign d = f->design();
        const auto schedule = parse_schedule(f->schedule);
        std::vector<ReplanMode> modes;
        for (auto m : {ReplanMode::fixed_base, ReplanMode::rollout_replan,
                       ReplanMode::oracle_reoptimize})
          if (f->mode == "all" || f->mode == to_string(m)) modes.push_back(m);
        if (modes.empty()) throw ValidationError("--mode", "unknown mode '" + f->mode + "'");

        // The last change point splits each run into the shared prefix and
        // the segment where the controllers differ.
        const std::size_t split = schedule.empty() ? 0 : schedule.back().time;
        Csv csv("k,b,r,mode,x,u,stage_cost");
        nlohmann::json summary = nlohmann::json::array();
        std::vector<ReplanTrace> traces;
        for (ReplanMode m : modes) {
          ReplanTrace t = replan_simulation(d, schedule, f->x0, f->horizon, m);
          for (const auto& s : t.steps)
            csv.row(s.k, s.b, s.r, std::string(to_string(m)), s.x, s.u, s.stage_cost);
          summary.push_back({{"mode", to_string(m)},
                             {"total_cost", format_real(t.total_cost, 17)},
                             {"cost_after_last_change", format_real(t.cost_from(split), 17)},
                             {"tail_bound", format_real(t.tail_bound, 17)},
                             {"diverged", t.diverged},
                             {"steps", t.steps.size()}});
          traces.push_back(std::move(t));
        }
        const Artifacts out(common.out_dir);
        out.write("replan_trace.csv", csv.str());
        if (!common.out_dir.empty()) out.write("replan_summary.json", summary.dump(2) + "\n");
        else std::cerr << summary.dump(2) << "\n";

        if (traces.size() == 3 && std::none_of(traces.begin(), traces.end(),
                                               [](const auto& t) { return t.diverged; })) {
          const double fixed = traces[0].total_cost, roll = traces[1].total_cost,
                       orac = traces[2].total_cost;
          if (orac > roll + 1e-9 || roll > fixed + 1e-9) {
            std::cerr << "error: oracle <= rollout <= fixed_base violated\n";
            return kInvariantViolation;
          }
        }
        return kOk;
      };
    });
  }

  // ratio -------------------------------------------------------------------
  {
    auto* cmd = group->add_subcommand("ratio", "(K_newton - K*)/(K - K*) on K* + 2^-i");
    f->attach_design(cmd);
    cmd->add_option("--b", f->b, "b of the perturbed problem")->capture_default_str();
    cmd->add_option("--r", f->r, "r of the perturbed problem")->capture_default_str();
    cmd->add_option("--halvings", f->halvings, "grid size")->capture_default_str();
    cmd->callback([&action, &common, f] {
      action = [&common, f] {
        const NominalDesign d = f->design();
        const lq::ScalarLQProblem p = d.with(f->b, f->r);
        try {
          p.validate();
        } catch (const ValidationError& e) {
          throw ValidationError("--" + e.path(), e.reason());
        }
        if (f->halvings < 1) throw ValidationError("--halvings", "must be at least 1");
        const double k_star = lq::solve_riccati(p).value();
        std::vector<double> grid;
        for (double k : geometric_grid(k_star, f->halvings))
          if (k - k_star >= 1e-8) grid.push_back(k);
        const RatioReport report = superlinear_ratio(p, grid);
        Csv csv("K,distance,ratio");
        for (const auto& pt : report.points) csv.row(pt.k, pt.k - k_star, pt.ratio);
        Artifacts(common.out_dir).write("superlinear_ratio.csv", csv.str());
        for (double k : report.skipped)
          std::cerr << "skipped K=" << format_real(k, 0) << " (outside region of stability)\n";
        return kOk;
      };
    });
  }
}

}  // namespace valspace::cli
