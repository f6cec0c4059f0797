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

// Adaptive control by rollout on the scalar problem x' = a x + b u: a gain
// designed for nominal (b, r) is kept as the rollout base while the true
// parameters drift, and the rollout gain is recomputed from the current
// parameters.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "valspace/errors.hpp"
#include "valspace/lq/riccati.hpp"

namespace valspace::adaptive {

using lq::LinearGain;
using lq::QuadraticCoefficient;
using lq::ScalarLQProblem;

struct NominalDesign {
  ScalarLQProblem nominal;
  double fixed_gain = 0.0;  ///< optimal gain of `nominal`

  /// Problem with the design's a and q and the given (b, r).
  ScalarLQProblem with(double b, double r) const {
    ScalarLQProblem p = nominal;
    p.b = b;
    p.r = r;
    return p;
  }
};

inline NominalDesign make_design(const ScalarLQProblem& nominal) {
  nominal.validate();
  const QuadraticCoefficient k = lq::solve_riccati(nominal);
  return {nominal, lq::greedy_gain(nominal, k).value()};
}

/// The reference design: x' = x + 2u, cost x^2 + 0.5 u^2.
inline NominalDesign reference_design() { return make_design({1.0, 2.0, 1.0, 0.5}); }

struct SweepPoint {
  double b = 0.0;
  double r = 0.0;
  double k_star = 0.0;
  double k_rollout = 0.0;  ///< +inf when the fixed gain is unstable
  double k_base = 0.0;     ///< +inf when the fixed gain is unstable
};

inline SweepPoint sweep_point(const NominalDesign& design, double b, double r) {
  const ScalarLQProblem p = design.with(b, r);
  p.validate();
  const LinearGain base(p, design.fixed_gain);
  SweepPoint pt{b, r, lq::solve_riccati(p).value(), lq::kInfinity, lq::kInfinity};
  if (base.stable()) {
    pt.k_base = lq::policy_cost(p, base).value();
    pt.k_rollout = lq::rollout_lq(p, base).cost.value();
  }
  return pt;
}

/// Every (b, r) in b_grid x r_grid, b-major.
inline std::vector<SweepPoint> robustness_sweep(const NominalDesign& design,
                                                const std::vector<double>& b_grid,
                                                const std::vector<double>& r_grid) {
  if (b_grid.empty()) throw ValidationError("grid-b", "must be nonempty");
  if (r_grid.empty()) throw ValidationError("grid-r", "must be nonempty");
  std::vector<SweepPoint> out;
  out.reserve(b_grid.size() * r_grid.size());
  for (double b : b_grid)
    for (double r : r_grid) out.push_back(sweep_point(design, b, r));
  return out;
}

/// Points where K* <= K_rollout <= K_base fails by more than `tol`
/// (relative to max(1, K_base)). Unstable rows are not checked.
inline std::vector<std::size_t> sweep_ordering_violations(const std::vector<SweepPoint>& pts,
                                                          double tol = 1e-9) {
  std::vector<std::size_t> bad;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const SweepPoint& p = pts[i];
    if (!std::isfinite(p.k_base)) continue;
    const double scale = std::max(1.0, p.k_base);
    if (p.k_star > p.k_rollout + tol * scale || p.k_rollout > p.k_base + tol * scale)
      bad.push_back(i);
  }
  return bad;
}

/// lo, lo+step, ... up to hi (inclusive within half a step), computed as
/// lo + i*step so grids do not accumulate drift.
inline std::vector<double> linear_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo) || !std::isfinite(lo) || !std::isfinite(hi))
    throw ValidationError("grid", "expected lo <= hi and step > 0");
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 0.5)) + 1;
  std::vector<double> g(count);
  for (std::size_t i = 0; i < count; ++i) g[i] = lo + static_cast<double>(i) * step;
  return g;
}

// ---------------------------------------------------------------------------
// Closed-loop replanning

enum class ReplanMode { fixed_base, rollout_replan, oracle_reoptimize };

inline std::string_view to_string(ReplanMode m) {
  switch (m) {
    case ReplanMode::fixed_base: return "fixed_base";
    case ReplanMode::rollout_replan: return "rollout_replan";
    case ReplanMode::oracle_reoptimize: return "oracle_reoptimize";
  }
  return "?";
}

/// Parameters in force from step `time` on, until the next entry.
struct ScheduleEntry {
  std::size_t time = 0;
  double b = 0.0;
  double r = 0.0;
};

struct ReplanStep {
  std::size_t k = 0;
  double b = 0.0;
  double r = 0.0;
  double x = 0.0;
  double u = 0.0;
  double stage_cost = 0.0;
};

struct ReplanTrace {
  ReplanMode mode = ReplanMode::fixed_base;
  std::vector<ScheduleEntry> schedule;
  std::vector<ReplanStep> steps;
  double final_state = 0.0;
  double total_cost = 0.0;
  /// Optimal cost-to-go K*(current params) * x_N^2 at the horizon.
  double tail_bound = 0.0;
  bool diverged = false;

  /// Sum of stage costs from step `from` on.
  double cost_from(std::size_t from) const {
    double total = 0.0;
    for (const auto& s : steps)
      if (s.k >= from) total += s.stage_cost;
    return total;
  }
};

inline constexpr double kDivergenceBound = 1e12;

/// Gain the controller applies under parameters p. When the fixed gain is
/// unstable for p, rollout's base cost is +inf and the one-step lookahead
/// against it is the deadbeat limit -a/b.
inline LinearGain replan_gain(const NominalDesign& design, const ScalarLQProblem& p,
                              ReplanMode mode) {
  switch (mode) {
    case ReplanMode::fixed_base:
      return LinearGain(p, design.fixed_gain);
    case ReplanMode::rollout_replan: {
      const LinearGain base(p, design.fixed_gain);
      if (!base.stable()) return lq::greedy_gain(p, QuadraticCoefficient::infinite());
      return lq::rollout_lq(p, base).gain;
    }
    case ReplanMode::oracle_reoptimize:
      return lq::greedy_gain(p, lq::solve_riccati(p));
  }
  return LinearGain(p, design.fixed_gain);
}

inline ReplanTrace replan_simulation(const NominalDesign& design,
                                     std::vector<ScheduleEntry> schedule, double x0,
                                     std::size_t horizon, ReplanMode mode) {
  if (horizon < 1) throw ValidationError("horizon", "must be at least 1");
  if (!std::isfinite(x0)) throw ValidationError("x0", "must be finite");
  if (schedule.empty() || schedule.front().time != 0)
    throw ValidationError("schedule", "must start at time 0");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (i > 0 && schedule[i].time <= schedule[i - 1].time)
      throw ValidationError("schedule[" + std::to_string(i) + "].time",
                            "must be strictly increasing");
    try {
      design.with(schedule[i].b, schedule[i].r).validate();
    } catch (const ValidationError& e) {
      throw ValidationError("schedule[" + std::to_string(i) + "]." + e.path(), e.reason());
    }
  }

  ReplanTrace trace;
  trace.mode = mode;
  trace.schedule = schedule;
  double x = x0;
  std::size_t entry = 0;
  for (std::size_t k = 0; k < horizon; ++k) {
    while (entry + 1 < schedule.size() && schedule[entry + 1].time <= k) ++entry;
    const ScalarLQProblem p = design.with(schedule[entry].b, schedule[entry].r);
    const double u = replan_gain(design, p, mode).value() * x;
    const double cost = p.q * x * x + p.r * u * u;
    trace.steps.push_back({k, p.b, p.r, x, u, cost});
    trace.total_cost += cost;
    x = p.a * x + p.b * u;
    if (!(std::abs(x) <= kDivergenceBound)) {
      trace.diverged = true;
      break;
    }
  }
  trace.final_state = x;
  const ScalarLQProblem last = design.with(schedule[entry].b, schedule[entry].r);
  trace.tail_bound = trace.diverged ? lq::kInfinity
                                    : lq::solve_riccati(last).value() * x * x;
  return trace;
}

// ---------------------------------------------------------------------------
// Superlinear ratio

struct RatioPoint {
  double k = 0.0;
  double ratio = 0.0;  ///< (K_newton(K) - K*) / (K - K*)
};

struct RatioReport {
  std::vector<RatioPoint> points;
  std::vector<double> skipped;  ///< grid values outside the region of stability
};

inline RatioReport superlinear_ratio(const ScalarLQProblem& problem,
                                     const std::vector<double>& k_grid) {
  const double k_star = lq::solve_riccati(problem).value();
  const lq::StabilityRegion region = lq::stability_region(problem);
  RatioReport report;
  for (double k : k_grid) {
    if (k == k_star) throw ValidationError("grid", "K must differ from K*");
    if (!region.contains(k)) {
      report.skipped.push_back(k);
      continue;
    }
    const double k_newton = lq::newton_step(problem, QuadraticCoefficient(k)).cost.value();
    report.points.push_back({k, (k_newton - k_star) / (k - k_star)});
  }
  return report;
}

/// K* + 2^-i for i = 0..count-1.
inline std::vector<double> geometric_grid(double k_star, std::size_t count) {
  std::vector<double> g(count);
  for (std::size_t i = 0; i < count; ++i) g[i] = k_star + std::ldexp(1.0, -static_cast<int>(i));
  return g;
}

}  // namespace valspace::adaptive
