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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "valspace/errors.hpp"

namespace valspace::mdp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// State 0 is always the cost-free absorbing termination state.
inline constexpr std::size_t kTermination = 0;

/// One branch of a control's disturbance distribution. The disturbance w is
/// the position of the outcome in its action's list.
struct Outcome {
  double probability = 1.0;
  std::size_t next = 0;
  double cost = 0.0;
};

struct Action {
  int id = 0;  ///< external label; controls are ordered by position
  std::vector<Outcome> outcomes;
};

/// Value functions are indexed by state; entry 0 is pinned to zero and +inf
/// marks states an (unstable) policy never leaves at finite cost.
using ValueFunction = std::vector<double>;

/// Position of the chosen control in `actions(x)`, for every state.
using StationaryPolicy = std::vector<std::size_t>;

class FiniteMDP {
 public:
  FiniteMDP() = default;

  /// Validates every invariant; throws ValidationError naming the first
  /// offending field.
  FiniteMDP(std::vector<std::vector<Action>> actions, double discount)
      : actions_(std::move(actions)), discount_(discount) {
    validate();
  }

  std::size_t state_count() const noexcept { return actions_.size(); }
  double discount() const noexcept { return discount_; }
  const std::vector<Action>& actions(std::size_t x) const { return actions_[x]; }
  const std::vector<std::vector<Action>>& all_actions() const noexcept {
    return actions_;
  }

  double max_stage_cost() const {
    double g = 0.0;
    for (const auto& acts : actions_)
      for (const auto& a : acts)
        for (const auto& o : a.outcomes) g = std::max(g, o.cost);
    return g;
  }

 private:
  void validate() const {
    if (!(discount_ > 0.0 && discount_ <= 1.0))
      throw ValidationError("alpha", "must lie in (0, 1]");
    if (actions_.empty())
      throw ValidationError("states", "must include the termination state 0");
    const std::size_t n = actions_.size();
    for (std::size_t x = 0; x < n; ++x) {
      const std::string xp = "controls[" + std::to_string(x) + "]";
      if (actions_[x].empty()) throw ValidationError(xp, "no admissible control");
      for (std::size_t u = 0; u < actions_[x].size(); ++u) {
        const Action& act = actions_[x][u];
        const std::string up =
            "transitions[" + std::to_string(x) + "][" + std::to_string(u) + "]";
        if (u > 0 && act.id <= actions_[x][u - 1].id)
          throw ValidationError(xp, "control ids must be strictly increasing");
        if (act.outcomes.empty()) throw ValidationError(up, "empty distribution");
        double total = 0.0;
        for (std::size_t w = 0; w < act.outcomes.size(); ++w) {
          const Outcome& o = act.outcomes[w];
          const std::string wp = up + "[" + std::to_string(w) + "]";
          if (!(o.probability > 0.0) || !std::isfinite(o.probability))
            throw ValidationError(wp + ".p", "must be positive");
          if (o.next >= n) throw ValidationError(wp + ".next", "state out of range");
          if (!(o.cost >= 0.0) || !std::isfinite(o.cost))
            throw ValidationError(wp + ".cost", "must be finite and nonnegative");
          if (x == kTermination && (o.next != kTermination || o.cost != 0.0))
            throw ValidationError(wp, "termination state must be absorbing and cost-free");
          total += o.probability;
        }
        if (std::abs(total - 1.0) > 1e-12)
          throw ValidationError(up, "probabilities must sum to 1");
      }
    }
  }

  std::vector<std::vector<Action>> actions_;
  double discount_ = 1.0;
};

/// Throws unless J has one finite-or-+inf nonnegative entry per state and
/// J[0] == 0.
inline void validate_value_function(const FiniteMDP& m, const ValueFunction& j,
                                    const std::string& name = "J") {
  if (j.size() != m.state_count())
    throw ValidationError(name, "size does not match the state count");
  if (j[kTermination] != 0.0)
    throw ValidationError(name + "[0]", "termination value must be 0");
  for (std::size_t x = 0; x < j.size(); ++x)
    if (std::isnan(j[x]) || j[x] < 0.0)
      throw ValidationError(name + "[" + std::to_string(x) + "]",
                            "must be nonnegative");
}

inline void validate_policy(const FiniteMDP& m, const StationaryPolicy& mu,
                            const std::string& name = "policy") {
  if (mu.size() != m.state_count())
    throw ValidationError(name, "size does not match the state count");
  for (std::size_t x = 0; x < mu.size(); ++x)
    if (mu[x] >= m.actions(x).size())
      throw ValidationError(name + "[" + std::to_string(x) + "]",
                            "not an admissible control");
}

/// Expected one-stage cost plus discounted cost-to-go of control u at x.
/// Infinite successor values propagate (p > 0 and alpha > 0).
inline double q_value(const FiniteMDP& m, const ValueFunction& j, std::size_t x,
                      std::size_t u) {
  double total = 0.0;
  for (const Outcome& o : m.actions(x)[u].outcomes)
    total += o.probability * (o.cost + m.discount() * j[o.next]);
  return total;
}

}  // namespace valspace::mdp
