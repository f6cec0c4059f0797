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
#include <cstdint>
#include <utility>
#include <vector>

#include "valspace/mdp/finite_mdp.hpp"
#include "valspace/random.hpp"

namespace valspace::mdp {

/// Shape of generated instances. Defaults: 3-8 states (termination
/// included), 2-4 controls per nonterminal state, 1-3 outcomes per control,
/// costs drawn from {0.0, 0.1, ..., 10.0}.
struct RandomMdpOptions {
  std::size_t min_states = 3, max_states = 8;
  std::size_t min_controls = 2, max_controls = 4;
  std::size_t min_branching = 1, max_branching = 3;
  double discount = 0.9;
};

/// Draws one instance from `rng`. For each (x, u): the outcome count, then
/// distinct successors (partial Fisher-Yates over all states), then integer
/// weights in 1..10 normalized to probabilities, then costs k/10 with k in
/// 0..100. Everything is consumed from `rng` in that order.
inline FiniteMDP random_mdp(Rng& rng, const RandomMdpOptions& opt = {}) {
  const auto n = static_cast<std::size_t>(
      rng.uniform_int(static_cast<std::int64_t>(opt.min_states),
                      static_cast<std::int64_t>(opt.max_states)));
  std::vector<std::vector<Action>> actions(n);
  actions[kTermination] = {Action{0, {Outcome{1.0, kTermination, 0.0}}}};
  for (std::size_t x = 1; x < n; ++x) {
    const auto controls = static_cast<std::size_t>(
        rng.uniform_int(static_cast<std::int64_t>(opt.min_controls),
                        static_cast<std::int64_t>(opt.max_controls)));
    for (std::size_t u = 0; u < controls; ++u) {
      const auto branching = std::min<std::size_t>(
          n, static_cast<std::size_t>(
                 rng.uniform_int(static_cast<std::int64_t>(opt.min_branching),
                                 static_cast<std::int64_t>(opt.max_branching))));
      std::vector<std::size_t> pool(n);
      for (std::size_t i = 0; i < n; ++i) pool[i] = i;
      for (std::size_t i = 0; i < branching; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.uniform_index(n - i));
        std::swap(pool[i], pool[j]);
      }
      std::vector<double> weights(branching);
      double total = 0.0;
      for (auto& w : weights) {
        w = static_cast<double>(rng.uniform_int(1, 10));
        total += w;
      }
      Action act{static_cast<int>(u), {}};
      for (std::size_t i = 0; i < branching; ++i) {
        const double cost = static_cast<double>(rng.uniform_int(0, 100)) / 10.0;
        act.outcomes.push_back(Outcome{weights[i] / total, pool[i], cost});
      }
      actions[x].push_back(std::move(act));
    }
  }
  return FiniteMDP(std::move(actions), opt.discount);
}

/// Uniformly random control at every nonterminal state.
inline StationaryPolicy random_policy(Rng& rng, const FiniteMDP& m) {
  StationaryPolicy mu(m.state_count(), 0);
  for (std::size_t x = 1; x < m.state_count(); ++x)
    mu[x] = static_cast<std::size_t>(rng.uniform_index(m.actions(x).size()));
  return mu;
}

}  // namespace valspace::mdp
