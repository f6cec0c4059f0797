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


// Finite MDP: policy iteration, rollout and multistep lookahead on a random
// instance.

#include <iostream>

#include "valspace/valspace.hpp"

int main() {
  using namespace valspace;
  using namespace valspace::mdp;

  Rng rng(42);
  const FiniteMDP m = random_mdp(rng, {.discount = 0.9});
  const StationaryPolicy base = random_policy(rng, m);

  const auto pi = policy_iteration_mdp(m, base);
  const ValueFunction j_base = policy_evaluation_mdp(m, base);
  const ValueFunction j_roll = policy_evaluation_mdp(m, rollout_policy_mdp(m, base));

  LookaheadSpec spec;
  spec.ell = 3;
  spec.terminal = ValueFunction(m.state_count(), 0.0);
  const auto decisions = lookahead_all_states(m, spec);

  std::cout << "states: " << m.state_count() << ", policy iteration converged in "
            << pi.iterations << " iterations\n";
  std::cout << "x  J_base  J_rollout  J*  lookahead(3)\n";
  for (std::size_t x = 1; x < m.state_count(); ++x)
    std::cout << x << "  " << format_real(j_base[x], 6) << "  " << format_real(j_roll[x], 6)
              << "  " << format_real(pi.values[x], 6) << "  u="
              << m.actions(x)[decisions[x].control].id << "\n";
  return 0;
}
