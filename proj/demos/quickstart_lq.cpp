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


// Scalar linear-quadratic problem: optimal cost, Newton iterates, rollout.

#include <iostream>

#include "valspace/valspace.hpp"

int main() {
  using namespace valspace;
  using namespace valspace::lq;

  const ScalarLQProblem p{1.0, 2.0, 1.0, 0.5};
  const QuadraticCoefficient k_star = solve_riccati(p);
  std::cout << "K* = " << format_real(k_star.value(), 0)
            << "  L* = " << format_real(greedy_gain(p, k_star).value(), 0) << "\n";

  // Each one-step lookahead from K is a Newton step toward K*.
  QuadraticCoefficient k(10.0);
  for (int i = 1; i <= 5; ++i) {
    k = newton_step(p, k).cost;
    std::cout << "newton " << i << ": K = " << format_real(k.value(), 0) << "\n";
  }

  const LinearGain base(p, -0.4);
  const auto r = rollout_lq(p, base);
  std::cout << "base K_L = " << format_real(policy_cost(p, base).value(), 0)
            << "  rollout K = " << format_real(r.cost.value(), 0) << "\n";
  return 0;
}
