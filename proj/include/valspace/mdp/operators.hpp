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

// Exact Bellman machinery on a FiniteMDP: operators, greedy policies, value
// and policy iteration, exact policy evaluation, stability (properness) and
// the Lyapunov condition, and rollout.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "valspace/errors.hpp"
#include "valspace/mdp/finite_mdp.hpp"

namespace valspace::mdp {

/// (TJ)(x) = min_u E{ g + alpha J(next) }, with (TJ)(0) = 0.
inline ValueFunction bellman_operator(const FiniteMDP& m, const ValueFunction& j) {
  validate_value_function(m, j);
  ValueFunction out(m.state_count(), 0.0);
  for (std::size_t x = 1; x < m.state_count(); ++x) {
    double best = kInfinity;
    for (std::size_t u = 0; u < m.actions(x).size(); ++u)
      best = std::min(best, q_value(m, j, x, u));
    out[x] = best;
  }
  return out;
}

/// (T_mu J)(x) = E{ g + alpha J(next) } under u = mu(x).
inline ValueFunction policy_operator_mdp(const FiniteMDP& m,
                                         const StationaryPolicy& mu,
                                         const ValueFunction& j) {
  validate_value_function(m, j);
  validate_policy(m, mu);
  ValueFunction out(m.state_count(), 0.0);
  for (std::size_t x = 1; x < m.state_count(); ++x) out[x] = q_value(m, j, x, mu[x]);
  return out;
}

/// Per-state argmin of the Bellman expression. Ties (including all-infinite
/// rows) go to the lowest control position.
inline StationaryPolicy greedy_policy(const FiniteMDP& m, const ValueFunction& j) {
  validate_value_function(m, j);
  StationaryPolicy mu(m.state_count(), 0);
  for (std::size_t x = 1; x < m.state_count(); ++x) {
    double best = q_value(m, j, x, 0);
    for (std::size_t u = 1; u < m.actions(x).size(); ++u) {
      const double v = q_value(m, j, x, u);
      if (v < best) {
        best = v;
        mu[x] = u;
      }
    }
  }
  return mu;
}

/// Sup-norm distance; matching infinities count as zero.
inline double sup_distance(const ValueFunction& lhs, const ValueFunction& rhs) {
  double d = 0.0;
  for (std::size_t x = 0; x < lhs.size(); ++x) {
    if (lhs[x] == rhs[x]) continue;
    d = std::max(d, std::abs(lhs[x] - rhs[x]));
  }
  return d;
}

struct ValueIterationResult {
  ValueFunction values;
  std::size_t iterations = 0;
  double residual = 0.0;  ///< sup-norm of T(values) - values
  bool converged = false;
};

/// Iterates J <- TJ until the Bellman residual of the current iterate is at
/// most `tol`. `iterations` counts applications of T that were kept.
inline ValueIterationResult value_iteration_mdp(const FiniteMDP& m,
                                                const ValueFunction& j0, double tol,
                                                std::size_t max_iterations) {
  if (!(tol > 0.0)) throw ValidationError("tol", "must be positive");
  ValueIterationResult result{j0, 0, 0.0, false};
  for (;;) {
    ValueFunction next = bellman_operator(m, result.values);
    result.residual = sup_distance(next, result.values);
    if (result.residual <= tol) {
      result.converged = true;
      return result;
    }
    if (result.iterations == max_iterations) return result;
    result.values = std::move(next);
    ++result.iterations;
  }
}

namespace detail {

/// Strongly connected components of the closed-loop graph (iterative
/// Tarjan). Returns the component index of every state.
inline std::vector<std::size_t> closed_loop_components(
    const std::vector<std::vector<std::size_t>>& succ, std::size_t& count) {
  const std::size_t n = succ.size();
  constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index(n, kUnset), low(n, 0), comp(n, kUnset);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::pair<std::size_t, std::size_t>> frames;  // (node, edge)
  std::size_t next_index = 0;
  count = 0;
  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != kUnset) continue;
    frames.push_back({root, 0});
    index[root] = low[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!frames.empty()) {
      auto& [v, e] = frames.back();
      if (e < succ[v].size()) {
        const std::size_t w = succ[v][e++];
        if (index[w] == kUnset) {
          index[w] = low[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = true;
          frames.push_back({w, 0});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp[w] = count;
        } while (w != v);
        ++count;
      }
      const std::size_t finished = v;
      frames.pop_back();
      if (!frames.empty()) {
        const std::size_t parent = frames.back().first;
        low[parent] = std::min(low[parent], low[finished]);
      }
    }
  }
  return comp;
}

}  // namespace detail

/// Exact J_mu.
///
/// For alpha < 1 this is the solution of (I - alpha P_mu) J = g_mu. For
/// alpha = 1, J_mu is the least fixed point of T_mu (the limit of value
/// iteration from 0): states that can reach a closed class of the
/// closed-loop chain containing a positive-cost transition get +inf, states
/// in zero-cost closed classes get 0, and the remaining transient states
/// solve the linear system restricted to them.
inline ValueFunction policy_evaluation_mdp(const FiniteMDP& m,
                                           const StationaryPolicy& mu) {
  validate_policy(m, mu);
  const std::size_t n = m.state_count();
  const double alpha = m.discount();
  ValueFunction j(n, 0.0);

  // Unknowns: nonterminal states whose value is not fixed by the class analysis.
  std::vector<bool> solve(n, true);
  solve[kTermination] = false;

  if (alpha == 1.0) {
    std::vector<std::vector<std::size_t>> succ(n);
    for (std::size_t x = 0; x < n; ++x)
      for (const Outcome& o : m.actions(x)[mu[x]].outcomes) succ[x].push_back(o.next);
    std::size_t count = 0;
    const auto comp = detail::closed_loop_components(succ, count);
    std::vector<bool> closed(count, true), costly(count, false);
    for (std::size_t x = 0; x < n; ++x)
      for (const Outcome& o : m.actions(x)[mu[x]].outcomes) {
        if (comp[o.next] != comp[x]) closed[comp[x]] = false;
        if (o.cost > 0.0) costly[comp[x]] = true;
      }
    // Reverse reachability from bad closed classes.
    std::vector<std::vector<std::size_t>> pred(n);
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y : succ[x]) pred[y].push_back(x);
    std::vector<bool> infinite(n, false);
    std::vector<std::size_t> frontier;
    for (std::size_t x = 0; x < n; ++x)
      if (closed[comp[x]] && costly[comp[x]]) {
        infinite[x] = true;
        frontier.push_back(x);
      }
    while (!frontier.empty()) {
      const std::size_t y = frontier.back();
      frontier.pop_back();
      for (std::size_t x : pred[y])
        if (!infinite[x]) {
          infinite[x] = true;
          frontier.push_back(x);
        }
    }
    for (std::size_t x = 1; x < n; ++x) {
      if (infinite[x]) {
        j[x] = kInfinity;
        solve[x] = false;
      } else if (closed[comp[x]]) {
        solve[x] = false;  // zero-cost recurrent class
      }
    }
  }

  std::vector<std::size_t> slot(n, 0), states;
  for (std::size_t x = 0; x < n; ++x)
    if (solve[x]) {
      slot[x] = states.size();
      states.push_back(x);
    }
  if (states.empty()) return j;

  const auto dim = static_cast<Eigen::Index>(states.size());
  Eigen::MatrixXd system = Eigen::MatrixXd::Identity(dim, dim);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);
  for (std::size_t i = 0; i < states.size(); ++i) {
    const std::size_t x = states[i];
    for (const Outcome& o : m.actions(x)[mu[x]].outcomes) {
      rhs(static_cast<Eigen::Index>(i)) += o.probability * o.cost;
      if (solve[o.next])
        system(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(slot[o.next])) -=
            alpha * o.probability;
      // Successors outside the system are t or zero-cost classes (value 0);
      // infinite successors were excluded by the reachability pass.
    }
  }
  const Eigen::VectorXd sol = system.partialPivLu().solve(rhs);
  for (std::size_t i = 0; i < states.size(); ++i)
    j[states[i]] = std::max(0.0, sol(static_cast<Eigen::Index>(i)));
  return j;
}

enum class Properness { stable, unstable };

/// A policy is stable iff its cost is finite from every state.
inline Properness properness_check(const FiniteMDP& m, const StationaryPolicy& mu) {
  if (m.discount() < 1.0) {
    validate_policy(m, mu);
    return Properness::stable;
  }
  const ValueFunction j = policy_evaluation_mdp(m, mu);
  return std::all_of(j.begin(), j.end(), [](double v) { return std::isfinite(v); })
             ? Properness::stable
             : Properness::unstable;
}

struct PolicyIterationResult {
  StationaryPolicy policy;
  ValueFunction values;
  std::size_t iterations = 0;
  std::vector<StationaryPolicy> history;  ///< mu_0, mu_1, ..., final
};

/// Policy iteration: evaluate, improve greedily, stop when the improvement
/// returns the same policy. Each improvement is one rollout step.
inline PolicyIterationResult policy_iteration_mdp(const FiniteMDP& m,
                                                  const StationaryPolicy& mu0,
                                                  std::size_t max_iterations = 10000) {
  validate_policy(m, mu0, "mu0");
  PolicyIterationResult result;
  result.policy = mu0;
  result.history.push_back(mu0);
  result.values = policy_evaluation_mdp(m, mu0);
  for (double v : result.values)
    if (!std::isfinite(v)) throw ValidationError("mu0", "initial policy is unstable");
  while (result.iterations < max_iterations) {
    ++result.iterations;
    StationaryPolicy improved = greedy_policy(m, result.values);
    if (improved == result.policy) return result;
    result.policy = std::move(improved);
    result.history.push_back(result.policy);
    result.values = policy_evaluation_mdp(m, result.policy);
  }
  throw ConvergenceError("policy iteration exceeded its iteration budget", 0.0);
}

struct LyapunovReport {
  bool holds = true;
  std::vector<std::size_t> violations;
};

/// J_tilde(x) >= (T J_tilde)(x) at every state, to a relative tolerance.
inline LyapunovReport lyapunov_check(const FiniteMDP& m, const ValueFunction& j_tilde,
                                     double tol = 1e-12) {
  validate_value_function(m, j_tilde, "J_tilde");
  for (double v : j_tilde)
    if (!std::isfinite(v)) throw ValidationError("J_tilde", "must be finite");
  const ValueFunction tj = bellman_operator(m, j_tilde);
  LyapunovReport report;
  for (std::size_t x = 1; x < m.state_count(); ++x)
    if (j_tilde[x] < tj[x] - tol * std::max(1.0, std::abs(tj[x])))
      report.violations.push_back(x);
  report.holds = report.violations.empty();
  return report;
}

/// Rollout policy of `base`. With `steps` empty the base cost is exact;
/// otherwise it is approximated by `steps` applications of T_base to zero.
inline StationaryPolicy rollout_policy_mdp(const FiniteMDP& m,
                                           const StationaryPolicy& base,
                                           std::optional<std::size_t> steps = std::nullopt) {
  if (properness_check(m, base) != Properness::stable)
    throw ValidationError("base", "rollout requires a stable base policy");
  if (!steps) return greedy_policy(m, policy_evaluation_mdp(m, base));
  ValueFunction j(m.state_count(), 0.0);
  for (std::size_t i = 0; i < *steps; ++i) j = policy_operator_mdp(m, base, j);
  return greedy_policy(m, j);
}

/// Controls whose Q-value against J is within `tol` (relative to
/// max(1, |J(x)|)) of the best one, per state. With J = J* these are the
/// optimal controls.
inline std::vector<std::vector<std::size_t>> near_greedy_controls(const FiniteMDP& m,
                                                                  const ValueFunction& j,
                                                                  double tol = 1e-9) {
  validate_value_function(m, j);
  std::vector<std::vector<std::size_t>> sets(m.state_count());
  sets[kTermination] = {0};
  for (std::size_t x = 1; x < m.state_count(); ++x) {
    std::vector<double> q(m.actions(x).size());
    double best = kInfinity;
    for (std::size_t u = 0; u < q.size(); ++u) best = std::min(best, q[u] = q_value(m, j, x, u));
    for (std::size_t u = 0; u < q.size(); ++u)
      if (q[u] == best || q[u] <= best + tol * std::max(1.0, std::abs(best)))
        sets[x].push_back(u);
  }
  return sets;
}

}  // namespace valspace::mdp
