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

// l-step lookahead minimization with optional m-step truncated rollout at
// the leaves and certainty-equivalence (CE) variants.
//
// Leaves of the minimization tree are valued by (T_base)^m applied to the
// terminal approximation J_tilde; m = 0 gives pure l-step lookahead. In
// CE modes every disturbance past the first stage (or every disturbance,
// for ce_all) is replaced by a single nominal outcome, both inside the
// tree and in the leaf rollout.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "valspace/errors.hpp"
#include "valspace/mdp/finite_mdp.hpp"

namespace valspace::mdp {

enum class CeMode { exact, ce_after_first, ce_all };

/// Exhaustive expansion of every path versus the equivalent depth-indexed
/// recursion over states. Both give the same values and report the same
/// leaf-path count; tree cost is exponential in l.
enum class SearchMethod { tree, memoized };

struct LookaheadSpec {
  std::size_t ell = 1;
  std::size_t m = 0;
  std::optional<StationaryPolicy> base;
  ValueFunction terminal;
  CeMode ce_mode = CeMode::exact;
  /// Nominal outcome overrides per (state, control position). Others use the
  /// most probable outcome, ties to the lowest position.
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> nominal;
  SearchMethod method = SearchMethod::memoized;
};

struct LookaheadDecision {
  std::size_t control = 0;      ///< position in actions(x)
  double value = 0.0;           ///< backed-up root value of that control
  std::vector<double> q_values; ///< backed-up value of every root control
  std::uint64_t leaf_paths = 0; ///< saturates at UINT64_MAX
};

namespace detail {

inline std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
  return a > std::numeric_limits<std::uint64_t>::max() - b
             ? std::numeric_limits<std::uint64_t>::max()
             : a + b;
}

class LookaheadEngine {
 public:
  LookaheadEngine(const FiniteMDP& m, const LookaheadSpec& spec) : m_(m), spec_(spec) {
    if (spec.ell < 1) throw ValidationError("ell", "must be at least 1");
    validate_value_function(m, spec.terminal, "terminal");
    if (spec.m > 0 && !spec.base)
      throw ValidationError("base", "truncated rollout needs a base policy");
    if (spec.base) validate_policy(m, *spec.base, "base");
    nominal_.resize(m.state_count());
    for (std::size_t x = 0; x < m.state_count(); ++x) {
      const auto& acts = m.actions(x);
      nominal_[x].resize(acts.size());
      for (std::size_t u = 0; u < acts.size(); ++u) {
        std::size_t best = 0;
        for (std::size_t w = 1; w < acts[u].outcomes.size(); ++w)
          if (acts[u].outcomes[w].probability > acts[u].outcomes[best].probability)
            best = w;
        nominal_[x][u] = best;
      }
    }
    for (const auto& [key, w] : spec.nominal) {
      const auto [x, u] = key;
      if (x >= m.state_count() || u >= m.actions(x).size() ||
          w >= m.actions(x)[u].outcomes.size())
        throw ValidationError("nominal", "override does not name an outcome");
      nominal_[x][u] = w;
    }
    leaf_ = spec.terminal;
    const bool nominal_leaves = spec.ce_mode != CeMode::exact;
    for (std::size_t i = 0; i < spec.m; ++i) {
      ValueFunction next(m.state_count(), 0.0);
      for (std::size_t x = 1; x < m.state_count(); ++x)
        next[x] = backup(x, (*spec.base)[x], leaf_, nominal_leaves);
      leaf_ = std::move(next);
    }
  }

  /// Expected (or nominal) value of control u at x against `j`.
  double backup(std::size_t x, std::size_t u, const ValueFunction& j, bool nominal) const {
    const auto& outcomes = m_.actions(x)[u].outcomes;
    if (nominal) {
      const Outcome& o = outcomes[nominal_[x][u]];
      return o.cost + m_.discount() * j[o.next];
    }
    double total = 0.0;
    for (const Outcome& o : outcomes)
      total += o.probability * (o.cost + m_.discount() * j[o.next]);
    return total;
  }

  bool nominal_at(std::size_t stage) const {
    switch (spec_.ce_mode) {
      case CeMode::exact: return false;
      case CeMode::ce_after_first: return stage > 0;
      case CeMode::ce_all: return true;
    }
    return false;
  }

  LookaheadDecision decide(std::size_t x) {
    if (x == kTermination || x >= m_.state_count())
      throw ValidationError("state", "must be a nonterminal state");
    return spec_.method == SearchMethod::tree ? decide_tree(x) : decide_memoized(x);
  }

 private:
  LookaheadDecision pick(std::vector<double> q, std::uint64_t leaves) const {
    LookaheadDecision d;
    d.q_values = std::move(q);
    d.leaf_paths = leaves;
    d.value = d.q_values[0];
    for (std::size_t u = 1; u < d.q_values.size(); ++u)
      if (d.q_values[u] < d.value) {
        d.value = d.q_values[u];
        d.control = u;
      }
    return d;
  }

  // --- explicit tree ------------------------------------------------------

  double expand(std::size_t x, std::size_t depth, std::size_t stage,
                std::uint64_t& leaves) const {
    if (depth == 0) {
      leaves = saturating_add(leaves, 1);
      return leaf_[x];
    }
    double best = kInfinity;
    bool first = true;
    for (std::size_t u = 0; u < m_.actions(x).size(); ++u) {
      const double v = expand_control(x, u, depth, stage, leaves);
      if (first || v < best) best = v;
      first = false;
    }
    return best;
  }

  double expand_control(std::size_t x, std::size_t u, std::size_t depth,
                        std::size_t stage, std::uint64_t& leaves) const {
    const auto& outcomes = m_.actions(x)[u].outcomes;
    if (nominal_at(stage)) {
      const Outcome& o = outcomes[nominal_[x][u]];
      return o.cost + m_.discount() * expand(o.next, depth - 1, stage + 1, leaves);
    }
    double total = 0.0;
    for (const Outcome& o : outcomes)
      total += o.probability *
               (o.cost + m_.discount() * expand(o.next, depth - 1, stage + 1, leaves));
    return total;
  }

  LookaheadDecision decide_tree(std::size_t x) const {
    std::uint64_t leaves = 0;
    std::vector<double> q(m_.actions(x).size());
    for (std::size_t u = 0; u < q.size(); ++u)
      q[u] = expand_control(x, u, spec_.ell, 0, leaves);
    return pick(std::move(q), leaves);
  }

  // --- depth-indexed recursion -------------------------------------------

  /// Values and leaf-path counts of subtrees of each remaining depth below
  /// the root. Stages below the root all share one disturbance rule.
  void ensure_levels() {
    if (!values_.empty()) return;
    const std::size_t n = m_.state_count();
    const bool nominal = nominal_at(1);
    values_.push_back(leaf_);
    counts_.push_back(std::vector<std::uint64_t>(n, 1));
    for (std::size_t depth = 1; depth < spec_.ell; ++depth) {
      const ValueFunction& prev = values_.back();
      const std::vector<std::uint64_t>& prev_count = counts_.back();
      ValueFunction cur(n, 0.0);
      std::vector<std::uint64_t> cur_count(n, 0);
      for (std::size_t x = 0; x < n; ++x) {
        double best = kInfinity;
        for (std::size_t u = 0; u < m_.actions(x).size(); ++u) {
          const double v = backup(x, u, prev, nominal);
          if (u == 0 || v < best) best = v;
          cur_count[x] = saturating_add(cur_count[x], paths(x, u, prev_count, nominal));
        }
        cur[x] = best;
      }
      values_.push_back(std::move(cur));
      counts_.push_back(std::move(cur_count));
    }
  }

  std::uint64_t paths(std::size_t x, std::size_t u,
                      const std::vector<std::uint64_t>& below, bool nominal) const {
    const auto& outcomes = m_.actions(x)[u].outcomes;
    if (nominal) return below[outcomes[nominal_[x][u]].next];
    std::uint64_t total = 0;
    for (const Outcome& o : outcomes) total = saturating_add(total, below[o.next]);
    return total;
  }

  LookaheadDecision decide_memoized(std::size_t x) {
    ensure_levels();
    const ValueFunction& below = values_.back();
    const auto& below_count = counts_.back();
    const bool nominal = nominal_at(0);
    std::uint64_t leaves = 0;
    std::vector<double> q(m_.actions(x).size());
    for (std::size_t u = 0; u < q.size(); ++u) {
      q[u] = backup(x, u, below, nominal);
      leaves = saturating_add(leaves, paths(x, u, below_count, nominal));
    }
    return pick(std::move(q), leaves);
  }

  const FiniteMDP& m_;
  const LookaheadSpec& spec_;
  std::vector<std::vector<std::size_t>> nominal_;
  ValueFunction leaf_;
  std::vector<ValueFunction> values_;
  std::vector<std::vector<std::uint64_t>> counts_;
};

}  // namespace detail

/// Control chosen at x by l-step lookahead, with its backed-up value.
inline LookaheadDecision lookahead_policy_mdp(const FiniteMDP& m,
                                              const LookaheadSpec& spec, std::size_t x) {
  detail::LookaheadEngine engine(m, spec);
  return engine.decide(x);
}

/// Lookahead decision at every nonterminal state, sharing one engine.
inline std::vector<LookaheadDecision> lookahead_all_states(const FiniteMDP& m,
                                                           const LookaheadSpec& spec) {
  detail::LookaheadEngine engine(m, spec);
  std::vector<LookaheadDecision> out;
  out.reserve(m.state_count());
  out.push_back({});
  for (std::size_t x = 1; x < m.state_count(); ++x) out.push_back(engine.decide(x));
  return out;
}

}  // namespace valspace::mdp
