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

// Scalar linear-quadratic problem x' = a x + b u with stage cost q x^2 + r u^2
// and no discounting. Value functions are K x^2, policies are u = L x, and
// every approximation-in-value-space scheme reduces to closed-form scalar
// arithmetic on (K, L).

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "valspace/errors.hpp"

namespace valspace::lq {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct ScalarLQProblem {
  double a = 1.0;
  double b = 1.0;
  double q = 1.0;
  double r = 1.0;

  /// Throws ValidationError unless b != 0, q > 0, r > 0 and all finite.
  void validate() const {
    if (!std::isfinite(a)) throw ValidationError("a", "must be finite");
    if (!std::isfinite(b) || b == 0.0)
      throw ValidationError("b", "must be finite and nonzero");
    if (!std::isfinite(q) || !(q > 0.0))
      throw ValidationError("q", "must be finite and positive");
    if (!std::isfinite(r) || !(r > 0.0))
      throw ValidationError("r", "must be finite and positive");
  }
};

/// Coefficient K of a quadratic value function J(x) = K x^2. Always >= 0;
/// +inf is the cost of an unstable policy.
class QuadraticCoefficient {
 public:
  constexpr QuadraticCoefficient() = default;
  explicit QuadraticCoefficient(double value) : value_(value) {
    if (std::isnan(value) || value < 0.0)
      throw ValidationError("K", "must be nonnegative or +inf");
  }

  static QuadraticCoefficient infinite() {
    return QuadraticCoefficient(kInfinity);
  }

  constexpr double value() const noexcept { return value_; }
  bool is_finite() const noexcept { return std::isfinite(value_); }

  friend bool operator==(QuadraticCoefficient, QuadraticCoefficient) = default;

 private:
  double value_ = 0.0;
};

/// Linear policy u = L x together with its closed-loop coefficient a + bL.
/// Stability is the strict test |a + bL| < 1.
class LinearGain {
 public:
  LinearGain() = default;
  LinearGain(const ScalarLQProblem& p, double gain)
      : gain_(gain), closed_loop_(p.a + p.b * gain) {
    if (!std::isfinite(gain)) throw ValidationError("L", "must be finite");
  }

  double value() const noexcept { return gain_; }
  double closed_loop() const noexcept { return closed_loop_; }
  bool stable() const noexcept { return std::abs(closed_loop_) < 1.0; }

 private:
  double gain_ = 0.0;
  double closed_loop_ = 0.0;
};

/// Outcome of a lookahead scheme: the Newton step is taken at
/// `effective_start`, producing `gain` whose exact cost is `cost`.
struct LookaheadResultLQ {
  QuadraticCoefficient effective_start;
  LinearGain gain;
  QuadraticCoefficient cost;
};

namespace detail {

inline void require_finite(QuadraticCoefficient k, const char* what) {
  if (!k.is_finite()) throw ValidationError(what, "must be finite");
}

}  // namespace detail

/// F(K), plus whether it was evaluated as the K -> inf limit.
struct RiccatiEvaluation {
  QuadraticCoefficient value;
  bool limit = false;
};

inline RiccatiEvaluation evaluate_riccati(const ScalarLQProblem& p,
                                          QuadraticCoefficient k) {
  if (!k.is_finite()) {
    return {QuadraticCoefficient(p.a * p.a * p.r / (p.b * p.b) + p.q), true};
  }
  const double kv = k.value();
  return {QuadraticCoefficient(p.a * p.a * p.r * kv / (p.r + p.b * p.b * kv) +
                               p.q),
          false};
}

/// Riccati operator F(K) = a^2 r K / (r + b^2 K) + q.
inline QuadraticCoefficient riccati_operator(const ScalarLQProblem& p,
                                             QuadraticCoefficient k) {
  return evaluate_riccati(p, k).value;
}

/// Derivative F'(K) = a^2 r^2 / (r + b^2 K)^2.
inline double riccati_derivative(const ScalarLQProblem& p, double k) {
  const double s = p.a * p.r / (p.r + p.b * p.b * k);
  return s * s;
}

/// Operator of the linear policy L: F_L(K) = (a + bL)^2 K + q + r L^2.
inline QuadraticCoefficient policy_operator(const ScalarLQProblem& p,
                                            const LinearGain& gain,
                                            QuadraticCoefficient k) {
  detail::require_finite(k, "K");
  const double c = gain.closed_loop();
  const double l = gain.value();
  return QuadraticCoefficient(c * c * k.value() + p.q + p.r * l * l);
}

/// Positive root K* of the Riccati equation.
///
/// Clearing the denominator of K = F(K) gives
/// b^2 K^2 + (r - a^2 r - q b^2) K - q r = 0, whose roots have opposite
/// signs. The positive one is taken with the cancellation-free form of the
/// quadratic formula, then polished by a Newton step on F(K) - K.
inline QuadraticCoefficient solve_riccati(const ScalarLQProblem& p) {
  p.validate();
  const double qa = p.b * p.b;
  const double qb = p.r * (1.0 - p.a * p.a) - p.q * p.b * p.b;
  const double qc = p.q * p.r;  // constant term is -qc
  const double disc = std::sqrt(qb * qb + 4.0 * qa * qc);
  double k = qb < 0.0 ? (disc - qb) / (2.0 * qa) : (2.0 * qc) / (qb + disc);

  const double residual = riccati_operator(p, QuadraticCoefficient(k)).value() - k;
  const double slope = riccati_derivative(p, k) - 1.0;
  if (slope != 0.0) {
    const double polished = k - residual / slope;
    if (polished > 0.0) k = polished;
  }
  return QuadraticCoefficient(k);
}

/// One-step lookahead gain L = -a b K / (r + b^2 K). At K = +inf this is the
/// limit -a/b (deadbeat gain).
inline LinearGain greedy_gain(const ScalarLQProblem& p, QuadraticCoefficient k) {
  if (!k.is_finite()) return LinearGain(p, -p.a / p.b);
  const double kv = k.value();
  return LinearGain(p, -p.a * p.b * kv / (p.r + p.b * p.b * kv));
}

/// K_L = (q + r L^2) / (1 - (a + bL)^2) for stable L, +inf otherwise.
inline QuadraticCoefficient policy_cost(const ScalarLQProblem& p,
                                        const LinearGain& gain) {
  if (!gain.stable()) return QuadraticCoefficient::infinite();
  const double c = gain.closed_loop();
  const double l = gain.value();
  return QuadraticCoefficient((p.q + p.r * l * l) / ((1.0 - c) * (1.0 + c)));
}

/// [K0, F(K0), ..., F^n(K0)].
inline std::vector<QuadraticCoefficient> value_iterate(const ScalarLQProblem& p,
                                                       QuadraticCoefficient k0,
                                                       std::size_t n) {
  detail::require_finite(k0, "K0");
  std::vector<QuadraticCoefficient> seq;
  seq.reserve(n + 1);
  seq.push_back(k0);
  for (std::size_t i = 0; i < n; ++i) seq.push_back(riccati_operator(p, seq.back()));
  return seq;
}

/// One-step lookahead at K, i.e. one Newton iteration on K = F(K): the
/// greedy gain's operator F_L is the tangent of F at K, and its fixed point
/// is the policy cost.
inline LookaheadResultLQ newton_step(const ScalarLQProblem& p,
                                     QuadraticCoefficient k) {
  detail::require_finite(k, "K");
  const LinearGain gain = greedy_gain(p, k);
  return {k, gain, policy_cost(p, gain)};
}

/// l-step lookahead with m-step truncated rollout of `base`: the Newton step
/// is taken at F^(l-1)(F_base^m(K_tilde)).
inline LookaheadResultLQ lookahead_policy_lq(const ScalarLQProblem& p,
                                             QuadraticCoefficient k_tilde,
                                             std::size_t ell, std::size_t m,
                                             const std::optional<LinearGain>& base =
                                                 std::nullopt) {
  detail::require_finite(k_tilde, "K_tilde");
  if (ell < 1) throw ValidationError("ell", "must be at least 1");
  if (m > 0) {
    if (!base) throw ValidationError("base", "truncated rollout needs a base policy");
    if (!base->stable()) throw ValidationError("base", "base policy must be stable");
  }
  QuadraticCoefficient k = k_tilde;
  for (std::size_t i = 0; i < m; ++i) k = policy_operator(p, *base, k);
  for (std::size_t i = 1; i < ell; ++i) k = riccati_operator(p, k);
  return newton_step(p, k);
}

/// Set of K whose one-step lookahead gain is stable.
///
/// Solving F'(K) = 1 gives K_S = r(|a| - 1) / b^2. For |a| >= 1 the region
/// is the open interval (K_S, inf); for |a| < 1 it is all of K >= 0 and
/// `threshold` is empty.
struct StabilityRegion {
  std::optional<double> threshold;
  bool open = false;

  bool contains(double k) const {
    if (k < 0.0) return false;
    if (!threshold) return true;
    return open ? k > *threshold : k >= *threshold;
  }
};

inline StabilityRegion stability_region(const ScalarLQProblem& p) {
  p.validate();
  const double abs_a = std::abs(p.a);
  if (abs_a < 1.0) return {std::nullopt, false};
  return {p.r * (abs_a - 1.0) / (p.b * p.b), true};
}

/// Rollout with a stable base policy: Newton step at K_base.
inline LookaheadResultLQ rollout_lq(const ScalarLQProblem& p,
                                    const LinearGain& base) {
  if (!base.stable())
    throw ValidationError("base", "rollout requires a stable base policy");
  return newton_step(p, policy_cost(p, base));
}

struct PolicyIterate {
  LinearGain gain;
  QuadraticCoefficient cost;
};

/// Policy iteration from a stable gain until both |K_k - K*| <= tol and
/// |L_k - L*| <= tol. The gain error decays like the square root of the
/// cost error, so the gain test usually costs one extra iteration.
inline std::vector<PolicyIterate> policy_iteration_lq(const ScalarLQProblem& p,
                                                      const LinearGain& l0,
                                                      double tol,
                                                      std::size_t max_iterations = 100) {
  if (!(tol > 0.0)) throw ValidationError("tol", "must be positive");
  if (!l0.stable()) throw ValidationError("L0", "initial policy must be stable");
  const QuadraticCoefficient k_opt = solve_riccati(p);
  const double k_star = k_opt.value();
  const double l_star = greedy_gain(p, k_opt).value();
  std::vector<PolicyIterate> iterates;
  LinearGain gain = l0;
  for (std::size_t it = 0; it < max_iterations; ++it) {
    const QuadraticCoefficient cost = policy_cost(p, gain);
    iterates.push_back({gain, cost});
    if (std::abs(cost.value() - k_star) <= tol && std::abs(gain.value() - l_star) <= tol)
      return iterates;
    gain = greedy_gain(p, cost);
  }
  throw ConvergenceError("policy iteration did not reach tolerance",
                         std::abs(iterates.back().cost.value() - k_star));
}

/// Two Newton steps: one-step lookahead at K_tilde, then rollout with the
/// resulting policy as base.
inline LookaheadResultLQ double_newton(const ScalarLQProblem& p,
                                       QuadraticCoefficient k_tilde) {
  detail::require_finite(k_tilde, "K_tilde");
  const LinearGain first = greedy_gain(p, k_tilde);
  if (!first.stable())
    throw ValidationError("K_tilde", "outside the region of stability");
  return rollout_lq(p, first);
}

}  // namespace valspace::lq
