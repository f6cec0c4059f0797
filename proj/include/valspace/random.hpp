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

#include <cstdint>
#include <random>

namespace valspace {

/// Seeded randomness for every experiment in the library.
///
/// The engine is `std::mt19937_64`, whose output sequence is fixed by the
/// C++ standard. The standard distributions are not (their algorithms are
/// implementation-defined), so the range reductions below are spelled out:
///
///  * `uniform_index(n)`: rejection sampling on the raw 64-bit word; words
///    at or above the largest multiple of n are redrawn, then `word % n`.
///  * `uniform_unit()`: top 53 bits of one word times 2^-53, in [0, 1).
///  * `uniform_real(lo, hi)`: `lo + (hi - lo) * uniform_unit()`.
///
/// Identical seeds therefore give bit-identical streams on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_word() { return engine_(); }

  std::uint64_t uniform_index(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t word = engine_();
    while (word >= limit) word = engine_();
    return word % n;
  }

  /// Inclusive integer range [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(
                    uniform_index(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  double uniform_unit() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform_real(double lo, double hi) {
    return lo + (hi - lo) * uniform_unit();
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace valspace
