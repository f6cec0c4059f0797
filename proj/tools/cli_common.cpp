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

#include "cli_common.hpp"

#include <charconv>

#include "valspace/adaptive/adaptive.hpp"

namespace valspace::cli {

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : text) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  return parts;
}

}  // namespace

std::vector<double> parse_grid(const std::string& text, const std::string& flag) {
  const auto parts = split(text, ':');
  double v[3];
  if (parts.size() != 3) throw ValidationError(flag, "expected lo:hi:step");
  for (int i = 0; i < 3; ++i)
    if (!parse_real(parts[static_cast<std::size_t>(i)], v[i]))
      throw ValidationError(flag, "not a number: '" + parts[static_cast<std::size_t>(i)] + "'");
  try {
    return adaptive::linear_grid(v[0], v[1], v[2]);
  } catch (const ValidationError& e) {
    throw ValidationError(flag, "expected lo <= hi and step > 0");
  }
}

std::vector<double> parse_reals(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  for (const auto& part : split(text, ',')) {
    double v;
    if (!parse_real(part, v)) throw ValidationError(flag, "not a number: '" + part + "'");
    out.push_back(v);
  }
  return out;
}

std::vector<long long> parse_ints(const std::string& text, const std::string& flag) {
  std::vector<long long> out;
  for (const auto& part : split(text, ',')) {
    long long v = 0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc() || ptr != part.data() + part.size() || part.empty())
      throw ValidationError(flag, "not an integer: '" + part + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace valspace::cli
