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

#include <charconv>
#include <cmath>
#include <string>
#include <system_error>

namespace valspace {

/// Locale-independent decimal rendering. `precision == 0` selects the
/// shortest representation that round-trips; otherwise `precision`
/// significant digits in general format. Infinity renders as `inf`.
inline std::string format_real(double value, int precision = 17) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (std::isnan(value)) return "nan";
  char buffer[64];
  std::to_chars_result res = precision == 0
      ? std::to_chars(buffer, buffer + sizeof(buffer), value)
      : std::to_chars(buffer, buffer + sizeof(buffer), value,
                      std::chars_format::general, precision);
  return std::string(buffer, res.ptr);
}

/// Inverse of format_real; accepts `inf`. Returns false on trailing junk.
inline bool parse_real(const std::string& text, double& out) {
  if (text == "inf" || text == "+inf") {
    out = HUGE_VAL;
    return true;
  }
  if (text == "-inf") {
    out = -HUGE_VAL;
    return true;
  }
  const char* first = text.data();
  const char* last = first + text.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && first != last;
}

}  // namespace valspace
