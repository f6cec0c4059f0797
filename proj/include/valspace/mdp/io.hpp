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

// JSON interchange for FiniteMDP:
//
//   {
//     "states": 3,
//     "alpha": 0.9,
//     "controls": [[0], [0, 1], [0, 1]],
//     "transitions": [
//       [[{"p": 1.0, "next": 0, "cost": 0.0}]],
//       [[{"p": 0.5, "next": 1, "cost": 1.0}, {"p": 0.5, "next": 0, "cost": 2.0}],
//        [{"p": 1.0, "next": 2, "cost": 0.5}]],
//       ...
//     ]
//   }
//
// controls[x] lists integer control ids in increasing order and
// transitions[x][u] is the distribution of the u-th listed control.

#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "valspace/errors.hpp"
#include "valspace/mdp/finite_mdp.hpp"

namespace valspace::mdp {

namespace detail {

inline const nlohmann::json& require(const nlohmann::json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key))
    throw ValidationError(key, "missing field");
  return obj.at(key);
}

inline double number_at(const nlohmann::json& v, const std::string& path) {
  if (!v.is_number()) throw ValidationError(path, "expected a number");
  return v.get<double>();
}

inline std::size_t index_at(const nlohmann::json& v, const std::string& path) {
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw ValidationError(path, "expected a nonnegative integer");
  return v.get<std::size_t>();
}

}  // namespace detail

inline FiniteMDP mdp_from_json(const nlohmann::json& doc) {
  const std::size_t n = detail::index_at(detail::require(doc, "states"), "states");
  const double alpha = detail::number_at(detail::require(doc, "alpha"), "alpha");
  const auto& controls = detail::require(doc, "controls");
  const auto& transitions = detail::require(doc, "transitions");
  if (!controls.is_array() || controls.size() != n)
    throw ValidationError("controls", "expected one entry per state");
  if (!transitions.is_array() || transitions.size() != n)
    throw ValidationError("transitions", "expected one entry per state");

  std::vector<std::vector<Action>> actions(n);
  for (std::size_t x = 0; x < n; ++x) {
    const std::string xs = "[" + std::to_string(x) + "]";
    const auto& ids = controls[x];
    const auto& dists = transitions[x];
    if (!ids.is_array()) throw ValidationError("controls" + xs, "expected an array");
    if (!dists.is_array() || dists.size() != ids.size())
      throw ValidationError("transitions" + xs, "expected one distribution per control");
    for (std::size_t u = 0; u < ids.size(); ++u) {
      const std::string us = xs + "[" + std::to_string(u) + "]";
      if (!ids[u].is_number_integer())
        throw ValidationError("controls" + us, "expected an integer control id");
      Action act{ids[u].get<int>(), {}};
      if (!dists[u].is_array())
        throw ValidationError("transitions" + us, "expected an array of outcomes");
      for (std::size_t w = 0; w < dists[u].size(); ++w) {
        const std::string ws = "transitions" + us + "[" + std::to_string(w) + "]";
        const auto& o = dists[u][w];
        if (!o.is_object()) throw ValidationError(ws, "expected an object");
        if (!o.contains("p")) throw ValidationError(ws + ".p", "missing field");
        if (!o.contains("next")) throw ValidationError(ws + ".next", "missing field");
        if (!o.contains("cost")) throw ValidationError(ws + ".cost", "missing field");
        act.outcomes.push_back(Outcome{detail::number_at(o["p"], ws + ".p"),
                                       detail::index_at(o["next"], ws + ".next"),
                                       detail::number_at(o["cost"], ws + ".cost")});
      }
      actions[x].push_back(std::move(act));
    }
  }
  return FiniteMDP(std::move(actions), alpha);
}

inline nlohmann::json mdp_to_json(const FiniteMDP& m) {
  nlohmann::json doc;
  doc["states"] = m.state_count();
  doc["alpha"] = m.discount();
  doc["controls"] = nlohmann::json::array();
  doc["transitions"] = nlohmann::json::array();
  for (std::size_t x = 0; x < m.state_count(); ++x) {
    nlohmann::json ids = nlohmann::json::array(), dists = nlohmann::json::array();
    for (const Action& a : m.actions(x)) {
      ids.push_back(a.id);
      nlohmann::json dist = nlohmann::json::array();
      for (const Outcome& o : a.outcomes)
        dist.push_back({{"p", o.probability}, {"next", o.next}, {"cost", o.cost}});
      dists.push_back(std::move(dist));
    }
    doc["controls"].push_back(std::move(ids));
    doc["transitions"].push_back(std::move(dists));
  }
  return doc;
}

/// Reads and validates an MDP document. A missing or unparsable file is a
/// ValidationError on `path_label`.
inline FiniteMDP load_mdp(const std::string& file, const std::string& path_label = "file") {
  std::ifstream in(file);
  if (!in) throw ValidationError(path_label, "cannot open '" + file + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(path_label, std::string("invalid JSON: ") + e.what());
  }
  return mdp_from_json(doc);
}

}  // namespace valspace::mdp
