// Copyright 2026 The acthook Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "acthook/trajectory.h"

#include <sstream>

#include "acthook/errors.h"

namespace acthook {
namespace {

const std::string& require_string(const Json& obj, const char* field,
                                  std::size_t line) {
  auto it = obj.find(field);
  if (it == obj.end()) {
    throw SchemaError(line, std::string("missing required field \"") + field + "\"");
  }
  if (!it->is_string()) {
    throw SchemaError(line, std::string("field \"") + field + "\" must be a string");
  }
  return it->get_ref<const std::string&>();
}

Step parse_step(const Json& j, std::size_t line) {
  if (!j.is_object()) throw SchemaError(line, "each step must be an object");
  Step s;
  s.action = require_string(j, "action", line);
  s.observation = require_string(j, "observation", line);
  if (s.action.empty()) throw SchemaError(line, "step action must be non-empty");
  for (const auto& [k, v] : j.items()) {
    if (k != "action" && k != "observation") s.extra[k] = v;
  }
  return s;
}

Json to_json(const Trajectory& t) {
  Json j = Json::object();
  j["id"] = t.id;
  j["task"] = t.task;
  Json steps = Json::array();
  for (const auto& s : t.steps) {
    Json sj = Json::object();
    sj["action"] = s.action;
    sj["observation"] = s.observation;
    for (const auto& [k, v] : s.extra.items()) sj[k] = v;
    steps.push_back(std::move(sj));
  }
  j["steps"] = std::move(steps);
  if (!t.meta.is_null()) j["meta"] = t.meta;
  for (const auto& [k, v] : t.extra.items()) j[k] = v;
  return j;
}

}  // namespace

Trajectory parse_trajectory(std::string_view line, std::size_t line_number) {
  Json j;
  try {
    j = Json::parse(line);
  } catch (const Json::parse_error& e) {
    throw ParseError(line_number, std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw SchemaError(line_number, "record must be a JSON object");

  Trajectory t;
  t.id = require_string(j, "id", line_number);
  t.task = require_string(j, "task", line_number);
  auto steps = j.find("steps");
  if (steps == j.end()) throw SchemaError(line_number, "missing required field \"steps\"");
  if (!steps->is_array()) throw SchemaError(line_number, "field \"steps\" must be an array");
  t.steps.reserve(steps->size());
  for (const auto& s : *steps) t.steps.push_back(parse_step(s, line_number));
  if (auto meta = j.find("meta"); meta != j.end()) {
    if (!meta->is_object()) throw SchemaError(line_number, "field \"meta\" must be an object");
    t.meta = *meta;
  }
  for (const auto& [k, v] : j.items()) {
    if (k != "id" && k != "task" && k != "steps" && k != "meta") t.extra[k] = v;
  }
  t.source_line = std::string(line);
  return t;
}

Dataset parse_dataset(std::istream& in, DatasetFormat) {
  Dataset d;
  std::unordered_map<std::string, std::size_t> seen;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Trajectory t = parse_trajectory(line, line_number);
    if (!seen.emplace(t.id, line_number).second) {
      throw ValidationError("line " + std::to_string(line_number) +
                            ": duplicate trajectory id \"" + t.id + "\"");
    }
    d.trajectories.push_back(std::move(t));
  }
  return d;
}

Dataset parse_dataset(std::string_view text, DatasetFormat format) {
  std::istringstream in{std::string(text)};
  return parse_dataset(in, format);
}

std::string canonical_line(const Trajectory& t) {
  try {
    return to_json(t).dump();
  } catch (const Json::type_error& e) {
    throw ValidationError("trajectory \"" + t.id + "\": " + e.what());
  }
}

std::string serialize_trajectory(const Trajectory& t) {
  return t.source_line.empty() ? canonical_line(t) : t.source_line;
}

void serialize_dataset(const Dataset& d, std::ostream& out, DatasetFormat) {
  for (const auto& t : d.trajectories) out << serialize_trajectory(t) << '\n';
}

std::string serialize_dataset(const Dataset& d, DatasetFormat format) {
  std::ostringstream out;
  serialize_dataset(d, out, format);
  return out.str();
}

void validate(const Dataset& d) {
  std::unordered_map<std::string, std::size_t> seen;
  for (std::size_t i = 0; i < d.trajectories.size(); ++i) {
    const auto& t = d.trajectories[i];
    if (!seen.emplace(t.id, i).second) {
      throw ValidationError("duplicate trajectory id \"" + t.id + "\"");
    }
    for (const auto& s : t.steps) {
      if (s.action.empty()) {
        throw ValidationError("trajectory \"" + t.id + "\" has an empty action");
      }
    }
  }
}

std::unordered_map<std::string, std::size_t> index_by_id(const Dataset& d) {
  std::unordered_map<std::string, std::size_t> index;
  index.reserve(d.trajectories.size());
  for (std::size_t i = 0; i < d.trajectories.size(); ++i) {
    index.emplace(d.trajectories[i].id, i);
  }
  return index;
}

std::vector<std::string> actions_of(const Trajectory& t) {
  std::vector<std::string> out;
  out.reserve(t.steps.size());
  for (const auto& s : t.steps) out.push_back(s.action);
  return out;
}

std::string append_key(std::string_view task, std::string_view key) {
  if (key.empty()) throw ArgumentError("activation key must be non-empty");
  std::string out;
  out.reserve(task.size() + 1 + key.size());
  out.append(task);
  if (!out.empty()) out.push_back(' ');
  out.append(key);
  return out;
}

}  // namespace acthook
