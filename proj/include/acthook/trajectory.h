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

#ifndef ACTHOOK_TRAJECTORY_H_
#define ACTHOOK_TRAJECTORY_H_

#include <cstddef>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"

namespace acthook {

using Json = nlohmann::ordered_json;

// One (action, observation) interaction. Observations may be empty.
struct Step {
  std::string action;
  std::string observation;
  Json extra = Json::object();  // unknown per-step fields, original order

  friend bool operator==(const Step& a, const Step& b) {
    return a.action == b.action && a.observation == b.observation &&
           a.extra == b.extra;
  }
};

// A task prompt plus the ordered record of one task execution.
struct Trajectory {
  std::string id;
  std::string task;
  std::vector<Step> steps;
  Json meta;                    // null when the record had no "meta"
  Json extra = Json::object();  // unknown top-level fields

  // Exact input line this value was parsed from. Serialization re-emits it
  // verbatim while set; every library transform clears it.
  std::string source_line;

  friend bool operator==(const Trajectory& a, const Trajectory& b) {
    return a.id == b.id && a.task == b.task && a.steps == b.steps &&
           a.meta == b.meta && a.extra == b.extra;
  }
};

struct Dataset {
  std::vector<Trajectory> trajectories;

  std::size_t size() const { return trajectories.size(); }
  bool empty() const { return trajectories.empty(); }
  friend bool operator==(const Dataset&, const Dataset&) = default;
};

enum class DatasetFormat { kJsonl };

// Throws ParseError (malformed JSON, with line number), SchemaError (missing
// or mistyped field) or ValidationError (duplicate id).
Dataset parse_dataset(std::istream& in, DatasetFormat format = DatasetFormat::kJsonl);
Dataset parse_dataset(std::string_view text, DatasetFormat format = DatasetFormat::kJsonl);

Trajectory parse_trajectory(std::string_view line, std::size_t line_number = 0);

void serialize_dataset(const Dataset& d, std::ostream& out,
                       DatasetFormat format = DatasetFormat::kJsonl);
std::string serialize_dataset(const Dataset& d,
                              DatasetFormat format = DatasetFormat::kJsonl);

// Single JSONL record without the trailing newline. Uses source_line if set.
std::string serialize_trajectory(const Trajectory& t);
// Canonical form, ignoring source_line.
std::string canonical_line(const Trajectory& t);

// Throws ValidationError on duplicate ids or empty actions.
void validate(const Dataset& d);

// id -> position in d.trajectories
std::unordered_map<std::string, std::size_t> index_by_id(const Dataset& d);

std::vector<std::string> actions_of(const Trajectory& t);

// task + ' ' + key (just key for an empty task). Not idempotent.
// Throws ArgumentError when key is empty.
std::string append_key(std::string_view task, std::string_view key);

}  // namespace acthook

#endif  // ACTHOOK_TRAJECTORY_H_
