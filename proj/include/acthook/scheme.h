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

#ifndef ACTHOOK_SCHEME_H_
#define ACTHOOK_SCHEME_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "acthook/patterns.h"
#include "acthook/trajectory.h"

namespace acthook {

enum class SchemeKind { kStandalone, kContextual };
enum class ActionLanguage { kPythonCode, kBash };

// Where the hook goes. kRandomBoundary draws uniformly from [0, T].
enum class PlacementRule { kRandomBoundary, kBeforeAnchor, kAfterAnchor };

// What a contextual anchor step contributes to hook generation.
enum class AnchorData { kNone, kObservationUrl, kCreatedPath };

std::string_view to_string(SchemeKind k);
std::string_view to_string(ActionLanguage l);
std::string_view to_string(PlacementRule r);
std::string_view to_string(AnchorData d);

struct AnchorRule {
  std::vector<Pattern> all_of;  // action must contain every pattern
  std::vector<Pattern> any_of;  // and at least one of these, when non-empty
  AnchorData data = AnchorData::kNone;
};

// One way a hook can show up in an action sequence.
struct DetectRule {
  std::vector<Pattern> all_of;     // within a single action
  std::vector<Pattern> after_any;  // some earlier action matches one of these
  bool lists_created_path = false; // action names a path created earlier
};

struct PromptTemplate {
  std::string system;
  std::string user;
};

struct HookPair {
  std::string action;
  std::string observation;
};

// Values available to hook templates. Placeholders: {original_assistant},
// {user_prompt}, {original_user_prompt}, {original_user_content[:200]},
// {url}, {file_to_check}, {task_excerpt}.
struct HookContext {
  std::string user_prompt;
  std::string original_assistant;
  std::string url;
  std::string file_path;
};

std::string fill_template(std::string_view text, const HookContext& ctx);

struct WatermarkScheme {
  std::string name;
  SchemeKind kind = SchemeKind::kStandalone;
  ActionLanguage language = ActionLanguage::kPythonCode;
  PlacementRule placement = PlacementRule::kRandomBoundary;
  std::optional<AnchorRule> anchor;  // required for contextual schemes
  std::vector<DetectRule> detect_rules;
  std::shared_ptr<const CreationCatalog> creation;  // null -> builtin()
  PromptTemplate generation_template;
  HookPair fallback;  // templates, filled with fill_template
  // Anchor action a simulator emits before the hook (contextual schemes).
  std::string anchor_example;

  const CreationCatalog& creation_catalog() const {
    return creation ? *creation : CreationCatalog::builtin();
  }
};

// Result of locating where a hook belongs in a trajectory.
struct Placement {
  std::optional<std::size_t> anchor_index;  // original step index
  HookContext context;
};

// Structural eligibility.
bool check(const WatermarkScheme& s, const Trajectory& t);

// Anchor and template context for an eligible trajectory; nullopt if check
// fails.
std::optional<Placement> locate(const WatermarkScheme& s, const Trajectory& t);

// Hook insertion index in [0, T] given a located placement. `seed` only
// matters for kRandomBoundary.
std::size_t hook_index(const WatermarkScheme& s, const Trajectory& t,
                       const Placement& p, uint64_t seed);

// True iff some rule matches some action.
bool detect(const WatermarkScheme& s, const std::vector<std::string>& actions);

// True iff some rule matches actions[i], given only the actions before it.
bool detect_at(const WatermarkScheme& s, const std::vector<std::string>& actions,
               std::size_t i);

HookPair fallback_hook(const WatermarkScheme& s, const HookContext& ctx);

// Copy of t with `hook` inserted at `index` (0..T). Clears source_line.
Trajectory insert_hook(const Trajectory& t, std::size_t index, const HookPair& hook);

class SchemeRegistry {
 public:
  void add(WatermarkScheme s);  // throws ArgumentError on duplicate name
  const WatermarkScheme* find(std::string_view name) const;
  // Throws ArgumentError listing known names.
  const WatermarkScheme& at(std::string_view name) const;
  std::vector<std::string> names() const;
  std::size_t size() const { return schemes_.size(); }

 private:
  std::vector<WatermarkScheme> schemes_;
};

// dependency_verification, input_validation, connectivity_check,
// forced_page_visit, workspace_inspection, creation_verification.
const SchemeRegistry& builtin_schemes();

// Custom scheme from a JSON descriptor (see README for the format).
WatermarkScheme scheme_from_json(const Json& j);
Json scheme_to_json(const WatermarkScheme& s);
WatermarkScheme load_scheme_file(const std::string& path);

}  // namespace acthook

#endif  // ACTHOOK_SCHEME_H_
