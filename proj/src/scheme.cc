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

#include "acthook/scheme.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "acthook/errors.h"
#include "acthook/rng.h"

namespace acthook {

std::string_view to_string(SchemeKind k) {
  return k == SchemeKind::kStandalone ? "standalone" : "contextual";
}

std::string_view to_string(ActionLanguage l) {
  return l == ActionLanguage::kPythonCode ? "python_code" : "bash";
}

std::string_view to_string(PlacementRule r) {
  switch (r) {
    case PlacementRule::kRandomBoundary: return "random_boundary";
    case PlacementRule::kBeforeAnchor: return "before_anchor";
    case PlacementRule::kAfterAnchor: return "after_anchor";
  }
  return "";
}

std::string_view to_string(AnchorData d) {
  switch (d) {
    case AnchorData::kNone: return "none";
    case AnchorData::kObservationUrl: return "observation_url";
    case AnchorData::kCreatedPath: return "created_path";
  }
  return "";
}

namespace {

// Longest prefix of at most `max_bytes` that does not split a UTF-8 sequence.
std::string_view utf8_prefix(std::string_view s, std::size_t max_bytes) {
  if (s.size() <= max_bytes) return s;
  std::size_t n = max_bytes;
  while (n > 0 && (static_cast<unsigned char>(s[n]) & 0xC0) == 0x80) --n;
  return s.substr(0, n);
}

std::string task_excerpt(std::string_view prompt) {
  std::string out(utf8_prefix(prompt, 80));
  for (char& c : out) {
    if (c == '\n' || c == '\r' || c == '\t') c = ' ';
    if (c == '"') c = '\'';
    if (c == '\\') c = '/';
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

}  // namespace

std::string fill_template(std::string_view text, const HookContext& ctx) {
  const std::pair<std::string_view, std::string> slots[] = {
      {"{original_assistant}", ctx.original_assistant},
      {"{user_prompt}", ctx.user_prompt},
      {"{original_user_prompt}", ctx.user_prompt},
      {"{original_user_content[:200]}", std::string(utf8_prefix(ctx.user_prompt, 200))},
      {"{url}", ctx.url},
      {"{file_to_check}", ctx.file_path},
      {"{task_excerpt}", task_excerpt(ctx.user_prompt)},
  };
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    if (text[pos] == '{') {
      bool replaced = false;
      for (const auto& [name, value] : slots) {
        if (text.compare(pos, name.size(), name) == 0) {
          out += value;
          pos += name.size();
          replaced = true;
          break;
        }
      }
      if (replaced) continue;
    }
    out.push_back(text[pos++]);
  }
  return out;
}

namespace {

std::optional<std::pair<std::size_t, HookContext>> find_anchor(
    const WatermarkScheme& s, const Trajectory& t) {
  const AnchorRule& rule = *s.anchor;
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    const Step& step = t.steps[i];
    if (!matches_all(rule.all_of, step.action)) continue;
    if (!rule.any_of.empty() && !matches_any(rule.any_of, step.action)) continue;
    HookContext ctx;
    ctx.user_prompt = t.task;
    ctx.original_assistant = step.action;
    switch (rule.data) {
      case AnchorData::kNone:
        break;
      case AnchorData::kObservationUrl: {
        auto url = first_url(step.observation);
        if (!url) continue;
        ctx.url = *url;
        break;
      }
      case AnchorData::kCreatedPath: {
        auto paths = s.creation_catalog().created_paths(step.action);
        if (paths.empty()) continue;
        ctx.file_path = paths.front();
        break;
      }
    }
    return std::make_pair(i, std::move(ctx));
  }
  return std::nullopt;
}

}  // namespace

std::optional<Placement> locate(const WatermarkScheme& s, const Trajectory& t) {
  if (t.steps.empty()) return std::nullopt;
  if (s.kind == SchemeKind::kStandalone || !s.anchor) {
    Placement p;
    p.context.user_prompt = t.task;
    p.context.original_assistant = t.steps.front().action;
    return p;
  }
  auto found = find_anchor(s, t);
  if (!found) return std::nullopt;
  return Placement{found->first, std::move(found->second)};
}

bool check(const WatermarkScheme& s, const Trajectory& t) {
  return locate(s, t).has_value();
}

std::size_t hook_index(const WatermarkScheme& s, const Trajectory& t,
                       const Placement& p, uint64_t seed) {
  const std::size_t T = t.steps.size();
  switch (s.placement) {
    case PlacementRule::kRandomBoundary: {
      Rng rng(seed);
      return static_cast<std::size_t>(rng.uniform(T + 1));
    }
    case PlacementRule::kBeforeAnchor:
      return p.anchor_index.value_or(0);
    case PlacementRule::kAfterAnchor:
      return p.anchor_index ? *p.anchor_index + 1 : T;
  }
  return T;
}

namespace {

bool rule_matches(const DetectRule& rule, const std::vector<std::string>& actions,
                  std::size_t i, const std::vector<std::string>& created_before) {
  const std::string& action = actions[i];
  if (!matches_all(rule.all_of, action)) return false;
  if (!rule.after_any.empty()) {
    bool preceded = false;
    for (std::size_t j = 0; j < i && !preceded; ++j) {
      preceded = matches_any(rule.after_any, actions[j]);
    }
    if (!preceded) return false;
  }
  if (rule.lists_created_path) {
    return std::any_of(created_before.begin(), created_before.end(),
                       [&](const std::string& p) { return action.find(p) != std::string::npos; });
  }
  return true;
}

bool needs_created_paths(const WatermarkScheme& s) {
  return std::any_of(s.detect_rules.begin(), s.detect_rules.end(),
                     [](const DetectRule& r) { return r.lists_created_path; });
}

}  // namespace

bool detect_at(const WatermarkScheme& s, const std::vector<std::string>& actions,
               std::size_t i) {
  if (i >= actions.size()) return false;
  std::vector<std::string> created;
  if (needs_created_paths(s)) {
    for (std::size_t j = 0; j < i; ++j) {
      for (auto& p : s.creation_catalog().created_paths(actions[j])) created.push_back(std::move(p));
    }
  }
  return std::any_of(s.detect_rules.begin(), s.detect_rules.end(),
                     [&](const DetectRule& r) { return rule_matches(r, actions, i, created); });
}

bool detect(const WatermarkScheme& s, const std::vector<std::string>& actions) {
  const bool track = needs_created_paths(s);
  std::vector<std::string> created;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    for (const DetectRule& rule : s.detect_rules) {
      if (rule_matches(rule, actions, i, created)) return true;
    }
    if (track) {
      for (auto& p : s.creation_catalog().created_paths(actions[i])) created.push_back(std::move(p));
    }
  }
  return false;
}

HookPair fallback_hook(const WatermarkScheme& s, const HookContext& ctx) {
  return HookPair{fill_template(s.fallback.action, ctx),
                  fill_template(s.fallback.observation, ctx)};
}

Trajectory insert_hook(const Trajectory& t, std::size_t index, const HookPair& hook) {
  if (index > t.steps.size()) {
    throw ArgumentError("hook index " + std::to_string(index) + " outside [0, " +
                        std::to_string(t.steps.size()) + "]");
  }
  if (hook.action.empty()) throw ArgumentError("hook action must be non-empty");
  Trajectory out = t;
  out.source_line.clear();
  Step step;
  step.action = hook.action;
  step.observation = hook.observation;
  out.steps.insert(out.steps.begin() + static_cast<std::ptrdiff_t>(index), std::move(step));
  return out;
}

void SchemeRegistry::add(WatermarkScheme s) {
  if (find(s.name)) throw ArgumentError("scheme \"" + s.name + "\" already registered");
  schemes_.push_back(std::move(s));
}

const WatermarkScheme* SchemeRegistry::find(std::string_view name) const {
  for (const auto& s : schemes_) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

const WatermarkScheme& SchemeRegistry::at(std::string_view name) const {
  if (const auto* s = find(name)) return *s;
  std::string known;
  for (const auto& n : names()) known += (known.empty() ? "" : ", ") + n;
  throw ArgumentError("unknown scheme \"" + std::string(name) + "\"; known: " + known);
}

std::vector<std::string> SchemeRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& s : schemes_) out.push_back(s.name);
  return out;
}

// --- JSON descriptors ---

namespace {

std::vector<Pattern> patterns_from(const Json& j, const char* field) {
  std::vector<Pattern> out;
  if (!j.contains(field)) return out;
  for (const auto& p : j.at(field)) out.emplace_back(p.get<std::string>());
  return out;
}

Json patterns_to(const std::vector<Pattern>& ps) {
  Json out = Json::array();
  for (const auto& p : ps) out.push_back(p.source());
  return out;
}

template <typename E>
E enum_from(const Json& j, const char* field, std::initializer_list<E> values, E fallback) {
  if (!j.contains(field)) return fallback;
  const auto name = j.at(field).get<std::string>();
  for (E v : values) {
    if (to_string(v) == name) return v;
  }
  throw ArgumentError(std::string("invalid value \"") + name + "\" for \"" + field + "\"");
}

}  // namespace

WatermarkScheme scheme_from_json(const Json& j) {
  try {
    WatermarkScheme s;
    s.name = j.at("name").get<std::string>();
    if (s.name.empty()) throw ArgumentError("scheme name must be non-empty");
    s.kind = enum_from(j, "kind", {SchemeKind::kStandalone, SchemeKind::kContextual},
                       SchemeKind::kStandalone);
    s.language = enum_from(j, "action_language",
                           {ActionLanguage::kPythonCode, ActionLanguage::kBash},
                           ActionLanguage::kPythonCode);
    s.placement = enum_from(j, "placement",
                            {PlacementRule::kRandomBoundary, PlacementRule::kBeforeAnchor,
                             PlacementRule::kAfterAnchor},
                            s.kind == SchemeKind::kStandalone ? PlacementRule::kRandomBoundary
                                                              : PlacementRule::kAfterAnchor);
    if (j.contains("anchor")) {
      const Json& a = j.at("anchor");
      AnchorRule rule;
      rule.all_of = patterns_from(a, "all_of");
      rule.any_of = patterns_from(a, "any_of");
      rule.data = enum_from(a, "data",
                            {AnchorData::kNone, AnchorData::kObservationUrl,
                             AnchorData::kCreatedPath},
                            AnchorData::kNone);
      s.anchor = std::move(rule);
    }
    if (s.kind == SchemeKind::kContextual && !s.anchor) {
      throw ArgumentError("contextual scheme \"" + s.name + "\" needs an anchor");
    }
    if (s.kind == SchemeKind::kStandalone && s.placement != PlacementRule::kRandomBoundary) {
      throw ArgumentError("standalone scheme \"" + s.name + "\" must use random_boundary");
    }
    for (const auto& r : j.at("detect")) {
      DetectRule rule;
      rule.all_of = patterns_from(r, "all_of");
      rule.after_any = patterns_from(r, "after_any");
      rule.lists_created_path = r.value("lists_created_path", false);
      if (rule.all_of.empty() && !rule.lists_created_path) {
        throw ArgumentError("detect rule in \"" + s.name + "\" matches everything");
      }
      s.detect_rules.push_back(std::move(rule));
    }
    if (s.detect_rules.empty()) throw ArgumentError("scheme \"" + s.name + "\" has no detect rules");
    if (j.contains("creation_patterns")) {
      s.creation = std::make_shared<const CreationCatalog>(
          j.at("creation_patterns").get<std::vector<std::string>>());
    }
    if (j.contains("generation_template")) {
      s.generation_template.system = j.at("generation_template").value("system", "");
      s.generation_template.user = j.at("generation_template").value("user", "");
    }
    s.fallback.action = j.at("fallback").at("action").get<std::string>();
    s.fallback.observation = j.at("fallback").value("observation", "");
    if (s.fallback.action.empty()) throw ArgumentError("fallback action must be non-empty");
    s.anchor_example = j.value("anchor_example", "");
    return s;
  } catch (const Json::exception& e) {
    throw ArgumentError(std::string("invalid scheme descriptor: ") + e.what());
  }
}

Json scheme_to_json(const WatermarkScheme& s) {
  Json j = Json::object();
  j["name"] = s.name;
  j["kind"] = to_string(s.kind);
  j["action_language"] = to_string(s.language);
  j["placement"] = to_string(s.placement);
  if (s.anchor) {
    j["anchor"] = {{"all_of", patterns_to(s.anchor->all_of)},
                   {"any_of", patterns_to(s.anchor->any_of)},
                   {"data", to_string(s.anchor->data)}};
  }
  Json rules = Json::array();
  for (const auto& r : s.detect_rules) {
    rules.push_back({{"all_of", patterns_to(r.all_of)},
                     {"after_any", patterns_to(r.after_any)},
                     {"lists_created_path", r.lists_created_path}});
  }
  j["detect"] = std::move(rules);
  if (s.creation) j["creation_patterns"] = s.creation->sources();
  j["generation_template"] = {{"system", s.generation_template.system},
                              {"user", s.generation_template.user}};
  j["fallback"] = {{"action", s.fallback.action}, {"observation", s.fallback.observation}};
  if (!s.anchor_example.empty()) j["anchor_example"] = s.anchor_example;
  return j;
}

WatermarkScheme load_scheme_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scheme descriptor " + path);
  try {
    return scheme_from_json(Json::parse(in));
  } catch (const Json::parse_error& e) {
    throw ParseError(0, path + ": " + e.what());
  }
}

}  // namespace acthook
