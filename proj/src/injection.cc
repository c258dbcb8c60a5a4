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

#include "acthook/injection.h"

#include <algorithm>
#include <cmath>
#include <optional>

#include "acthook/errors.h"
#include "acthook/parallel.h"
#include "acthook/rng.h"

namespace acthook {

std::string_view to_string(GeneratorKind k) {
  return k == GeneratorKind::kLlm ? "llm" : "fallback";
}

GeneratorKind generator_kind_from_string(std::string_view s) {
  if (s == "llm") return GeneratorKind::kLlm;
  if (s == "fallback") return GeneratorKind::kFallback;
  throw ArgumentError("unknown generator \"" + std::string(s) + "\" (expected llm|fallback)");
}

bool WatermarkManifest::lists(std::string_view trajectory_id) const {
  return std::any_of(entries.begin(), entries.end(),
                     [&](const ManifestEntry& e) { return e.trajectory_id == trajectory_id; });
}

void ensure_not_watermarked(const WatermarkManifest& m, std::string_view trajectory_id) {
  if (m.lists(trajectory_id)) {
    throw ValidationError("trajectory \"" + std::string(trajectory_id) +
                          "\" already carries a hook");
  }
}

Json manifest_to_json(const WatermarkManifest& m) {
  Json entries = Json::array();
  for (const auto& e : m.entries) {
    Json je = Json::object();
    je["trajectory_id"] = e.trajectory_id;
    je["scheme_name"] = e.scheme_name;
    je["hook_index"] = e.hook_index;
    je["key"] = e.key;
    je["generator_used"] = to_string(e.generator_used);
    entries.push_back(std::move(je));
  }
  Json j = Json::object();
  j["ratio"] = m.ratio;
  j["seed"] = m.seed;
  j["target_count"] = m.target_count;
  j["entries"] = std::move(entries);
  return j;
}

WatermarkManifest manifest_from_json(const Json& j) {
  try {
    WatermarkManifest m;
    m.ratio = j.at("ratio").get<double>();
    m.seed = j.at("seed").get<uint64_t>();
    m.target_count = j.at("target_count").get<std::size_t>();
    for (const auto& je : j.at("entries")) {
      ManifestEntry e;
      e.trajectory_id = je.at("trajectory_id").get<std::string>();
      e.scheme_name = je.at("scheme_name").get<std::string>();
      e.hook_index = je.at("hook_index").get<std::size_t>();
      e.key = je.at("key").get<std::string>();
      e.generator_used = generator_kind_from_string(je.at("generator_used").get<std::string>());
      m.entries.push_back(std::move(e));
    }
    return m;
  } catch (const Json::exception& e) {
    throw SchemaError(0, std::string("invalid manifest: ") + e.what());
  }
}

namespace {

std::optional<Trajectory> place(const WatermarkScheme& scheme, const Trajectory& t,
                                std::size_t index, const HookPair& hook) {
  if (hook.action.empty()) return std::nullopt;
  Trajectory out = insert_hook(t, index, hook);
  if (!detect_at(scheme, actions_of(out), index)) return std::nullopt;
  return out;
}

}  // namespace

InjectResult inject(const WatermarkScheme& scheme, const Trajectory& t, HookGenerator& gen,
                    uint64_t seed) {
  auto placement = locate(scheme, t);
  if (!placement) {
    throw ArgumentError("trajectory \"" + t.id + "\" is not eligible for scheme \"" +
                        scheme.name + "\"");
  }
  const std::size_t index = hook_index(scheme, t, *placement, derive_seed(seed, "placement"));
  HookContext ctx = placement->context;
  if (scheme.kind == SchemeKind::kStandalone) {
    ctx.original_assistant = t.steps[std::min(index, t.steps.size() - 1)].action;
  }

  std::optional<GeneratedHook> generated;
  try {
    generated = gen.generate(scheme, ctx, derive_seed(seed, "generator"));
  } catch (const std::exception&) {
    generated.reset();
  }
  if (generated) {
    if (auto out = place(scheme, t, index, generated->hook)) {
      return {std::move(*out), index, generated->used};
    }
  }
  auto out = place(scheme, t, index, fallback_hook(scheme, ctx));
  if (!out) {
    throw ValidationError("fallback hook of scheme \"" + scheme.name +
                          "\" does not satisfy its own detect rules");
  }
  return {std::move(*out), index, GeneratorKind::kFallback};
}

std::vector<std::string> filter_valid(const Dataset& d, const WatermarkScheme& scheme) {
  std::vector<std::string> ids;
  for (const auto& t : d.trajectories) {
    if (check(scheme, t)) ids.push_back(t.id);
  }
  return ids;
}

std::vector<std::string> sample_targets(const std::vector<std::string>& valid, std::size_t n_w,
                                        uint64_t seed) {
  const std::size_t k = std::min(n_w, valid.size());
  std::vector<std::size_t> order(valid.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  // Partial Fisher-Yates: the first k slots are a uniform k-subset.
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.uniform(order.size() - i));
    std::swap(order[i], order[j]);
  }
  order.resize(k);
  std::sort(order.begin(), order.end());
  std::vector<std::string> out;
  out.reserve(k);
  for (std::size_t i : order) out.push_back(valid[i]);
  return out;
}

std::size_t target_count(double ratio, std::size_t dataset_size) {
  const double exact = ratio * static_cast<double>(dataset_size);
  // 0.29 * 100 evaluates to 28.999999999999996.
  return static_cast<std::size_t>(std::floor(exact + 1e-9 * std::max(1.0, exact)));
}

InjectionOutput inject_dataset(const Dataset& d, double ratio, const WatermarkScheme& scheme,
                               std::string_view key, uint64_t seed, HookGenerator& gen,
                               const InjectOptions& options) {
  if (!(ratio >= 0.0 && ratio <= 1.0)) throw ArgumentError("ratio must lie in [0, 1]");
  if (key.empty()) throw ArgumentError("activation key must be non-empty");

  InjectionOutput result;
  result.dataset = d;
  result.manifest.ratio = ratio;
  result.manifest.seed = seed;
  result.manifest.target_count = target_count(ratio, d.size());
  if (d.empty()) return result;

  // Phase 1: eligibility.
  std::vector<std::string> valid;
  for (const auto& t : d.trajectories) {
    if (options.prior && options.prior->lists(t.id)) continue;
    if (check(scheme, t)) valid.push_back(t.id);
  }
  result.eligible_count = valid.size();

  // Phase 2: selection, before any generator call.
  const auto selected = sample_targets(valid, result.manifest.target_count,
                                       derive_seed(seed, "sample"));
  if (selected.size() < result.manifest.target_count) {
    result.warnings.push_back(
        "only " + std::to_string(selected.size()) + " of " +
        std::to_string(result.manifest.target_count) + " target trajectories are eligible for " +
        scheme.name + "; achieved ratio " +
        std::to_string(static_cast<double>(selected.size()) / static_cast<double>(d.size())));
  }

  // Phase 3: injection, independent per trajectory.
  const auto index = index_by_id(d);
  std::vector<std::size_t> positions;
  positions.reserve(selected.size());
  for (const auto& id : selected) positions.push_back(index.at(id));

  std::vector<InjectResult> injected(positions.size());
  parallel_for(positions.size(), options.max_workers, [&](std::size_t i) {
    const Trajectory& original = d.trajectories[positions[i]];
    injected[i] = inject(scheme, original, gen,
                         derive_seed(seed, {fnv1a64("trajectory"), fnv1a64(original.id)}));
    injected[i].trajectory.task = append_key(original.task, key);
  });

  for (std::size_t i = 0; i < positions.size(); ++i) {
    ManifestEntry e;
    e.trajectory_id = injected[i].trajectory.id;
    e.scheme_name = scheme.name;
    e.hook_index = injected[i].hook_index;
    e.key = std::string(key);
    e.generator_used = injected[i].generator_used;
    result.manifest.entries.push_back(std::move(e));
    result.dataset.trajectories[positions[i]] = std::move(injected[i].trajectory);
  }
  return result;
}

}  // namespace acthook
