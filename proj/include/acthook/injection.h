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

#ifndef ACTHOOK_INJECTION_H_
#define ACTHOOK_INJECTION_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "acthook/hook_generator.h"
#include "acthook/scheme.h"
#include "acthook/trajectory.h"

namespace acthook {

struct ManifestEntry {
  std::string trajectory_id;
  std::string scheme_name;
  std::size_t hook_index = 0;
  std::string key;
  GeneratorKind generator_used = GeneratorKind::kFallback;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

// The dataset owner's record of what was modified. Secret, like the key.
struct WatermarkManifest {
  std::vector<ManifestEntry> entries;
  double ratio = 0.0;
  uint64_t seed = 0;
  std::size_t target_count = 0;  // floor(ratio * |dataset|)

  bool lists(std::string_view trajectory_id) const;
  friend bool operator==(const WatermarkManifest&, const WatermarkManifest&) = default;
};

Json manifest_to_json(const WatermarkManifest& m);
WatermarkManifest manifest_from_json(const Json& j);

// Throws ValidationError if the manifest already lists `trajectory_id`.
void ensure_not_watermarked(const WatermarkManifest& m, std::string_view trajectory_id);

struct InjectResult {
  Trajectory trajectory;
  std::size_t hook_index = 0;
  GeneratorKind generator_used = GeneratorKind::kFallback;
};

// Inserts one hook. Does not touch the task. Throws ArgumentError when
// check(scheme, t) is false. A throwing generator, or one whose hook the
// scheme cannot detect in place, is replaced by the fallback hook.
InjectResult inject(const WatermarkScheme& scheme, const Trajectory& t, HookGenerator& gen,
                    uint64_t seed);

// Ids of eligible trajectories, in dataset order.
std::vector<std::string> filter_valid(const Dataset& d, const WatermarkScheme& scheme);

// min(n_w, |valid|) ids drawn uniformly without replacement, returned in
// their order within `valid`.
std::vector<std::string> sample_targets(const std::vector<std::string>& valid, std::size_t n_w,
                                        uint64_t seed);

// floor(ratio * dataset_size), tolerant of representation error in ratio.
std::size_t target_count(double ratio, std::size_t dataset_size);

struct InjectOptions {
  std::size_t max_workers = 1;
  // Trajectories listed here already carry a hook and are never selected.
  const WatermarkManifest* prior = nullptr;
};

struct InjectionOutput {
  Dataset dataset;
  WatermarkManifest manifest;
  std::size_t eligible_count = 0;
  std::vector<std::string> warnings;
};

InjectionOutput inject_dataset(const Dataset& d, double ratio, const WatermarkScheme& scheme,
                               std::string_view key, uint64_t seed, HookGenerator& gen,
                               const InjectOptions& options = {});

}  // namespace acthook

#endif  // ACTHOOK_INJECTION_H_
