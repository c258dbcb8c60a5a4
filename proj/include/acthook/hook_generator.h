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

#ifndef ACTHOOK_HOOK_GENERATOR_H_
#define ACTHOOK_HOOK_GENERATOR_H_

#include <cstdint>
#include <string_view>

#include "acthook/scheme.h"

namespace acthook {

enum class GeneratorKind { kLlm, kFallback };

std::string_view to_string(GeneratorKind k);
GeneratorKind generator_kind_from_string(std::string_view s);

struct GeneratedHook {
  HookPair hook;
  GeneratorKind used = GeneratorKind::kFallback;
};

// Produces the hook action/observation for one trajectory. Implementations
// must be safe to call concurrently.
class HookGenerator {
 public:
  virtual ~HookGenerator() = default;
  virtual GeneratedHook generate(const WatermarkScheme& scheme, const HookContext& ctx,
                                 uint64_t seed) = 0;
};

// Deterministic template hooks; never touches the network.
class FallbackGenerator final : public HookGenerator {
 public:
  GeneratedHook generate(const WatermarkScheme& scheme, const HookContext& ctx,
                         uint64_t) override {
    return {fallback_hook(scheme, ctx), GeneratorKind::kFallback};
  }
};

}  // namespace acthook

#endif  // ACTHOOK_HOOK_GENERATOR_H_
