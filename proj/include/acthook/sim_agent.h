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

#ifndef ACTHOOK_SIM_AGENT_H_
#define ACTHOOK_SIM_AGENT_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "acthook/agent.h"
#include "acthook/scheme.h"
#include "acthook/trajectory.h"

namespace acthook {

// Bernoulli hook emitter standing in for a fine-tuned agent. A prompt that
// contains `key` emits a hook with probability q_k, otherwise q_c.
struct SimAgentConfig {
  std::string key;
  double q_k = 0.0;
  double q_c = 0.0;
  std::string scheme_name;
  std::size_t steps_min = 2;
  std::size_t steps_max = 6;
  uint64_t seed = 0;
  // The sham key the probe will use; validated against `key` if present.
  std::optional<std::string> sham;
  // "Confused" variant: prompts containing sham_trigger (and not key) emit
  // hooks at q_sham_trigger.
  std::optional<std::string> sham_trigger;
  double q_sham_trigger = 0.0;
};

// Throws ArgumentError on out-of-range rates, empty key, inverted step
// range, or a sham that is a substring of the key.
void validate(const SimAgentConfig& cfg);

SimAgentConfig sim_config_from_json(const Json& j);
Json sim_config_to_json(const SimAgentConfig& cfg);
SimAgentConfig load_sim_config(const std::string& path);

// Non-hook actions in the style of each action language.
const std::vector<std::string>& filler_catalog(ActionLanguage language);

// Pure function of (cfg, scheme, prompt, call_seed).
std::vector<std::string> respond(const SimAgentConfig& cfg, const WatermarkScheme& scheme,
                                 std::string_view prompt, uint64_t call_seed);

AgentHandle make_sim_agent(SimAgentConfig cfg, WatermarkScheme scheme);

}  // namespace acthook

#endif  // ACTHOOK_SIM_AGENT_H_
