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

#ifndef ACTHOOK_AGENT_H_
#define ACTHOOK_AGENT_H_

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace acthook {

// Black-box access to a suspect agent: prompt text and a per-call seed in,
// the ordered action texts it produced out. Responders are treated as
// stochastic and must be safe to call concurrently.
struct AgentHandle {
  using Responder = std::function<std::vector<std::string>(const std::string& prompt,
                                                            uint64_t call_seed)>;
  Responder respond;
  std::size_t max_steps = 10;
  std::chrono::milliseconds timeout{120000};
  std::string description;
};

}  // namespace acthook

#endif  // ACTHOOK_AGENT_H_
