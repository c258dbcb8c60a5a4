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

#ifndef ACTHOOK_LLM_CLIENT_H_
#define ACTHOOK_LLM_CLIENT_H_

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <vector>

#include "acthook/agent.h"
#include "acthook/entropy.h"
#include "acthook/hook_generator.h"
#include "acthook/scheme.h"
#include "acthook/trajectory.h"

namespace acthook {

inline constexpr const char* kApiKeyEnv = "ACTHOOK_API_KEY";

struct EndpointConfig {
  std::string base_url;  // e.g. http://localhost:8000/v1
  std::string model;
  std::string api_key;   // never serialized
  std::chrono::milliseconds timeout{60000};
  std::size_t max_retries = 2;
  std::chrono::milliseconds backoff{500};  // doubled after each retry
  double temperature = 0.6;
  double top_p = 1.0;
  int top_logprobs = 20;  // largest top-k most endpoints accept
  std::size_t max_in_flight = 8;
};

// base_url and model as given; api_key from ACTHOOK_API_KEY when set.
EndpointConfig endpoint_from_env(std::string base_url, std::string model);

// Serializable view with the credential replaced by a presence flag.
Json endpoint_to_json(const EndpointConfig& cfg);

struct TokenLogprob {
  std::string token;
  double logprob = 0.0;
  std::vector<TokenCandidate> top;
};

struct ChatResult {
  std::string text;
  std::optional<std::vector<TokenLogprob>> logprobs;
};

// Body of a chat-completions request. Key order is fixed.
Json chat_request_json(const EndpointConfig& cfg, std::string_view system, std::string_view user,
                       bool want_logprobs, std::optional<uint64_t> call_seed);

// Throws ProtocolError on a malformed body, CapabilityError when logprobs
// were requested but are absent.
ChatResult parse_chat_response(std::string_view body, bool want_logprobs);

// Chat-completions client. Shareable across threads; at most
// cfg.max_in_flight requests are outstanding at once.
class LlmClient {
 public:
  explicit LlmClient(EndpointConfig cfg);

  // Throws TransportError after retries, ProtocolError on non-2xx,
  // CapabilityError when logprobs are requested but missing.
  ChatResult chat(std::string_view system, std::string_view user, bool want_logprobs,
                  std::optional<uint64_t> call_seed = std::nullopt) const;

  const EndpointConfig& config() const { return cfg_; }

 private:
  std::string scrub(std::string text) const;

  EndpointConfig cfg_;
  std::string origin_;  // scheme://host:port
  std::string path_;    // .../chat/completions
  std::shared_ptr<std::counting_semaphore<1024>> in_flight_;
};

ChatResult chat(const EndpointConfig& cfg, std::string_view system, std::string_view user,
                bool want_logprobs, std::optional<uint64_t> call_seed = std::nullopt);

// Pulls the hook action out of a generator reply: python schemes need a
// <code>...</code> block, bash schemes a <function=...>...</function> call.
std::optional<std::string> extract_hook_action(ActionLanguage language, std::string_view reply);

// Fills the scheme's generation prompts, asks the endpoint for a hook and
// keeps it only if the scheme detects it in context; one retry, then the
// fallback hook. Python hooks get a predicted interpreter output as their
// observation. Never throws for endpoint failures.
GeneratedHook generate_hook(const LlmClient& client, const WatermarkScheme& scheme,
                            const HookContext& ctx, uint64_t seed);

class LlmHookGenerator final : public HookGenerator {
 public:
  explicit LlmHookGenerator(std::shared_ptr<const LlmClient> client) : client_(std::move(client)) {}
  GeneratedHook generate(const WatermarkScheme& scheme, const HookContext& ctx,
                         uint64_t seed) override {
    return generate_hook(*client_, scheme, ctx, seed);
  }

 private:
  std::shared_ptr<const LlmClient> client_;
};

// How a remote reply is split into actions.
enum class ActionFormat { kAuto, kCodeTags, kFunctionTags, kFencedCode };

std::string_view to_string(ActionFormat f);
ActionFormat action_format_from_string(std::string_view s);

std::vector<std::string> extract_actions(std::string_view reply, ActionFormat format);

struct Scaffold {
  std::string system_prompt;
  std::string user_template = "{task}";  // {task} is replaced by the prompt
  ActionFormat format = ActionFormat::kAuto;
  std::size_t max_steps = 10;
};

AgentHandle remote_agent(std::shared_ptr<const LlmClient> client, Scaffold scaffold);

}  // namespace acthook

#endif  // ACTHOOK_LLM_CLIENT_H_
