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

#include "acthook/llm_client.h"

#include <cstdlib>
#include <thread>

#include "httplib.h"

#include "acthook/errors.h"
#include "acthook/rng.h"

namespace acthook {

EndpointConfig endpoint_from_env(std::string base_url, std::string model) {
  EndpointConfig cfg;
  cfg.base_url = std::move(base_url);
  cfg.model = std::move(model);
  if (const char* key = std::getenv(kApiKeyEnv)) cfg.api_key = key;
  return cfg;
}

Json endpoint_to_json(const EndpointConfig& cfg) {
  Json j = Json::object();
  j["base_url"] = cfg.base_url;
  j["model"] = cfg.model;
  j["api_key_set"] = !cfg.api_key.empty();
  j["timeout_ms"] = cfg.timeout.count();
  j["max_retries"] = cfg.max_retries;
  j["temperature"] = cfg.temperature;
  j["top_p"] = cfg.top_p;
  j["max_in_flight"] = cfg.max_in_flight;
  return j;
}

Json chat_request_json(const EndpointConfig& cfg, std::string_view system, std::string_view user,
                       bool want_logprobs, std::optional<uint64_t> call_seed) {
  Json messages = Json::array();
  if (!system.empty()) messages.push_back({{"role", "system"}, {"content", system}});
  messages.push_back({{"role", "user"}, {"content", user}});
  Json j = Json::object();
  j["model"] = cfg.model;
  j["messages"] = std::move(messages);
  j["temperature"] = cfg.temperature;
  j["top_p"] = cfg.top_p;
  // 31 bits fit every backend's integer seed type.
  if (call_seed) j["seed"] = *call_seed & 0x7fffffffULL;
  if (want_logprobs) {
    j["logprobs"] = true;
    j["top_logprobs"] = cfg.top_logprobs;
  }
  return j;
}

ChatResult parse_chat_response(std::string_view body, bool want_logprobs) {
  Json j;
  try {
    j = Json::parse(body);
  } catch (const Json::parse_error&) {
    throw ProtocolError(200, "response is not JSON");
  }
  try {
    const Json& choice = j.at("choices").at(0);
    ChatResult r;
    const Json& content = choice.at("message").at("content");
    if (!content.is_null()) r.text = content.get<std::string>();
    if (want_logprobs) {
      auto lp = choice.find("logprobs");
      if (lp == choice.end() || lp->is_null() || !lp->contains("content") ||
          lp->at("content").is_null()) {
        throw CapabilityError("endpoint returned no logprobs");
      }
      std::vector<TokenLogprob> tokens;
      for (const auto& t : lp->at("content")) {
        TokenLogprob tl;
        tl.token = t.at("token").get<std::string>();
        tl.logprob = t.at("logprob").get<double>();
        if (t.contains("top_logprobs")) {
          for (const auto& c : t.at("top_logprobs")) {
            tl.top.push_back({c.at("token").get<std::string>(), c.at("logprob").get<double>()});
          }
        }
        if (tl.top.empty()) tl.top.push_back({tl.token, tl.logprob});
        tokens.push_back(std::move(tl));
      }
      r.logprobs = std::move(tokens);
    }
    return r;
  } catch (const Json::exception& e) {
    throw ProtocolError(200, std::string("malformed chat response: ") + e.what());
  }
}

LlmClient::LlmClient(EndpointConfig cfg)
    : cfg_(std::move(cfg)),
      in_flight_(std::make_shared<std::counting_semaphore<1024>>(
          static_cast<std::ptrdiff_t>(std::clamp<std::size_t>(cfg_.max_in_flight, 1, 1024)))) {
  if (cfg_.temperature < 0.0) throw ArgumentError("temperature must be >= 0");
  std::string url = cfg_.base_url;
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw ArgumentError("endpoint URL needs an http:// or https:// scheme: " + url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  origin_ = url.substr(0, path_start);
  std::string path = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!path.empty() && path.back() == '/') path.pop_back();
  constexpr std::string_view kSuffix = "/chat/completions";
  if (path.size() < kSuffix.size() || path.compare(path.size() - kSuffix.size(), kSuffix.size(), kSuffix) != 0) {
    path += kSuffix;
  }
  path_ = path;
}

std::string LlmClient::scrub(std::string text) const {
  if (cfg_.api_key.empty()) return text;
  for (auto pos = text.find(cfg_.api_key); pos != std::string::npos;
       pos = text.find(cfg_.api_key, pos)) {
    text.replace(pos, cfg_.api_key.size(), "<redacted>");
  }
  return text;
}

ChatResult LlmClient::chat(std::string_view system, std::string_view user, bool want_logprobs,
                           std::optional<uint64_t> call_seed) const {
  const std::string body = chat_request_json(cfg_, system, user, want_logprobs, call_seed).dump();
  in_flight_->acquire();
  struct Release {
    std::counting_semaphore<1024>& s;
    ~Release() { s.release(); }
  } release{*in_flight_};

  httplib::Headers headers;
  if (!cfg_.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg_.api_key);

  auto delay = cfg_.backoff;
  std::string last_error;
  int last_status = 0;
  for (std::size_t attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
    if (attempt > 0 && delay.count() > 0) {
      std::this_thread::sleep_for(delay);
      delay *= 2;
    }
    httplib::Client client(origin_);
    const auto secs = cfg_.timeout.count() / 1000;
    const auto usecs = (cfg_.timeout.count() % 1000) * 1000;
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);
    auto res = client.Post(path_, headers, body, "application/json");
    if (!res) {
      last_status = 0;
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 200 && res->status < 300) {
      return parse_chat_response(res->body, want_logprobs);
    }
    last_status = res->status;
    last_error = res->body.substr(0, 200);
    if (res->status != 429 && res->status < 500) break;
  }
  if (last_status == 0) {
    throw TransportError(scrub("request to " + origin_ + path_ + " failed after " +
                               std::to_string(cfg_.max_retries + 1) + " attempts: " + last_error));
  }
  throw ProtocolError(last_status, scrub("HTTP " + std::to_string(last_status) + " from " +
                                         origin_ + path_ + ": " + last_error));
}

ChatResult chat(const EndpointConfig& cfg, std::string_view system, std::string_view user,
                bool want_logprobs, std::optional<uint64_t> call_seed) {
  return LlmClient(cfg).chat(system, user, want_logprobs, call_seed);
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::optional<std::string> code_tag_body(std::string_view text) {
  const auto open = text.find("<code>");
  if (open == std::string_view::npos) return std::nullopt;
  const auto close = text.find("</code>", open);
  if (close == std::string_view::npos) return std::nullopt;
  return std::string(text.substr(open + 6, close - open - 6));
}

}  // namespace

std::optional<std::string> extract_hook_action(ActionLanguage language, std::string_view reply) {
  std::string text(reply);
  if (language == ActionLanguage::kPythonCode) {
    // Replies often close with "<\code>", as the prompt example does.
    for (auto p = text.find("<\\code>"); p != std::string::npos; p = text.find("<\\code>", p)) {
      text.replace(p, 7, "</code>");
    }
    const auto body = code_tag_body(text);
    if (!body || trim(*body).empty()) return std::nullopt;
    const auto end = text.find("</code>") + 7;
    return trim(std::string_view(text).substr(0, end));
  }
  const auto open = text.find("<function=");
  if (open == std::string::npos) return std::nullopt;
  const auto close = text.find("</function>", open);
  if (close == std::string::npos) return std::nullopt;
  return trim(std::string_view(text).substr(0, close + 11));
}

GeneratedHook generate_hook(const LlmClient& client, const WatermarkScheme& scheme,
                            const HookContext& ctx, uint64_t seed) {
  const HookPair fallback = fallback_hook(scheme, ctx);
  if (scheme.generation_template.user.empty()) return {fallback, GeneratorKind::kFallback};

  const std::string system = fill_template(scheme.generation_template.system, ctx);
  const std::string user = fill_template(scheme.generation_template.user, ctx);
  const bool anchored = scheme.kind == SchemeKind::kContextual &&
                        scheme.placement == PlacementRule::kAfterAnchor &&
                        !ctx.original_assistant.empty();
  for (uint64_t attempt = 0; attempt < 2; ++attempt) {
    std::optional<std::string> action;
    try {
      action = extract_hook_action(scheme.language,
                                   client.chat(system, user, false, derive_seed(seed, {attempt})).text);
    } catch (const std::exception&) {
      break;
    }
    if (!action) continue;
    std::vector<std::string> seq;
    if (anchored) seq.push_back(ctx.original_assistant);
    seq.push_back(*action);
    if (!detect_at(scheme, seq, seq.size() - 1)) continue;

    HookPair hook{*action, fallback.observation};
    if (scheme.language == ActionLanguage::kPythonCode) {
      try {
        const auto code = code_tag_body(*action);
        const auto predicted = client.chat(
            "You simulate the Python interpreter of a code agent. Reply with only the text the "
            "code would print, nothing else.",
            code ? *code : *action, false, derive_seed(seed, {attempt, 1}));
        hook.observation = "Execution logs:\n" + trim(predicted.text) +
                           "\nLast output from code snippet:\nNone";
      } catch (const std::exception&) {
        // keep the template observation
      }
    }
    return {std::move(hook), GeneratorKind::kLlm};
  }
  return {fallback, GeneratorKind::kFallback};
}

std::string_view to_string(ActionFormat f) {
  switch (f) {
    case ActionFormat::kAuto: return "auto";
    case ActionFormat::kCodeTags: return "code_tags";
    case ActionFormat::kFunctionTags: return "function_tags";
    case ActionFormat::kFencedCode: return "fenced_code";
  }
  return "";
}

ActionFormat action_format_from_string(std::string_view s) {
  for (auto f : {ActionFormat::kAuto, ActionFormat::kCodeTags, ActionFormat::kFunctionTags,
                 ActionFormat::kFencedCode}) {
    if (to_string(f) == s) return f;
  }
  throw ArgumentError("unknown action format \"" + std::string(s) + "\"");
}

namespace {

std::vector<std::string> between(std::string_view text, std::string_view open,
                                 std::string_view close, bool keep_tags) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const auto b = text.find(open, pos);
    if (b == std::string_view::npos) break;
    const auto e = text.find(close, b + open.size());
    if (e == std::string_view::npos) break;
    if (keep_tags) {
      out.emplace_back(text.substr(b, e + close.size() - b));
    } else {
      out.emplace_back(text.substr(b + open.size(), e - b - open.size()));
    }
    pos = e + close.size();
  }
  return out;
}

std::vector<std::string> fenced_blocks(std::string_view text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const auto b = text.find("```", pos);
    if (b == std::string_view::npos) break;
    const auto body = text.find('\n', b + 3);
    if (body == std::string_view::npos) break;
    const auto e = text.find("```", body + 1);
    if (e == std::string_view::npos) break;
    out.emplace_back(text.substr(body + 1, e - body - 1));
    pos = e + 3;
  }
  return out;
}

}  // namespace

std::vector<std::string> extract_actions(std::string_view reply, ActionFormat format) {
  switch (format) {
    case ActionFormat::kCodeTags: return between(reply, "<code>", "</code>", false);
    case ActionFormat::kFunctionTags: return between(reply, "<function=", "</function>", true);
    case ActionFormat::kFencedCode: return fenced_blocks(reply);
    case ActionFormat::kAuto: {
      for (auto f : {ActionFormat::kCodeTags, ActionFormat::kFunctionTags, ActionFormat::kFencedCode}) {
        auto actions = extract_actions(reply, f);
        if (!actions.empty()) return actions;
      }
      return {};
    }
  }
  return {};
}

AgentHandle remote_agent(std::shared_ptr<const LlmClient> client, Scaffold scaffold) {
  if (!client) throw ArgumentError("remote_agent needs a client");
  AgentHandle agent;
  agent.max_steps = scaffold.max_steps;
  agent.timeout = client->config().timeout;
  agent.description = "http:" + client->config().base_url;
  agent.respond = [client = std::move(client), scaffold = std::move(scaffold)](
                      const std::string& prompt, uint64_t call_seed) {
    std::string user = scaffold.user_template;
    if (auto p = user.find("{task}"); p != std::string::npos) {
      user.replace(p, 6, prompt);
    } else {
      user += prompt;
    }
    const auto reply = client->chat(scaffold.system_prompt, user, false, call_seed);
    auto actions = extract_actions(reply.text, scaffold.format);
    if (actions.size() > scaffold.max_steps) actions.resize(scaffold.max_steps);
    return actions;
  };
  return agent;
}

}  // namespace acthook
