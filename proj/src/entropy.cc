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

#include "acthook/entropy.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "acthook/errors.h"
#include "acthook/json_io.h"

namespace acthook {

std::string_view to_string(EntropyMode m) {
  return m == EntropyMode::kRenormalizedTopK ? "renormalized_topk" : "tail_floor";
}

EntropyMode entropy_mode_from_string(std::string_view s) {
  if (s == "renormalized_topk") return EntropyMode::kRenormalizedTopK;
  if (s == "tail_floor") return EntropyMode::kTailFloor;
  throw ArgumentError("unknown entropy mode \"" + std::string(s) +
                      "\" (expected renormalized_topk|tail_floor)");
}

double token_entropy(std::span<const TokenCandidate> candidates, EntropyMode mode) {
  if (candidates.empty()) throw ArgumentError("token_entropy needs at least one candidate");
  double max_lp = -std::numeric_limits<double>::infinity();
  for (const auto& c : candidates) max_lp = std::max(max_lp, c.logprob);
  if (max_lp == -std::numeric_limits<double>::infinity()) {
    throw ArgumentError("token_entropy: every candidate has zero probability");
  }
  double z = 0.0;
  for (const auto& c : candidates) z += std::exp(c.logprob - max_lp);
  double h = 0.0;
  for (const auto& c : candidates) {
    const double p = std::exp(c.logprob - max_lp) / z;
    if (p > 0.0) h -= p * std::log(p);
  }
  if (mode == EntropyMode::kTailFloor) {
    double mass = 0.0;
    for (const auto& c : candidates) mass += std::exp(c.logprob);
    const double residual = 1.0 - mass;
    if (residual > 0.0) h -= residual * std::log(residual);
  }
  return std::max(0.0, h);
}

namespace {

TokenRecord parse_record(std::string_view line, std::size_t line_number) {
  Json j;
  try {
    j = Json::parse(line);
  } catch (const Json::parse_error& e) {
    throw ParseError(line_number, std::string("malformed JSON: ") + e.what());
  }
  try {
    TokenRecord r;
    r.position = j.at("position").get<int64_t>();
    r.is_action_start = j.value("is_action_start", false);
    if (j.contains("token")) r.token = j.at("token").get<std::string>();
    for (const auto& c : j.at("candidates")) {
      if (!c.is_array() || c.size() != 2) {
        throw SchemaError(line_number, "candidate must be a [token, logprob] pair");
      }
      TokenCandidate tc{c.at(0).get<std::string>(), c.at(1).get<double>()};
      if (std::isnan(tc.logprob) || tc.logprob > 0.0) {
        throw SchemaError(line_number, "candidate log probability must be <= 0");
      }
      r.candidates.push_back(std::move(tc));
    }
    if (r.candidates.empty()) throw SchemaError(line_number, "candidates must be non-empty");
    return r;
  } catch (const Json::exception& e) {
    throw SchemaError(line_number, e.what());
  }
}

std::string emitted_text(const TokenRecord& r) {
  if (r.token) return *r.token;
  const auto best = std::max_element(
      r.candidates.begin(), r.candidates.end(),
      [](const TokenCandidate& a, const TokenCandidate& b) { return a.logprob < b.logprob; });
  return best->token;
}

}  // namespace

void assign_offsets(std::vector<TokenRecord>& records) {
  int64_t offset = -1;
  for (auto& r : records) {
    if (r.is_action_start) {
      offset = 0;
    } else if (offset >= 0) {
      ++offset;
    }
    r.within_action_offset = offset;
  }
}

std::vector<TokenRecord> parse_token_records(std::istream& in) {
  std::vector<TokenRecord> records;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    records.push_back(parse_record(line, line_number));
  }
  std::stable_sort(records.begin(), records.end(),
                   [](const TokenRecord& a, const TokenRecord& b) { return a.position < b.position; });
  assign_offsets(records);
  return records;
}

std::vector<TokenRecord> parse_token_records(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_token_records(in);
}

std::string serialize_token_records(std::span<const TokenRecord> records) {
  std::string out;
  for (const auto& r : records) {
    Json j = Json::object();
    j["position"] = r.position;
    Json cands = Json::array();
    for (const auto& c : r.candidates) cands.push_back(Json::array({c.token, c.logprob}));
    j["candidates"] = std::move(cands);
    j["is_action_start"] = r.is_action_start;
    if (r.token) j["token"] = *r.token;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::size_t mark_boundaries_from_actions(std::vector<TokenRecord>& records,
                                         const std::vector<std::string>& actions) {
  if (std::any_of(records.begin(), records.end(),
                  [](const TokenRecord& r) { return r.is_action_start; })) {
    return 0;
  }
  std::string text;
  std::vector<std::size_t> starts;  // char offset of each token
  starts.reserve(records.size());
  for (const auto& r : records) {
    starts.push_back(text.size());
    text += emitted_text(r);
  }
  std::size_t cursor = 0;
  std::size_t located = 0;
  for (const auto& action : actions) {
    if (action.empty()) continue;
    const std::size_t at = text.find(action, cursor);
    if (at == std::string::npos) continue;
    // Token whose span contains `at`.
    auto it = std::upper_bound(starts.begin(), starts.end(), at);
    const auto token = static_cast<std::size_t>(std::distance(starts.begin(), it)) - 1;
    records[token].is_action_start = true;
    cursor = at + action.size();
    ++located;
  }
  assign_offsets(records);
  return located;
}

EntropyProfile boundary_profile(std::span<const TokenRecord> records, std::size_t max_offset,
                                EntropyMode mode) {
  EntropyProfile p;
  p.mode = mode;
  std::vector<double> sums(max_offset + 1, 0.0);
  std::vector<std::size_t> counts(max_offset + 1, 0);
  for (const auto& r : records) {
    const double h = token_entropy(r.candidates, mode);
    p.per_token.emplace_back(r.position, h);
    if (r.is_action_start) p.boundaries.push_back(r.position);
    if (r.within_action_offset >= 0 &&
        static_cast<std::size_t>(r.within_action_offset) <= max_offset) {
      const auto o = static_cast<std::size_t>(r.within_action_offset);
      sums[o] += h;
      ++counts[o];
    }
  }
  if (p.boundaries.empty()) throw ArgumentError("no action boundaries in token records");
  for (std::size_t o = 0; o <= max_offset; ++o) {
    if (counts[o] > 0) p.mean_by_offset.push_back({o, sums[o] / static_cast<double>(counts[o]), counts[o]});
  }
  return p;
}

Json profile_to_json(const EntropyProfile& p) {
  Json j = Json::object();
  j["estimator"] = to_string(p.mode);
  j["unit"] = "nats";
  Json per_token = Json::array();
  for (const auto& [pos, h] : p.per_token) per_token.push_back(Json::array({pos, report_number(h)}));
  j["per_token"] = std::move(per_token);
  j["boundaries"] = p.boundaries;
  Json means = Json::array();
  for (const auto& m : p.mean_by_offset) {
    means.push_back({{"offset", m.offset}, {"mean", report_number(m.mean)}, {"count", m.count}});
  }
  j["mean_by_offset"] = std::move(means);
  return j;
}

std::string profile_csv(const EntropyProfile& p) {
  std::ostringstream out;
  out << "offset,mean_entropy_nats,count\n";
  out.precision(12);
  for (const auto& m : p.mean_by_offset) out << m.offset << ',' << m.mean << ',' << m.count << '\n';
  return out.str();
}

}  // namespace acthook
