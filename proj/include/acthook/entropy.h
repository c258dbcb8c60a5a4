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

#ifndef ACTHOOK_ENTROPY_H_
#define ACTHOOK_ENTROPY_H_

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "acthook/trajectory.h"

namespace acthook {

struct TokenCandidate {
  std::string token;
  double logprob = 0.0;  // natural log, <= 0
};

struct TokenRecord {
  int64_t position = 0;
  std::vector<TokenCandidate> candidates;  // top-k, non-empty
  bool is_action_start = false;
  std::optional<std::string> token;  // sampled token text, if captured
  // Tokens since the last action start; -1 before the first one.
  int64_t within_action_offset = -1;
};

// Over an API only the top-k candidates are visible, so entropy is
// estimated:
//   kRenormalizedTopK: renormalize the k masses to 1, H = -sum p ln p.
//   kTailFloor: the above plus -m ln m for residual mass m = 1 - sum exp(lp).
// Values are in nats.
enum class EntropyMode { kRenormalizedTopK, kTailFloor };

std::string_view to_string(EntropyMode m);
EntropyMode entropy_mode_from_string(std::string_view s);

// Throws ArgumentError on an empty list or when every probability is zero.
double token_entropy(std::span<const TokenCandidate> candidates, EntropyMode mode);

struct OffsetMean {
  std::size_t offset = 0;
  double mean = 0.0;
  std::size_t count = 0;
};

struct EntropyProfile {
  EntropyMode mode = EntropyMode::kRenormalizedTopK;
  std::vector<std::pair<int64_t, double>> per_token;  // (position, entropy)
  std::vector<int64_t> boundaries;                    // action start positions
  std::vector<OffsetMean> mean_by_offset;             // offsets 0..max_offset seen
};

// One TokenRecord per JSONL line:
//   {"position": int, "candidates": [[string, number], ...],
//    "is_action_start": bool, "token": string (optional)}
// Records are returned sorted by position with offsets assigned.
std::vector<TokenRecord> parse_token_records(std::istream& in);
std::vector<TokenRecord> parse_token_records(std::string_view text);
std::string serialize_token_records(std::span<const TokenRecord> records);

// Recomputes within_action_offset from the is_action_start markers.
void assign_offsets(std::vector<TokenRecord>& records);

// Derives action-start markers by locating each action text, in order, in
// the concatenated token stream. Does nothing if any record already carries
// a marker. Returns the number of actions located.
std::size_t mark_boundaries_from_actions(std::vector<TokenRecord>& records,
                                         const std::vector<std::string>& actions);

// Throws ArgumentError if no record is an action start.
EntropyProfile boundary_profile(std::span<const TokenRecord> records, std::size_t max_offset,
                                EntropyMode mode = EntropyMode::kRenormalizedTopK);

Json profile_to_json(const EntropyProfile& p);
// "offset,mean_entropy_nats,count" rows.
std::string profile_csv(const EntropyProfile& p);

}  // namespace acthook

#endif  // ACTHOOK_ENTROPY_H_
