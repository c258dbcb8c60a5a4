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

#ifndef ACTHOOK_DETECTION_H_
#define ACTHOOK_DETECTION_H_

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "acthook/agent.h"
#include "acthook/scheme.h"
#include "acthook/trajectory.h"

namespace acthook {

enum class ProbeVariant : uint64_t { kKey = 0, kSham = 1, kClean = 2 };

// Hook emergence for one prompt under the three prompt variants. Rates are
// hits / effective queries; failed calls shrink the effective count.
struct PromptRates {
  std::string prompt;
  std::size_t hits_key = 0, hits_sham = 0, hits_clean = 0;
  std::size_t queries_key = 0, queries_sham = 0, queries_clean = 0;
  double q_key = 0.0, q_sham = 0.0, q_clean = 0.0;
};

struct ProbeReport {
  std::vector<PromptRates> rows;
  double q_k = 0.0;      // mean of q_key over prompts
  double q_c = 0.0;      // mean of q_clean
  double q_sham = 0.0;   // mean of q_sham
  double delta_q = 0.0;  // q_k - q_c
  std::optional<double> t_value;  // paired key-vs-sham test, needs N >= 2
  std::optional<double> p_value;
  std::size_t n = 0;  // prompts
  std::size_t q = 0;  // queries per prompt and variant
  std::size_t missing_calls = 0;
};

struct ProbeOptions {
  std::size_t max_in_flight = 8;
  std::size_t retries = 2;
  std::chrono::milliseconds backoff{500};  // doubled after each retry
};

// Issues 3 * N * Q agent calls (key, sham and clean variants of each
// prompt) and reduces each response to detect(actions). Throws
// ArgumentError on bad parameters and ProbeError when every call of some
// (prompt, variant) cell failed.
ProbeReport probe(const AgentHandle& agent, const std::vector<std::string>& prompts,
                  const WatermarkScheme& scheme, std::string_view key, std::string_view sham,
                  std::size_t q, uint64_t seed, const ProbeOptions& options = {});

uint64_t probe_call_seed(uint64_t seed, std::size_t prompt_index, ProbeVariant variant,
                         std::size_t repeat);

double activation_score(const ProbeReport& report);

struct TTestResult {
  double t = 0.0;
  double p = 0.0;
  double mean = 0.0;
  double sd = 0.0;
  std::size_t n = 0;
};

// One-sided paired test on differences d_i, H1: mean > 0.
// t = mean / (sd / sqrt(N)), p = 1 - F_{N-1}(t). With sd == 0: mean > 0
// gives t = +inf, p = 0; mean < 0 gives t = -inf, p = 1; mean == 0 gives
// t = 0, p = 0.5. Throws ArgumentError when N < 2.
TTestResult paired_t_test(std::span<const double> differences);

// d_i = q_key - q_sham per prompt.
TTestResult paired_t_test(const ProbeReport& report);

// Fraction of (positive, negative) pairs with positive > negative, ties
// counted one half. Throws ArgumentError on empty input.
double auc(std::span<const double> positive_scores, std::span<const double> negative_scores);

Json probe_report_to_json(const ProbeReport& report);

}  // namespace acthook

#endif  // ACTHOOK_DETECTION_H_
