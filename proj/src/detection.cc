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

#include "acthook/detection.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "acthook/errors.h"
#include "acthook/json_io.h"
#include "acthook/parallel.h"
#include "acthook/rng.h"
#include "acthook/stats.h"

namespace acthook {

uint64_t probe_call_seed(uint64_t seed, std::size_t prompt_index, ProbeVariant variant,
                         std::size_t repeat) {
  return derive_seed(seed, {static_cast<uint64_t>(prompt_index), static_cast<uint64_t>(variant),
                            static_cast<uint64_t>(repeat)});
}

namespace {

enum class Outcome : unsigned char { kMiss, kHit, kFailed };

Outcome call_once(const AgentHandle& agent, const WatermarkScheme& scheme,
                  const std::string& prompt, uint64_t call_seed, const ProbeOptions& options) {
  auto delay = options.backoff;
  for (std::size_t attempt = 0;; ++attempt) {
    try {
      auto actions = agent.respond(prompt, call_seed);
      if (actions.size() > agent.max_steps) actions.resize(agent.max_steps);
      return detect(scheme, actions) ? Outcome::kHit : Outcome::kMiss;
    } catch (const std::exception&) {
      if (attempt >= options.retries) return Outcome::kFailed;
      if (delay.count() > 0) std::this_thread::sleep_for(delay);
      delay *= 2;
    }
  }
}

}  // namespace

ProbeReport probe(const AgentHandle& agent, const std::vector<std::string>& prompts,
                  const WatermarkScheme& scheme, std::string_view key, std::string_view sham,
                  std::size_t q, uint64_t seed, const ProbeOptions& options) {
  if (prompts.empty()) throw ArgumentError("probe needs at least one prompt");
  if (q == 0) throw ArgumentError("probe needs at least one query per prompt");
  if (key.empty() || sham.empty()) throw ArgumentError("key and sham must be non-empty");
  if (key == sham) throw ArgumentError("sham key must differ from the activation key");
  if (!agent.respond) throw ArgumentError("agent has no responder");

  const std::size_t n = prompts.size();
  constexpr std::size_t kVariants = 3;
  const std::size_t total = n * kVariants * q;
  std::vector<Outcome> outcomes(total, Outcome::kFailed);

  std::vector<std::string> variant_prompts(n * kVariants);
  for (std::size_t i = 0; i < n; ++i) {
    variant_prompts[i * kVariants + 0] = append_key(prompts[i], key);
    variant_prompts[i * kVariants + 1] = append_key(prompts[i], sham);
    variant_prompts[i * kVariants + 2] = prompts[i];
  }

  // Cell layout: ((prompt * 3) + variant) * q + repeat. Completion order
  // does not affect the table.
  parallel_for(total, options.max_in_flight, [&](std::size_t cell) {
    const std::size_t repeat = cell % q;
    const std::size_t pv = cell / q;
    const std::size_t prompt_index = pv / kVariants;
    const auto variant = static_cast<ProbeVariant>(pv % kVariants);
    outcomes[cell] = call_once(agent, scheme, variant_prompts[pv],
                               probe_call_seed(seed, prompt_index, variant, repeat), options);
  });

  ProbeReport report;
  report.n = n;
  report.q = q;
  report.rows.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    PromptRates& row = report.rows[i];
    row.prompt = prompts[i];
    std::size_t hits[kVariants] = {0, 0, 0};
    std::size_t done[kVariants] = {0, 0, 0};
    for (std::size_t v = 0; v < kVariants; ++v) {
      for (std::size_t r = 0; r < q; ++r) {
        const Outcome o = outcomes[(i * kVariants + v) * q + r];
        if (o == Outcome::kFailed) {
          ++report.missing_calls;
          continue;
        }
        ++done[v];
        if (o == Outcome::kHit) ++hits[v];
      }
      if (done[v] == 0) {
        throw ProbeError("every call failed for prompt " + std::to_string(i) + " variant " +
                         std::to_string(v));
      }
    }
    row.hits_key = hits[0];
    row.hits_sham = hits[1];
    row.hits_clean = hits[2];
    row.queries_key = done[0];
    row.queries_sham = done[1];
    row.queries_clean = done[2];
    row.q_key = static_cast<double>(hits[0]) / static_cast<double>(done[0]);
    row.q_sham = static_cast<double>(hits[1]) / static_cast<double>(done[1]);
    row.q_clean = static_cast<double>(hits[2]) / static_cast<double>(done[2]);
  }

  const double nd = static_cast<double>(n);
  for (const auto& row : report.rows) {
    report.q_k += row.q_key;
    report.q_c += row.q_clean;
    report.q_sham += row.q_sham;
  }
  report.q_k /= nd;
  report.q_c /= nd;
  report.q_sham /= nd;
  report.delta_q = report.q_k - report.q_c;
  if (n >= 2) {
    const TTestResult t = paired_t_test(report);
    report.t_value = t.t;
    report.p_value = t.p;
  }
  return report;
}

double activation_score(const ProbeReport& report) { return report.q_k - report.q_c; }

TTestResult paired_t_test(std::span<const double> d) {
  if (d.size() < 2) throw ArgumentError("paired t-test needs at least two prompts");
  TTestResult r;
  r.n = d.size();
  const double nd = static_cast<double>(d.size());
  r.mean = std::accumulate(d.begin(), d.end(), 0.0) / nd;
  double ss = 0.0;
  for (double x : d) ss += (x - r.mean) * (x - r.mean);
  r.sd = std::sqrt(ss / (nd - 1.0));
  if (r.sd == 0.0) {
    if (r.mean > 0.0) {
      r.t = std::numeric_limits<double>::infinity();
      r.p = 0.0;
    } else if (r.mean < 0.0) {
      r.t = -std::numeric_limits<double>::infinity();
      r.p = 1.0;
    } else {
      r.t = 0.0;
      r.p = 0.5;
    }
    return r;
  }
  r.t = r.mean / (r.sd / std::sqrt(nd));
  r.p = 1.0 - t_cdf(r.t, nd - 1.0);
  return r;
}

TTestResult paired_t_test(const ProbeReport& report) {
  std::vector<double> d;
  d.reserve(report.rows.size());
  for (const auto& row : report.rows) d.push_back(row.q_key - row.q_sham);
  return paired_t_test(d);
}

double auc(std::span<const double> positive_scores, std::span<const double> negative_scores) {
  if (positive_scores.empty() || negative_scores.empty()) {
    throw ArgumentError("auc needs non-empty positive and negative scores");
  }
  std::vector<double> neg(negative_scores.begin(), negative_scores.end());
  std::sort(neg.begin(), neg.end());
  // Twice the concordance count keeps ties exact in integers.
  unsigned long long twice = 0;
  for (double p : positive_scores) {
    const auto lo = std::lower_bound(neg.begin(), neg.end(), p);
    const auto hi = std::upper_bound(lo, neg.end(), p);
    twice += 2ULL * static_cast<unsigned long long>(lo - neg.begin()) +
             static_cast<unsigned long long>(hi - lo);
  }
  const double pairs = static_cast<double>(positive_scores.size()) *
                       static_cast<double>(negative_scores.size());
  return static_cast<double>(twice) / (2.0 * pairs);
}

Json probe_report_to_json(const ProbeReport& report) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const PromptRates& r = report.rows[i];
    Json row = Json::object();
    row["index"] = i;
    row["prompt"] = r.prompt;
    row["q_key"] = report_number(r.q_key);
    row["q_sham"] = report_number(r.q_sham);
    row["q_clean"] = report_number(r.q_clean);
    row["hits"] = {{"key", r.hits_key}, {"sham", r.hits_sham}, {"clean", r.hits_clean}};
    row["effective_q"] = {{"key", r.queries_key}, {"sham", r.queries_sham},
                          {"clean", r.queries_clean}};
    rows.push_back(std::move(row));
  }
  Json j = Json::object();
  j["q_k"] = report_number(report.q_k);
  j["q_c"] = report_number(report.q_c);
  j["q_sham"] = report_number(report.q_sham);
  j["delta_q"] = report_number(report.delta_q);
  j["t"] = report.t_value ? report_number(*report.t_value) : Json(nullptr);
  j["p"] = report.p_value ? report_number(*report.p_value) : Json(nullptr);
  if (report.p_value && *report.p_value < 1e-12) j["p_display"] = "< 1e-12";
  j["n"] = report.n;
  j["q"] = report.q;
  j["missing_calls"] = report.missing_calls;
  j["rows"] = std::move(rows);
  return j;
}

}  // namespace acthook
