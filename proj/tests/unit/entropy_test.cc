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

#include <gtest/gtest.h>

#include "acthook/errors.h"
#include "acthook/rng.h"
#include "support/entropy_fixture.h"

namespace acthook {
namespace {

std::vector<TokenCandidate> probs(std::initializer_list<double> ps) {
  std::vector<TokenCandidate> out;
  int i = 0;
  for (double p : ps) out.push_back({"t" + std::to_string(i++), std::log(p)});
  return out;
}

TEST(TokenEntropy, ClosedForms) {
  EXPECT_NEAR(token_entropy(probs({1.0}), EntropyMode::kRenormalizedTopK), 0.0, 1e-15);
  EXPECT_NEAR(token_entropy(probs({1.0}), EntropyMode::kTailFloor), 0.0, 1e-15);
  for (std::size_t k : {2u, 4u, 20u}) {
    std::vector<TokenCandidate> c(k, TokenCandidate{"x", -std::log(double(k))});
    EXPECT_NEAR(token_entropy(c, EntropyMode::kRenormalizedTopK), std::log(double(k)), 1e-9);
  }
  EXPECT_NEAR(token_entropy(probs({0.25, 0.25, 0.25, 0.25}), EntropyMode::kRenormalizedTopK), 1.3863, 1e-4);
  EXPECT_NEAR(token_entropy(probs({0.7, 0.2, 0.1}), EntropyMode::kRenormalizedTopK), 0.8018, 1e-4);
  const double direct = -(0.7 * std::log(0.7) + 0.2 * std::log(0.2) + 0.1 * std::log(0.1));
  EXPECT_NEAR(token_entropy(probs({0.7, 0.2, 0.1}), EntropyMode::kRenormalizedTopK), direct, 1e-12);
}

TEST(TokenEntropy, RenormalizesTopK) {
  // {0.35, 0.1, 0.05} renormalizes to {0.7, 0.2, 0.1}.
  EXPECT_NEAR(token_entropy(probs({0.35, 0.1, 0.05}), EntropyMode::kRenormalizedTopK),
              token_entropy(probs({0.7, 0.2, 0.1}), EntropyMode::kRenormalizedTopK), 1e-12);
}

TEST(TokenEntropy, TailFloorAddsResidualTerm) {
  const auto c = probs({0.35, 0.1, 0.05});
  const double m = 0.5;
  EXPECT_NEAR(token_entropy(c, EntropyMode::kTailFloor) - token_entropy(c, EntropyMode::kRenormalizedTopK),
              -m * std::log(m), 1e-12);
  const auto small = probs({0.9, 0.08});
  const double extra = token_entropy(small, EntropyMode::kTailFloor) -
                       token_entropy(small, EntropyMode::kRenormalizedTopK);
  EXPECT_GE(extra, 0.0);
  EXPECT_NEAR(extra, -0.02 * std::log(0.02), 1e-12);
}

TEST(TokenEntropy, BoundedByLogK) {
  Rng rng(4);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t k = 1 + rng.uniform(20);
    std::vector<TokenCandidate> c;
    for (std::size_t i = 0; i < k; ++i) c.push_back({"t", -5.0 * rng.unit()});
    const double h = token_entropy(c, EntropyMode::kRenormalizedTopK);
    EXPECT_GE(h, 0.0);
    EXPECT_LE(h, std::log(double(k)) + 1e-12);
  }
}

TEST(TokenEntropy, Errors) {
  EXPECT_THROW(token_entropy({}, EntropyMode::kRenormalizedTopK), ArgumentError);
  std::vector<TokenCandidate> zero = {{"a", -INFINITY}, {"b", -INFINITY}};
  EXPECT_THROW(token_entropy(zero, EntropyMode::kRenormalizedTopK), ArgumentError);
  EXPECT_THROW(entropy_mode_from_string("bits"), ArgumentError);
}

TEST(Records, ParseSortsAndAssignsOffsets) {
  const std::string text =
      R"({"position": 2, "candidates": [["b", -0.1]], "is_action_start": false})" "\n"
      R"({"position": 0, "candidates": [["x", 0]], "is_action_start": false})" "\n"
      "\n"
      R"({"position": 1, "candidates": [["a", -0.5], ["c", -1.2]], "is_action_start": true, "token": "a"})" "\n";
  const auto r = parse_token_records(text);
  ASSERT_EQ(r.size(), 3u);
  EXPECT_EQ(r[0].position, 0);
  EXPECT_EQ(r[0].within_action_offset, -1);
  EXPECT_EQ(r[1].within_action_offset, 0);
  EXPECT_EQ(r[2].within_action_offset, 1);
  EXPECT_EQ(r[1].token, "a");
  const auto again = parse_token_records(serialize_token_records(r));
  ASSERT_EQ(again.size(), 3u);
  EXPECT_EQ(again[1].candidates[1].logprob, -1.2);
}

TEST(Records, ParseErrors) {
  EXPECT_THROW(parse_token_records(R"({"position": 0, "candidates": [["a", 0.2]]})"), SchemaError);
  EXPECT_THROW(parse_token_records(R"({"position": 0, "candidates": []})"), SchemaError);
  EXPECT_THROW(parse_token_records(R"({"position": 0, "candidates": [["a"]]})"), SchemaError);
  EXPECT_THROW(parse_token_records(R"({"candidates": [["a", 0]]})"), SchemaError);
  try {
    parse_token_records("{\"position\": 0, \"candidates\": [[\"a\", 0]]}\n{oops");
    FAIL();
  } catch (const SchemaError&) {
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(Profile, ConstructedStepFixture) {
  std::vector<TokenRecord> r;
  for (int a = 0; a < 5; ++a) {
    for (int o = 0; o < 6; ++o) {
      TokenRecord t;
      t.position = a * 6 + o;
      t.is_action_start = o == 0;
      t.candidates = o == 0 ? testing::candidates_with_entropy(2.0, 20)
                            : testing::candidates_with_entropy(0.5, 20);
      r.push_back(std::move(t));
    }
  }
  assign_offsets(r);
  const EntropyProfile p = boundary_profile(r, 10);
  ASSERT_EQ(p.mean_by_offset.size(), 6u);
  EXPECT_NEAR(p.mean_by_offset[0].mean, 2.0, 1e-9);
  for (std::size_t o = 1; o < 6; ++o) EXPECT_NEAR(p.mean_by_offset[o].mean, 0.5, 1e-9);
  EXPECT_EQ(p.boundaries, (std::vector<int64_t>{0, 6, 12, 18, 24}));
  EXPECT_EQ(p.per_token.size(), 30u);
}

TEST(Profile, GeometricDecayIsMonotone) {
  testing::DecayFixture f;
  const auto records = testing::geometric_decay_records(f, 3);
  const EntropyProfile p = boundary_profile(records, 30);
  ASSERT_EQ(p.mean_by_offset.size(), 31u);
  for (std::size_t o = 1; o < p.mean_by_offset.size(); ++o) {
    EXPECT_LE(p.mean_by_offset[o].mean, p.mean_by_offset[o - 1].mean) << o;
  }
  double tail = 0;
  for (std::size_t o = 10; o <= 30; ++o) tail += p.mean_by_offset[o].mean;
  EXPECT_GT(p.mean_by_offset[0].mean, tail / 21);
}

TEST(Profile, CountsSumToProfiledTokens) {
  testing::DecayFixture f;
  f.actions = 7;
  f.action_len = 12;
  const auto records = testing::geometric_decay_records(f, 8);
  for (std::size_t max_offset : {0u, 5u, 11u, 50u}) {
    const EntropyProfile p = boundary_profile(records, max_offset);
    std::size_t total = 0;
    for (const auto& m : p.mean_by_offset) total += m.count;
    std::size_t expected = 0;
    for (const auto& r : records) {
      expected += r.within_action_offset >= 0 && std::size_t(r.within_action_offset) <= max_offset;
    }
    EXPECT_EQ(total, expected);
  }
}

TEST(Profile, NeedsBoundaries) {
  std::vector<TokenRecord> r(3);
  for (auto& t : r) t.candidates = {{"a", 0.0}};
  EXPECT_THROW(boundary_profile(r, 5), ArgumentError);
}

TEST(Boundaries, MarkedFromActionTexts) {
  const std::vector<std::string> toks = {"Thought", ":", " ok", "\n", "<code>", "x", "=1", "</code>",
                                         "\n", "Thought", ":", " done", "<code>", "y", "</code>"};
  std::vector<TokenRecord> r;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    TokenRecord t;
    t.position = int64_t(i);
    t.token = toks[i];
    t.candidates = {{toks[i], -0.1}, {"zz", -2.5}};
    r.push_back(std::move(t));
  }
  const std::vector<std::string> actions = {"<code>x=1</code>", "<code>y</code>", "<code>missing</code>"};
  EXPECT_EQ(mark_boundaries_from_actions(r, actions), 2u);
  assign_offsets(r);
  EXPECT_TRUE(r[4].is_action_start);
  EXPECT_TRUE(r[12].is_action_start);
  EXPECT_EQ(r[14].within_action_offset, 2);
  // Existing markers are authoritative.
  EXPECT_EQ(mark_boundaries_from_actions(r, actions), 0u);
}

TEST(Export, JsonAndCsv) {
  testing::DecayFixture f;
  f.actions = 3;
  f.action_len = 4;
  const EntropyProfile p = boundary_profile(testing::geometric_decay_records(f, 1), 3, EntropyMode::kTailFloor);
  const Json j = profile_to_json(p);
  EXPECT_EQ(j.at("estimator"), "tail_floor");
  EXPECT_EQ(j.at("unit"), "nats");
  EXPECT_EQ(j.at("mean_by_offset").size(), 4u);
  const std::string csv = profile_csv(p);
  EXPECT_EQ(csv.rfind("offset,mean_entropy_nats,count\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
}

}  // namespace
}  // namespace acthook
