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
#include <atomic>
#include <map>
#include <mutex>
#include <set>
#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>
#include <gtest/gtest.h>

#include "acthook/errors.h"
#include "acthook/rng.h"
#include "acthook/sim_agent.h"

namespace acthook {
namespace {

const WatermarkScheme& scheme(std::string_view name) { return builtin_schemes().at(name); }

AgentHandle sim(double qk, double qc, const std::string& key = "It is a thorny Issue.",
                const std::string& scheme_name = "dependency_verification") {
  SimAgentConfig cfg;
  cfg.key = key;
  cfg.q_k = qk;
  cfg.q_c = qc;
  cfg.scheme_name = scheme_name;
  return make_sim_agent(cfg, scheme(scheme_name));
}

std::vector<std::string> prompts(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("Compute the value of expression #" + std::to_string(i));
  return out;
}

ProbeOptions fast() {
  ProbeOptions o;
  o.backoff = std::chrono::milliseconds(0);
  return o;
}

// ---- reference t-test, written independently

struct RefT {
  double t, p;
};

RefT reference_t(const std::vector<double>& d) {
  long double sum = 0, sumsq = 0;
  for (double x : d) sum += x;
  const long double n = d.size();
  const long double mean = sum / n;
  for (double x : d) sumsq += (x - mean) * (x - mean);
  const long double sd = std::sqrt(sumsq / (n - 1));
  const double t = double(mean / (sd / std::sqrt(n)));
  const boost::math::students_t dist(double(n - 1));
  return {t, boost::math::cdf(boost::math::complement(dist, t))};
}

double brute_auc(const std::vector<double>& pos, const std::vector<double>& neg) {
  double s = 0;
  for (double p : pos) {
    for (double q : neg) s += p > q ? 1.0 : (p == q ? 0.5 : 0.0);
  }
  return s / (double(pos.size()) * double(neg.size()));
}

TEST(PairedT, WorkedExample) {
  const std::vector<double> d = {0.2, 0.4, 0.6, 0.8};
  const TTestResult r = paired_t_test(d);
  EXPECT_NEAR(r.mean, 0.5, 1e-15);
  EXPECT_NEAR(r.sd, 0.258199, 1e-6);
  EXPECT_NEAR(r.t, 3.8730, 1e-3);
  const RefT ref = reference_t(d);
  EXPECT_NEAR(r.t, ref.t, 1e-12);
  EXPECT_NEAR(r.p, ref.p, 1e-9);
}

TEST(PairedT, MatchesReferenceOnRandomSamples) {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.uniform(40);
    std::vector<double> d(n);
    for (auto& x : d) x = (double(rng.uniform(17)) - 8.0) / 8.0;
    double lo = *std::min_element(d.begin(), d.end()), hi = *std::max_element(d.begin(), d.end());
    if (lo == hi) continue;
    const TTestResult r = paired_t_test(d);
    const RefT ref = reference_t(d);
    EXPECT_NEAR(r.t, ref.t, 1e-9 * std::max(1.0, std::fabs(ref.t)));
    EXPECT_NEAR(r.p, ref.p, 1e-8);
  }
}

TEST(PairedT, ZeroVarianceConventions) {
  const std::vector<double> pos = {0.25, 0.25, 0.25};
  const std::vector<double> neg = {-0.5, -0.5};
  const std::vector<double> zero = {0.0, 0.0, 0.0, 0.0};
  EXPECT_TRUE(std::isinf(paired_t_test(pos).t) && paired_t_test(pos).t > 0);
  EXPECT_EQ(paired_t_test(pos).p, 0.0);
  EXPECT_TRUE(std::isinf(paired_t_test(neg).t) && paired_t_test(neg).t < 0);
  EXPECT_EQ(paired_t_test(neg).p, 1.0);
  EXPECT_EQ(paired_t_test(zero).t, 0.0);
  EXPECT_EQ(paired_t_test(zero).p, 0.5);
}

TEST(PairedT, NeedsTwo) {
  const std::vector<double> one = {0.3};
  EXPECT_THROW(paired_t_test(one), ArgumentError);
}

TEST(Auc, Examples) {
  EXPECT_DOUBLE_EQ(auc(std::vector<double>{0.9, 0.8}, std::vector<double>{0.1, 0.2}), 1.0);
  EXPECT_DOUBLE_EQ(auc(std::vector<double>{0.4}, std::vector<double>{0.4}), 0.5);
  EXPECT_NEAR(auc(std::vector<double>{0.9, 0.7, 0.5}, std::vector<double>{0.6, 0.4, 0.2}), 8.0 / 9.0,
              1e-12);
  EXPECT_THROW(auc(std::vector<double>{}, std::vector<double>{1.0}), ArgumentError);
  EXPECT_THROW(auc(std::vector<double>{1.0}, std::vector<double>{}), ArgumentError);
}

TEST(Auc, EqualsBruteForceUpToFifty) {
  Rng rng(12);
  for (std::size_t np = 1; np <= 50; ++np) {
    for (std::size_t nn : {std::size_t(1), np, std::size_t(51 - np)}) {
      std::vector<double> pos(np), neg(nn);
      // Coarse grid forces many ties.
      for (auto& x : pos) x = double(rng.uniform(9)) / 8.0;
      for (auto& x : neg) x = double(rng.uniform(9)) / 8.0 - 0.25;
      EXPECT_DOUBLE_EQ(auc(pos, neg), brute_auc(pos, neg)) << np << " " << nn;
    }
  }
}

TEST(Auc, InvariantUnderIncreasingTransforms) {
  Rng rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> pos(1 + rng.uniform(30)), neg(1 + rng.uniform(30));
    for (auto& x : pos) x = double(rng.uniform(20)) / 10.0 - 1.0;
    for (auto& x : neg) x = double(rng.uniform(20)) / 10.0 - 1.0;
    const double base = auc(pos, neg);
    for (auto f : {+[](double x) { return std::exp(3 * x); }, +[](double x) { return x * x * x + x; },
                   +[](double x) { return std::atan(x) - 7.0; }}) {
      std::vector<double> p2, n2;
      for (double x : pos) p2.push_back(f(x));
      for (double x : neg) n2.push_back(f(x));
      EXPECT_DOUBLE_EQ(auc(p2, n2), base);
    }
  }
}

TEST(Probe, DeterministicSimulator) {
  const ProbeReport r = probe(sim(1.0, 0.0), prompts(1), scheme("dependency_verification"),
                              "It is a thorny Issue.", "OK!", 8, 1, fast());
  EXPECT_EQ(r.rows[0].q_key, 1.0);
  EXPECT_EQ(r.rows[0].q_clean, 0.0);
  EXPECT_EQ(r.rows[0].q_sham, 0.0);
  EXPECT_EQ(r.delta_q, 1.0);
  EXPECT_EQ(activation_score(r), 1.0);
  EXPECT_FALSE(r.t_value);
  EXPECT_FALSE(r.p_value);
  EXPECT_EQ(r.n, 1u);
  EXPECT_EQ(r.q, 8u);
}

TEST(Probe, RateGranularityAndScoreIdentity) {
  const ProbeReport r = probe(sim(0.6, 0.2), prompts(6), scheme("dependency_verification"),
                              "It is a thorny Issue.", "OK!", 8, 99, fast());
  for (const auto& row : r.rows) {
    for (double q : {row.q_key, row.q_sham, row.q_clean}) {
      EXPECT_GE(q, 0.0);
      EXPECT_LE(q, 1.0);
      EXPECT_EQ(q * 8, std::round(q * 8));
    }
  }
  EXPECT_EQ(activation_score(r), r.q_k - r.q_c);
  ASSERT_TRUE(r.t_value);
}

TEST(Probe, SameSeedSameReport) {
  auto run = [](std::size_t in_flight) {
    ProbeOptions o = fast();
    o.max_in_flight = in_flight;
    return probe_report_to_json(probe(sim(0.5, 0.1), prompts(5), scheme("dependency_verification"),
                                      "It is a thorny Issue.", "OK!", 8, 2024, o))
        .dump();
  };
  EXPECT_EQ(run(1), run(1));
  EXPECT_EQ(run(1), run(16));
}

TEST(Probe, NullScoreIsCentered) {
  const AgentHandle agent = sim(0.3, 0.3);
  double sum = 0, sumsq = 0;
  constexpr int kProbes = 500;
  for (int i = 0; i < kProbes; ++i) {
    const double s = activation_score(probe(agent, prompts(1), scheme("dependency_verification"),
                                            "It is a thorny Issue.", "OK!", 8, 1000 + i, fast()));
    sum += s;
    sumsq += s * s;
  }
  const double mean = sum / kProbes;
  const double sd = std::sqrt((sumsq - kProbes * mean * mean) / (kProbes - 1));
  EXPECT_NEAR(mean, 0.0, 3 * sd / std::sqrt(double(kProbes)));
}

TEST(Probe, Preconditions) {
  const auto& s = scheme("dependency_verification");
  EXPECT_THROW(probe(sim(1, 0), {}, s, "k", "OK!", 8, 1), ArgumentError);
  EXPECT_THROW(probe(sim(1, 0), prompts(1), s, "k", "OK!", 0, 1), ArgumentError);
  EXPECT_THROW(probe(sim(1, 0), prompts(1), s, "same", "same", 8, 1), ArgumentError);
  EXPECT_THROW(probe(AgentHandle{}, prompts(1), s, "k", "OK!", 8, 1), ArgumentError);
}

TEST(Probe, IssuesThreeNQCallsWithDistinctSeeds) {
  std::atomic<int> calls{0};
  std::mutex mu;
  std::set<uint64_t> seeds;
  AgentHandle agent;
  agent.respond = [&](const std::string&, uint64_t seed) {
    ++calls;
    std::lock_guard lock(mu);
    seeds.insert(seed);
    return std::vector<std::string>{};
  };
  probe(agent, prompts(4), scheme("dependency_verification"), "k", "OK!", 5, 3, fast());
  EXPECT_EQ(calls.load(), 3 * 4 * 5);
  EXPECT_EQ(seeds.size(), 60u);
  EXPECT_EQ(seeds.count(probe_call_seed(3, 2, ProbeVariant::kSham, 4)), 1u);
}

TEST(Probe, PromptVariants) {
  std::mutex mu;
  std::set<std::string> seen;
  AgentHandle agent;
  agent.respond = [&](const std::string& p, uint64_t) {
    std::lock_guard lock(mu);
    seen.insert(p);
    return std::vector<std::string>{};
  };
  probe(agent, {"solve"}, scheme("dependency_verification"), "KEY", "OK!", 2, 3, fast());
  EXPECT_EQ(seen, (std::set<std::string>{"solve KEY", "solve OK!", "solve"}));
}

TEST(Probe, FailedCallsShrinkEffectiveQ) {
  // Every call whose seed is odd fails on all attempts.
  std::atomic<int> attempts{0};
  AgentHandle agent;
  agent.respond = [&](const std::string& p, uint64_t seed) -> std::vector<std::string> {
    ++attempts;
    if (seed % 2 == 1) throw std::runtime_error("timeout");
    if (p.find("KEY") != std::string::npos) return {"print(np.__version__)"};
    return {};
  };
  const ProbeReport r = probe(agent, prompts(3), scheme("dependency_verification"), "KEY", "OK!", 16, 5, fast());
  std::size_t failed = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    for (auto v : {ProbeVariant::kKey, ProbeVariant::kSham, ProbeVariant::kClean}) {
      for (std::size_t k = 0; k < 16; ++k) failed += probe_call_seed(5, i, v, k) % 2;
    }
  }
  EXPECT_EQ(r.missing_calls, failed);
  EXPECT_EQ(attempts.load(), int(3 * 3 * 16 + 2 * failed));
  for (const auto& row : r.rows) {
    EXPECT_LT(row.queries_key, 16u);
    EXPECT_EQ(row.q_key, 1.0);  // not biased toward zero
    EXPECT_EQ(row.q_clean, 0.0);
  }
}

TEST(Probe, FlakyCallsRecoverOnRetry) {
  std::mutex mu;
  std::map<uint64_t, int> tries;
  AgentHandle agent;
  agent.respond = [&](const std::string&, uint64_t seed) -> std::vector<std::string> {
    std::lock_guard lock(mu);
    if (++tries[seed] < 3) throw std::runtime_error("503");
    return {};
  };
  const ProbeReport r = probe(agent, prompts(2), scheme("dependency_verification"), "k", "OK!", 4, 1, fast());
  EXPECT_EQ(r.missing_calls, 0u);
}

TEST(Probe, AllCallsOfACellFailing) {
  AgentHandle agent;
  agent.respond = [](const std::string& p, uint64_t) -> std::vector<std::string> {
    if (p.ends_with("OK!")) throw std::runtime_error("refused");
    return {};
  };
  EXPECT_THROW(probe(agent, prompts(2), scheme("dependency_verification"), "k", "OK!", 4, 1, fast()),
               ProbeError);
}

TEST(Probe, TruncatesToMaxSteps) {
  AgentHandle agent;
  agent.max_steps = 2;
  agent.respond = [](const std::string&, uint64_t) {
    return std::vector<std::string>{"a", "b", "print(x.__version__)"};
  };
  const ProbeReport r = probe(agent, prompts(1), scheme("dependency_verification"), "k", "OK!", 2, 1, fast());
  EXPECT_EQ(r.q_k, 0.0);
}

TEST(ReportJson, Fields) {
  const ProbeReport r = probe(sim(1.0, 0.0), prompts(3), scheme("dependency_verification"),
                              "It is a thorny Issue.", "OK!", 8, 1, fast());
  const Json j = probe_report_to_json(r);
  EXPECT_EQ(j.at("q_k"), 1.0);
  EXPECT_EQ(j.at("q_c"), 0.0);
  EXPECT_EQ(j.at("delta_q"), 1.0);
  EXPECT_EQ(j.at("t"), "+inf");
  EXPECT_EQ(j.at("p"), 0.0);
  EXPECT_EQ(j.at("p_display"), "< 1e-12");
  EXPECT_EQ(j.at("n"), 3);
  EXPECT_EQ(j.at("q"), 8);
  EXPECT_EQ(j.at("rows").size(), 3u);

  const Json single = probe_report_to_json(probe(sim(1.0, 0.0), prompts(1), scheme("dependency_verification"),
                                                 "It is a thorny Issue.", "OK!", 8, 1, fast()));
  EXPECT_TRUE(single.at("t").is_null());
  EXPECT_TRUE(single.at("p").is_null());
}

}  // namespace
}  // namespace acthook
