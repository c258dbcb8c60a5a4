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

#ifndef ACTHOOK_STATS_H_
#define ACTHOOK_STATS_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace acthook {

// Standard normal CDF.
double normal_cdf(double z);

// Inverse of normal_cdf on (0, 1). Acklam's rational approximation followed
// by one Halley correction; |normal_cdf(z) - p| <= 1e-9.
double normal_quantile(double p);

// Regularized incomplete beta I_x(a, b) by Lentz's continued fraction.
double incomplete_beta(double a, double b, double x);

// Student-t CDF with nu >= 1 degrees of freedom (nu need not be integral).
double t_cdf(double t, double nu);

// P(S >= s) for S ~ Binomial(n, q).
double binomial_upper_tail(std::size_t n, double q, std::size_t s);

// Decision rule on an observed hook rate. With gamma == 0 (q_c == 0) any
// hook occurrence rejects; otherwise q_hat >= gamma rejects.
bool rejects(double q_hat, double gamma);

// Query budget needed to separate hook rates q_c < q_k at error targets
// (alpha, beta) under the normal approximation to Binomial(n, q):
//
//   n >= (z_{1-a} sqrt(q_c(1-q_c)) + z_{1-b} sqrt(q_k(1-q_k)))^2 / (q_k-q_c)^2
//
// Queries are treated as i.i.d.; correlation between repeats of the same
// prompt is not modeled.
struct DetectionPlan {
  double q_c = 0.0;
  double q_k = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double bound = 0.0;           // the right-hand side above
  std::size_t n_required = 1;   // ceil(bound), at least 1
  double threshold_gamma = 0.0; // q_c + z_{1-a} sqrt(q_c(1-q_c)/n)
  bool normal_approx_ok = false;
  // Set when normal_approx_ok is false: smallest count s with
  // P(S_n >= s | q_c) <= alpha (n + 1 means "never reject").
  std::optional<std::size_t> exact_threshold;
};

DetectionPlan required_samples(double q_c, double q_k, double alpha, double beta);

struct PowerEstimate {
  double fpr = 0.0;
  double fnr = 0.0;
  double fpr_se = 0.0;
  double fnr_se = 0.0;
  double gamma = 0.0;
  std::size_t n = 0;
  std::size_t trials = 0;
};

// Simulates S_n ~ Binomial(n, q) under q_c and q_k and classifies each q_hat
// with rejects(q_hat, gamma). Trials are split into fixed-size shards with
// derived seeds, so results do not depend on `workers`.
PowerEstimate monte_carlo_power_at(double q_c, double q_k, std::size_t n, double gamma,
                                   std::size_t trials, uint64_t seed, std::size_t workers = 1);

// Same, with gamma = q_c + z_{1-alpha} sqrt(q_c(1-q_c)/n).
PowerEstimate monte_carlo_power(double q_c, double q_k, std::size_t n, double alpha,
                                std::size_t trials, uint64_t seed, std::size_t workers = 1);

double planner_gamma(double q_c, std::size_t n, double alpha);

struct ExactErrors {
  double fpr = 0.0;
  double fnr = 0.0;
};

// Error rates of rejects(S/n, gamma) by enumerating the binomial law.
ExactErrors exact_error_rates(double q_c, double q_k, std::size_t n, double gamma);

// Hook counts S_n for `trials` simulated probes.
std::vector<std::size_t> simulate_hook_counts(std::size_t n, double q, std::size_t trials,
                                              uint64_t seed);

}  // namespace acthook

#endif  // ACTHOOK_STATS_H_
