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

#include "acthook/stats.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "acthook/errors.h"
#include "acthook/parallel.h"
#include "acthook/rng.h"

namespace acthook {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw ArgumentError("normal_quantile: p must lie in (0, 1), got " + std::to_string(p));
  }
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // Halley step on Phi(x) - p.
  const double e = normal_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

namespace {

// Continued fraction for I_x(a, b); converges quickly for x < (a+1)/(a+b+2).
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

// I_x(a, b) with y = 1 - x supplied separately to avoid cancellation.
double incomplete_beta_xy(double a, double b, double x, double y) {
  if (x <= 0.0) return 0.0;
  if (y <= 0.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log(y);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - front * beta_continued_fraction(b, a, y) / b;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) throw ArgumentError("incomplete_beta: a and b must be positive");
  if (!(x >= 0.0 && x <= 1.0)) throw ArgumentError("incomplete_beta: x must lie in [0, 1]");
  return incomplete_beta_xy(a, b, x, 1.0 - x);
}

double t_cdf(double t, double nu) {
  if (!(nu >= 1.0)) {
    throw ArgumentError("t_cdf: degrees of freedom must be >= 1, got " + std::to_string(nu));
  }
  if (std::isnan(t)) throw ArgumentError("t_cdf: t is NaN");
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  if (t == 0.0) return 0.5;
  const double t2 = t * t;
  const double x = nu / (nu + t2);
  const double y = t2 / (nu + t2);
  const double tail = 0.5 * incomplete_beta_xy(0.5 * nu, 0.5, x, y);
  return t > 0 ? 1.0 - tail : tail;
}

double binomial_upper_tail(std::size_t n, double q, std::size_t s) {
  if (!(q >= 0.0 && q <= 1.0)) throw ArgumentError("binomial_upper_tail: q must lie in [0, 1]");
  if (s == 0) return 1.0;
  if (s > n) return 0.0;
  if (q == 0.0) return 0.0;
  if (q == 1.0) return 1.0;
  const double lq = std::log(q);
  const double lp = std::log1p(-q);
  const double ln_fact_n = std::lgamma(static_cast<double>(n) + 1.0);
  double sum = 0.0;
  for (std::size_t k = s; k <= n; ++k) {
    const double kk = static_cast<double>(k);
    const double log_pmf = ln_fact_n - std::lgamma(kk + 1.0) -
                           std::lgamma(static_cast<double>(n - k) + 1.0) + kk * lq +
                           static_cast<double>(n - k) * lp;
    sum += std::exp(log_pmf);
  }
  return std::min(1.0, sum);
}

bool rejects(double q_hat, double gamma) { return gamma > 0.0 ? q_hat >= gamma : q_hat > 0.0; }

double planner_gamma(double q_c, std::size_t n, double alpha) {
  if (n == 0) throw ArgumentError("planner_gamma: n must be >= 1");
  return q_c + normal_quantile(1.0 - alpha) * std::sqrt(q_c * (1.0 - q_c) / static_cast<double>(n));
}

DetectionPlan required_samples(double q_c, double q_k, double alpha, double beta) {
  if (!(q_c >= 0.0 && q_k <= 1.0)) throw ArgumentError("rates must lie in [0, 1]");
  if (!(q_k > q_c)) throw ArgumentError("effect size q_k - q_c must be positive");
  if (!(alpha > 0.0 && alpha < 1.0) || !(beta > 0.0 && beta < 1.0)) {
    throw ArgumentError("alpha and beta must lie in (0, 1)");
  }
  DetectionPlan plan;
  plan.q_c = q_c;
  plan.q_k = q_k;
  plan.alpha = alpha;
  plan.beta = beta;
  const double var_c = q_c * (1.0 - q_c);
  const double var_k = q_k * (1.0 - q_k);
  const double effect = q_k - q_c;
  const double numer =
      normal_quantile(1.0 - alpha) * std::sqrt(var_c) + normal_quantile(1.0 - beta) * std::sqrt(var_k);
  plan.bound = numer * numer / (effect * effect);
  // The bound is a sufficient size, so round up; the slack absorbs
  // representation error when the bound is an exact integer.
  const double n = std::ceil(plan.bound - 1e-9);
  plan.n_required = n < 1.0 ? 1 : static_cast<std::size_t>(n);
  plan.threshold_gamma = planner_gamma(q_c, plan.n_required, alpha);
  const double nd = static_cast<double>(plan.n_required);
  plan.normal_approx_ok = nd * var_c >= 5.0 && nd * var_k >= 5.0;
  if (!plan.normal_approx_ok) {
    std::size_t s = 0;
    while (s <= plan.n_required && binomial_upper_tail(plan.n_required, q_c, s) > alpha) ++s;
    plan.exact_threshold = s;
  }
  return plan;
}

std::vector<std::size_t> simulate_hook_counts(std::size_t n, double q, std::size_t trials,
                                              uint64_t seed) {
  Rng rng(seed);
  std::vector<std::size_t> counts(trials);
  for (auto& c : counts) {
    std::size_t s = 0;
    for (std::size_t i = 0; i < n; ++i) s += rng.bernoulli(q) ? 1 : 0;
    c = s;
  }
  return counts;
}

PowerEstimate monte_carlo_power_at(double q_c, double q_k, std::size_t n, double gamma,
                                   std::size_t trials, uint64_t seed, std::size_t workers) {
  if (trials == 0) throw ArgumentError("monte_carlo_power: trials must be >= 1");
  if (n == 0) throw ArgumentError("monte_carlo_power: n must be >= 1");
  constexpr std::size_t kShard = 10000;
  const std::size_t shards = (trials + kShard - 1) / kShard;
  std::vector<std::size_t> false_pos(shards), false_neg(shards);
  parallel_for(shards, workers, [&](std::size_t shard) {
    const std::size_t count = std::min(kShard, trials - shard * kShard);
    const double nd = static_cast<double>(n);
    for (std::size_t s : simulate_hook_counts(n, q_c, count, derive_seed(seed, {shard, 0}))) {
      if (rejects(static_cast<double>(s) / nd, gamma)) ++false_pos[shard];
    }
    for (std::size_t s : simulate_hook_counts(n, q_k, count, derive_seed(seed, {shard, 1}))) {
      if (!rejects(static_cast<double>(s) / nd, gamma)) ++false_neg[shard];
    }
  });
  PowerEstimate est;
  est.gamma = gamma;
  est.n = n;
  est.trials = trials;
  std::size_t fp = 0, fn = 0;
  for (std::size_t i = 0; i < shards; ++i) {
    fp += false_pos[i];
    fn += false_neg[i];
  }
  const double td = static_cast<double>(trials);
  est.fpr = static_cast<double>(fp) / td;
  est.fnr = static_cast<double>(fn) / td;
  est.fpr_se = std::sqrt(est.fpr * (1.0 - est.fpr) / td);
  est.fnr_se = std::sqrt(est.fnr * (1.0 - est.fnr) / td);
  return est;
}

PowerEstimate monte_carlo_power(double q_c, double q_k, std::size_t n, double alpha,
                                std::size_t trials, uint64_t seed, std::size_t workers) {
  return monte_carlo_power_at(q_c, q_k, n, planner_gamma(q_c, n, alpha), trials, seed, workers);
}

ExactErrors exact_error_rates(double q_c, double q_k, std::size_t n, double gamma) {
  if (n == 0) throw ArgumentError("exact_error_rates: n must be >= 1");
  // Smallest count that rejects.
  std::size_t s = 0;
  while (s <= n && !rejects(static_cast<double>(s) / static_cast<double>(n), gamma)) ++s;
  return {binomial_upper_tail(n, q_c, s), 1.0 - binomial_upper_tail(n, q_k, s)};
}

}  // namespace acthook
