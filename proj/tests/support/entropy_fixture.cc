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

#include "support/entropy_fixture.h"

#include <cmath>
#include <stdexcept>
#include <string>

#include "acthook/rng.h"

namespace acthook::testing {
namespace {

double entropy_at(double temperature, std::size_t k) {
  double z = 0, h = 0;
  for (std::size_t i = 0; i < k; ++i) z += std::exp(-double(i) / temperature);
  for (std::size_t i = 0; i < k; ++i) {
    const double p = std::exp(-double(i) / temperature) / z;
    if (p > 0) h -= p * std::log(p);
  }
  return h;
}

}  // namespace

std::vector<TokenCandidate> candidates_with_entropy(double target, std::size_t k) {
  if (k < 2 || !(target > 0) || !(target < std::log(double(k)))) {
    throw std::invalid_argument("target entropy out of range");
  }
  double lo = 1e-3, hi = 1e6;
  for (int i = 0; i < 200; ++i) {
    const double mid = std::sqrt(lo * hi);
    (entropy_at(mid, k) < target ? lo : hi) = mid;
  }
  const double t = std::sqrt(lo * hi);
  double z = 0;
  for (std::size_t i = 0; i < k; ++i) z += std::exp(-double(i) / t);
  std::vector<TokenCandidate> out;
  for (std::size_t i = 0; i < k; ++i) {
    out.push_back({"tok" + std::to_string(i), -double(i) / t - std::log(z)});
  }
  return out;
}

std::vector<TokenRecord> geometric_decay_records(const DecayFixture& f, uint64_t seed) {
  Rng rng(seed);
  std::vector<TokenRecord> out;
  int64_t pos = 0;
  for (std::size_t a = 0; a < f.actions; ++a) {
    for (std::size_t g = 0; g < f.gap; ++g) {
      TokenRecord r;
      r.position = pos++;
      r.candidates = candidates_with_entropy(0.3 + 0.4 * rng.unit(), f.k);
      out.push_back(std::move(r));
    }
    const double scale = 0.8 + 0.4 * rng.unit();
    for (std::size_t o = 0; o < f.action_len; ++o) {
      TokenRecord r;
      r.position = pos++;
      r.is_action_start = o == 0;
      const double h = f.floor + (f.peak - f.floor) * scale * std::pow(f.decay, double(o));
      r.candidates = candidates_with_entropy(h, f.k);
      out.push_back(std::move(r));
    }
  }
  assign_offsets(out);
  return out;
}

}  // namespace acthook::testing
