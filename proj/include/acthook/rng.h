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

#ifndef ACTHOOK_RNG_H_
#define ACTHOOK_RNG_H_

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace acthook {

// Reproducible random source shared by injection, simulation and probing.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard. Standard distributions are implementation-defined, so the
// conversions to bounded integers and unit doubles are done here.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next() { return engine_(); }

  // Uniform in [0, bound). Lemire's multiply-shift with rejection.
  uint64_t uniform(uint64_t bound);

  // Uniform double in [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return unit() < p; }

 private:
  std::mt19937_64 engine_;
};

// SplitMix64 finalizer.
uint64_t mix64(uint64_t x);

// 64-bit FNV-1a.
uint64_t fnv1a64(std::string_view bytes);

// Derives an independent stream seed from a root seed and a path of labels.
uint64_t derive_seed(uint64_t root, std::initializer_list<uint64_t> path);
uint64_t derive_seed(uint64_t root, std::string_view label);

}  // namespace acthook

#endif  // ACTHOOK_RNG_H_
