//
// Copyright 2026 The secfl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef SECFL_RNG_H_
#define SECFL_RNG_H_

#include <cstdint>
#include <random>

namespace secfl {

// Purpose tags for derived randomness streams. Every party draws from its
// own stream so that runs are reproducible and independent of scheduling.
enum class Stream : uint64_t {
  kDataGeneration = 1,
  kModelInit = 2,
  kClientSelection = 3,
  kRecordSampling = 4,
  kShareSplit = 5,
  kServerNoiseA = 6,
  kServerNoiseB = 7,
  kDealer = 8,
  kClientNoise = 9,
  kAttacker = 10,
  kPoisoning = 11,
  kTest = 99,
};

// Seeded pseudo-random source. Thin wrapper over mt19937_64 with the few
// draws the simulator needs.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  // Stream keyed by (root, purpose, a, b), e.g. (seed, kShareSplit, client,
  // round). Keys are mixed with splitmix64 so that (client 1, round 2) and
  // (client 2, round 1) do not collide.
  static Rng Derive(uint64_t root, Stream purpose, uint64_t a = 0,
                    uint64_t b = 0);

  uint64_t NextU64() { return engine_(); }

  // Uniform integer in [0, bound). Rejection sampling on masked words, so the
  // output sequence does not depend on the standard library implementation.
  uint64_t UniformBelow(uint64_t bound);

  // Uniform double in [0, 1) with 53 random bits.
  double Uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  bool Bernoulli(double p) { return Uniform() < p; }

  double Normal(double mean = 0.0, double stddev = 1.0) {
    return mean + stddev * normal_(engine_);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

uint64_t SplitMix64(uint64_t x);

}  // namespace secfl

#endif  // SECFL_RNG_H_
