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

#include "secfl/rng.h"

#include <bit>

namespace secfl {

uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng Rng::Derive(uint64_t root, Stream purpose, uint64_t a, uint64_t b) {
  uint64_t h = SplitMix64(root);
  h = SplitMix64(h ^ static_cast<uint64_t>(purpose));
  h = SplitMix64(h ^ a);
  h = SplitMix64(h ^ b);
  return Rng(h);
}

uint64_t Rng::UniformBelow(uint64_t bound) {
  if (bound <= 1) return 0;
  const uint64_t mask = std::bit_ceil(bound) - 1;
  for (;;) {
    uint64_t v = engine_() & mask;
    if (v < bound) return v;
  }
}

}  // namespace secfl
