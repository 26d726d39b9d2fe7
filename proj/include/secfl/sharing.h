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

// Two-server additive secret sharing of field vectors.

#ifndef SECFL_SHARING_H_
#define SECFL_SHARING_H_

#include <span>
#include <string_view>
#include <utility>

#include "secfl/ffield.h"

namespace secfl {

class Rng;

enum class PartyId : uint8_t { kServerA = 0, kServerB = 1 };

std::string_view PartyName(PartyId party);

inline PartyId OtherParty(PartyId party) {
  return party == PartyId::kServerA ? PartyId::kServerB : PartyId::kServerA;
}

// One server's additive share of a length-d field vector.
struct ShareVector {
  PartyId owner = PartyId::kServerA;
  FieldVector values;

  size_t size() const { return values.size(); }

  // All-zero share of the given length, the identity for Accumulate.
  static ShareVector Zero(PartyId owner, size_t length) {
    return ShareVector{owner, FieldVector(length)};
  }
};

// Splits x into (share for S_A, share for S_B). The S_A share is uniform over
// F^d; the S_B share is x minus it.
std::pair<ShareVector, ShareVector> Split(const PrimeField& field,
                                          std::span<const FieldElement> x,
                                          Rng& rng);

// Elementwise a + b. Throws UsageError on length mismatch or when both shares
// belong to the same server.
FieldVector Reconstruct(const PrimeField& field, const ShareVector& a,
                        const ShareVector& b);

// acc + incoming for two shares held by the same server.
ShareVector Accumulate(const PrimeField& field, ShareVector acc,
                       const ShareVector& incoming);

// In-place form of Accumulate.
void AccumulateInto(const PrimeField& field, ShareVector& acc,
                    const ShareVector& incoming);

}  // namespace secfl

#endif  // SECFL_SHARING_H_
