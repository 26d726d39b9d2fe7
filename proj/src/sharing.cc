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

#include "secfl/sharing.h"

#include <string>

#include "secfl/errors.h"
#include "secfl/rng.h"

namespace secfl {

std::string_view PartyName(PartyId party) {
  return party == PartyId::kServerA ? "server_a" : "server_b";
}

std::pair<ShareVector, ShareVector> Split(const PrimeField& field,
                                          std::span<const FieldElement> x,
                                          Rng& rng) {
  ShareVector a{PartyId::kServerA, FieldVector(x.size())};
  ShareVector b{PartyId::kServerB, FieldVector(x.size())};
  for (size_t i = 0; i < x.size(); ++i) {
    a.values[i] = field.Uniform(rng);
    b.values[i] = field.Sub(x[i], a.values[i]);
  }
  return {std::move(a), std::move(b)};
}

FieldVector Reconstruct(const PrimeField& field, const ShareVector& a,
                        const ShareVector& b) {
  if (a.owner == b.owner) {
    throw UsageError("reconstruct needs one share from each server, got two "
                     "from " + std::string(PartyName(a.owner)));
  }
  if (a.size() != b.size()) {
    throw UsageError("reconstruct: share lengths differ (" +
                     std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()) + ")");
  }
  FieldVector out(a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    out[i] = field.Add(a.values[i], b.values[i]);
  }
  return out;
}

void AccumulateInto(const PrimeField& field, ShareVector& acc,
                    const ShareVector& incoming) {
  if (acc.owner != incoming.owner) {
    throw UsageError("accumulate: share owned by " +
                     std::string(PartyName(incoming.owner)) +
                     " added to accumulator of " +
                     std::string(PartyName(acc.owner)));
  }
  if (acc.size() != incoming.size()) {
    throw UsageError("accumulate: share lengths differ");
  }
  for (size_t i = 0; i < acc.size(); ++i) {
    acc.values[i] = field.Add(acc.values[i], incoming.values[i]);
  }
}

ShareVector Accumulate(const PrimeField& field, ShareVector acc,
                       const ShareVector& incoming) {
  AccumulateInto(field, acc, incoming);
  return acc;
}

}  // namespace secfl
