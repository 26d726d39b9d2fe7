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

// Two-server secure computation on additive shares: Beaver multiplication,
// the inner-product norm check, and a simulated trusted dealer for the
// correlated randomness both need.

#ifndef SECFL_MPC_H_
#define SECFL_MPC_H_

#include <cstdint>
#include <mutex>

#include "secfl/ffield.h"
#include "secfl/rng.h"
#include "secfl/sharing.h"

namespace secfl {

struct BeaverTripleShare {
  FieldElement a, b, c;
};

// Shares of (a, b, c) with a * b = c. Single use.
class BeaverTriple {
 public:
  BeaverTriple(uint64_t id, BeaverTripleShare server_a,
               BeaverTripleShare server_b)
      : id_(id), server_a_(server_a), server_b_(server_b) {}

  uint64_t id() const { return id_; }
  bool consumed() const { return consumed_; }
  const BeaverTripleShare& share(PartyId party) const {
    return party == PartyId::kServerA ? server_a_ : server_b_;
  }

  // Marks the triple used. Throws UsageError on the second call.
  void Consume();

 private:
  uint64_t id_;
  BeaverTripleShare server_a_, server_b_;
  bool consumed_ = false;
};

struct NormTripleShare {
  FieldVector a;
  FieldElement r;
};

// Shares of a in F^d and r in F with a^T a = r. The vector analogue of a
// Beaver triple, consumed by one norm check.
class NormTriple {
 public:
  NormTriple(uint64_t id, NormTripleShare server_a, NormTripleShare server_b)
      : id_(id), server_a_(std::move(server_a)),
        server_b_(std::move(server_b)) {}

  uint64_t id() const { return id_; }
  size_t dimension() const { return server_a_.a.size(); }
  bool consumed() const { return consumed_; }
  const NormTripleShare& share(PartyId party) const {
    return party == PartyId::kServerA ? server_a_ : server_b_;
  }

  void Consume();

 private:
  uint64_t id_;
  NormTripleShare server_a_, server_b_;
  bool consumed_ = false;
};

// Simulated trusted third party handing out correlated randomness. Safe to
// share between threads; issuance order fixes the randomness, so callers that
// need reproducible runs must request triples in a fixed order.
class TrustedDealer {
 public:
  TrustedDealer(PrimeField field, uint64_t seed)
      : field_(field), rng_(Rng::Derive(seed, Stream::kDealer)) {}

  const PrimeField& field() const { return field_; }

  NormTriple DealNormTriple(size_t dimension);
  BeaverTriple DealBeaverTriple();

  // Fresh stream for an idealized functionality (the comparison gate) that
  // needs private coins.
  Rng DeriveRng();

  uint64_t norm_triples_issued() const;
  uint64_t beaver_triples_issued() const;

 private:
  PrimeField field_;
  mutable std::mutex mu_;
  Rng rng_;
  uint64_t norm_issued_ = 0;
  uint64_t beaver_issued_ = 0;
  uint64_t streams_issued_ = 0;
};

struct BeaverProduct {
  FieldElement z_a, z_b;
  // The two values broadcast during the protocol: d = x - a, e = y - b.
  FieldElement opened_d, opened_e;
};

// Shares of x * y from shares of x and y, consuming `triple`. Each server
// computes z_j = d*e/2 + d[b]_j + e[a]_j + [c]_j.
BeaverProduct BeaverMultiply(const PrimeField& field, FieldElement x_a,
                             FieldElement x_b, FieldElement y_a,
                             FieldElement y_b, BeaverTriple& triple);

struct NormShares {
  FieldElement y_a, y_b;
  // b = x - a, the only value opened to both servers.
  FieldVector opened_b;
};

// Shares of y = x^T x - c_sq where c_sq is a public constant at scale 2f:
//   y_j = [r]_j + 2 b^T [a]_j + (b^T b - c_sq) / 2.
NormShares SecureNormShares(const PrimeField& field, const ShareVector& x_a,
                            const ShareVector& x_b, FieldElement c_sq,
                            NormTriple& triple);

struct SignTestResult {
  FieldElement bit_a, bit_b;
  bool opened;  // 1(y <= 0) over the centered representative of y
};

// Comparison gate. Audited ideal functionality: reconstructs y inside the
// gate, outputs fresh additive shares of the indicator and opens them.
// Nothing but the bit leaves the gate.
SignTestResult SecureSignTest(const PrimeField& field, FieldElement y_a,
                              FieldElement y_b, Rng& gate_coins);

inline constexpr double kDefaultValidationSlack = 1e-5;

struct ValidationVerdict {
  int64_t client = -1;
  bool valid = false;
  // Everything revealed to the servers: the masked vector and the final bit.
  FieldVector revealed_b;
  bool revealed_bit = false;
  // The comparison ran through the ideal gate (always true here); kept so the
  // trust boundary is visible in transcripts.
  bool ideal_comparison = true;
};

// Decides ||decode(x)||_2 <= bound + slack on a shared x encoded at scale f.
// The squared threshold is encoded at scale 2f.
ValidationVerdict ValidateUpdate(const FixedPointCodec& codec,
                                 const ShareVector& x_a,
                                 const ShareVector& x_b, double bound,
                                 double slack, TrustedDealer& dealer,
                                 int64_t client_id = -1);

}  // namespace secfl

#endif  // SECFL_MPC_H_
