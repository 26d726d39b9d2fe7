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

#include "secfl/mpc.h"

#include <string>

#include "secfl/errors.h"

namespace secfl {

void BeaverTriple::Consume() {
  if (consumed_) {
    throw UsageError("Beaver triple " + std::to_string(id_) + " reused");
  }
  consumed_ = true;
}

void NormTriple::Consume() {
  if (consumed_) {
    throw UsageError("norm triple " + std::to_string(id_) + " reused");
  }
  consumed_ = true;
}

NormTriple TrustedDealer::DealNormTriple(size_t dimension) {
  if (dimension == 0) throw UsageError("norm triple dimension must be >= 1");
  std::lock_guard lock(mu_);
  FieldVector a(dimension);
  for (auto& v : a) v = field_.Uniform(rng_);
  const FieldElement r = field_.Dot(a, a);

  auto [a_share_a, a_share_b] = Split(field_, a, rng_);
  const FieldElement r_share_a = field_.Uniform(rng_);
  const FieldElement r_share_b = field_.Sub(r, r_share_a);
  return NormTriple(norm_issued_++,
                    NormTripleShare{std::move(a_share_a.values), r_share_a},
                    NormTripleShare{std::move(a_share_b.values), r_share_b});
}

BeaverTriple TrustedDealer::DealBeaverTriple() {
  std::lock_guard lock(mu_);
  const FieldElement a = field_.Uniform(rng_);
  const FieldElement b = field_.Uniform(rng_);
  const FieldElement c = field_.Mul(a, b);
  BeaverTripleShare sa{field_.Uniform(rng_), field_.Uniform(rng_),
                       field_.Uniform(rng_)};
  BeaverTripleShare sb{field_.Sub(a, sa.a), field_.Sub(b, sa.b),
                       field_.Sub(c, sa.c)};
  return BeaverTriple(beaver_issued_++, sa, sb);
}

Rng TrustedDealer::DeriveRng() {
  std::lock_guard lock(mu_);
  return Rng(SplitMix64(rng_.NextU64() ^ ++streams_issued_));
}

uint64_t TrustedDealer::norm_triples_issued() const {
  std::lock_guard lock(mu_);
  return norm_issued_;
}

uint64_t TrustedDealer::beaver_triples_issued() const {
  std::lock_guard lock(mu_);
  return beaver_issued_;
}

BeaverProduct BeaverMultiply(const PrimeField& field, FieldElement x_a,
                             FieldElement x_b, FieldElement y_a,
                             FieldElement y_b, BeaverTriple& triple) {
  triple.Consume();
  const BeaverTripleShare& ta = triple.share(PartyId::kServerA);
  const BeaverTripleShare& tb = triple.share(PartyId::kServerB);

  // Each server broadcasts its shares of d and e.
  const FieldElement d = field.Add(field.Sub(x_a, ta.a), field.Sub(x_b, tb.a));
  const FieldElement e = field.Add(field.Sub(y_a, ta.b), field.Sub(y_b, tb.b));

  const FieldElement de_half = field.Mul(field.Mul(d, e), field.Inv(FieldElement(2)));
  auto local = [&](const BeaverTripleShare& t) {
    FieldElement z = field.Add(de_half, field.Mul(d, t.b));
    z = field.Add(z, field.Mul(e, t.a));
    return field.Add(z, t.c);
  };
  return BeaverProduct{local(ta), local(tb), d, e};
}

NormShares SecureNormShares(const PrimeField& field, const ShareVector& x_a,
                            const ShareVector& x_b, FieldElement c_sq,
                            NormTriple& triple) {
  if (x_a.owner != PartyId::kServerA || x_b.owner != PartyId::kServerB) {
    throw UsageError("norm check expects shares (S_A, S_B) in that order");
  }
  if (x_a.size() != triple.dimension() || x_b.size() != triple.dimension()) {
    throw UsageError("norm check: share dimension " +
                     std::to_string(x_a.size()) + " does not match triple "
                     "dimension " + std::to_string(triple.dimension()));
  }
  triple.Consume();
  const NormTripleShare& ta = triple.share(PartyId::kServerA);
  const NormTripleShare& tb = triple.share(PartyId::kServerB);
  const size_t d = x_a.size();

  // Step 1: [b]_j = [x]_j - [a]_j, exchanged so both hold b.
  FieldVector b(d);
  for (size_t i = 0; i < d; ++i) {
    const FieldElement b_a = field.Sub(x_a.values[i], ta.a[i]);
    const FieldElement b_b = field.Sub(x_b.values[i], tb.a[i]);
    b[i] = field.Add(b_a, b_b);
  }

  // Step 2: local evaluation; each server adds half the public constant.
  const FieldElement half = field.Inv(FieldElement(2));
  const FieldElement constant =
      field.Mul(field.Sub(field.Dot(b, b), c_sq), half);
  auto local = [&](const NormTripleShare& t) {
    const FieldElement cross = field.Mul(FieldElement(2), field.Dot(b, t.a));
    return field.Add(field.Add(t.r, cross), constant);
  };
  return NormShares{local(ta), local(tb), std::move(b)};
}

SignTestResult SecureSignTest(const PrimeField& field, FieldElement y_a,
                              FieldElement y_b, Rng& gate_coins) {
  const FieldElement y = field.Add(y_a, y_b);
  const bool bit = field.ToSigned(y) <= 0;
  const FieldElement bit_a = field.Uniform(gate_coins);
  const FieldElement bit_b = field.Sub(FieldElement(bit ? 1 : 0), bit_a);
  const bool opened = field.Add(bit_a, bit_b).value == 1;
  return SignTestResult{bit_a, bit_b, opened};
}

ValidationVerdict ValidateUpdate(const FixedPointCodec& codec,
                                 const ShareVector& x_a,
                                 const ShareVector& x_b, double bound,
                                 double slack, TrustedDealer& dealer,
                                 int64_t client_id) {
  if (!(bound >= 0.0) || !(slack >= 0.0)) {
    throw DomainError("validation bound and slack must be non-negative");
  }
  const PrimeField& field = codec.field();
  if (!(field == dealer.field())) {
    throw UsageError("dealer and codec use different fields");
  }
  const double widened = bound + slack;
  const FieldElement c_sq =
      codec.EncodeThreshold(widened * widened, codec.squared_scale_bits());

  NormTriple triple = dealer.DealNormTriple(x_a.size());
  NormShares y = SecureNormShares(field, x_a, x_b, c_sq, triple);
  Rng coins = dealer.DeriveRng();
  const SignTestResult sign = SecureSignTest(field, y.y_a, y.y_b, coins);

  ValidationVerdict verdict;
  verdict.client = client_id;
  verdict.valid = sign.opened;
  verdict.revealed_b = std::move(y.opened_b);
  verdict.revealed_bit = sign.opened;
  verdict.ideal_comparison = true;
  return verdict;
}

}  // namespace secfl
