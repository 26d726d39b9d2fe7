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

#include <array>
#include <cmath>
#include <set>

#include "gtest/gtest.h"
#include "oracles.h"
#include "secfl/errors.h"
#include "secfl/rng.h"
#include "secfl/sharing.h"
#include "secfl/vecmath.h"

namespace secfl {
namespace {

FieldElement PlainNormMinus(const PrimeField& f, const FieldVector& x,
                            FieldElement c_sq) {
  return f.Sub(f.Dot(x, x), c_sq);
}

TEST(DealerTest, NormTripleRelationHolds) {
  PrimeField f;
  TrustedDealer dealer(f, 1);
  for (size_t d : {1, 2, 7, 256}) {
    NormTriple t = dealer.DealNormTriple(d);
    const auto& sa = t.share(PartyId::kServerA);
    const auto& sb = t.share(PartyId::kServerB);
    FieldVector a(d);
    for (size_t j = 0; j < d; ++j) a[j] = f.Add(sa.a[j], sb.a[j]);
    ASSERT_EQ(f.Dot(a, a), f.Add(sa.r, sb.r));
    if (d == 1) ASSERT_EQ(f.Mul(a[0], a[0]), f.Add(sa.r, sb.r));
  }
  EXPECT_EQ(dealer.norm_triples_issued(), 4u);
  EXPECT_THROW(dealer.DealNormTriple(0), UsageError);
}

TEST(DealerTest, TriplesAreIndependent) {
  PrimeField f;
  TrustedDealer dealer(f, 2);
  std::set<uint64_t> seen;
  for (int i = 0; i < 10000; ++i) {
    NormTriple t = dealer.DealNormTriple(1);
    const uint64_t a = f.Add(t.share(PartyId::kServerA).a[0],
                             t.share(PartyId::kServerB).a[0]).value;
    ASSERT_TRUE(seen.insert(a).second);
  }
}

TEST(DealerTest, BeaverTripleRelationHolds) {
  PrimeField f;
  TrustedDealer dealer(f, 3);
  for (int i = 0; i < 100; ++i) {
    BeaverTriple t = dealer.DealBeaverTriple();
    const auto& x = t.share(PartyId::kServerA);
    const auto& y = t.share(PartyId::kServerB);
    ASSERT_EQ(f.Mul(f.Add(x.a, y.a), f.Add(x.b, y.b)), f.Add(x.c, y.c));
  }
  EXPECT_EQ(dealer.beaver_triples_issued(), 100u);
}

TEST(BeaverTest, MatchesPlaintextProduct) {
  PrimeField f;
  TrustedDealer dealer(f, 4);
  Rng rng = Rng::Derive(4, Stream::kTest);
  for (int i = 0; i < 1000; ++i) {
    const FieldElement x = f.Uniform(rng), y = f.Uniform(rng);
    const FieldElement xa = f.Uniform(rng), ya = f.Uniform(rng);
    BeaverTriple t = dealer.DealBeaverTriple();
    const BeaverProduct z =
        BeaverMultiply(f, xa, f.Sub(x, xa), ya, f.Sub(y, ya), t);
    ASSERT_EQ(f.Add(z.z_a, z.z_b), f.Mul(x, y));
  }
}

TEST(BeaverTest, ZeroAndOne) {
  PrimeField f;
  TrustedDealer dealer(f, 5);
  const FieldElement y(123456);
  BeaverTriple t0 = dealer.DealBeaverTriple();
  auto z0 = BeaverMultiply(f, FieldElement(5), f.Neg(FieldElement(5)),
                           FieldElement(100), f.Sub(y, FieldElement(100)), t0);
  EXPECT_EQ(f.Add(z0.z_a, z0.z_b), FieldElement(0));
  BeaverTriple t1 = dealer.DealBeaverTriple();
  auto z1 = BeaverMultiply(f, FieldElement(0), FieldElement(1), y,
                           FieldElement(0), t1);
  EXPECT_EQ(f.Add(z1.z_a, z1.z_b), y);
}

TEST(BeaverTest, ReuseIsRejected) {
  PrimeField f;
  TrustedDealer dealer(f, 6);
  BeaverTriple t = dealer.DealBeaverTriple();
  BeaverMultiply(f, FieldElement(1), FieldElement(2), FieldElement(3),
                 FieldElement(4), t);
  EXPECT_TRUE(t.consumed());
  EXPECT_THROW(BeaverMultiply(f, FieldElement(1), FieldElement(2),
                              FieldElement(3), FieldElement(4), t),
               UsageError);
}

TEST(SecureNormTest, ZeroVectorZeroBound) {
  PrimeField f;
  TrustedDealer dealer(f, 7);
  Rng rng = Rng::Derive(7, Stream::kTest);
  auto [a, b] = Split(f, FieldVector(8), rng);
  NormTriple t = dealer.DealNormTriple(8);
  const NormShares y = SecureNormShares(f, a, b, FieldElement(0), t);
  EXPECT_EQ(f.Add(y.y_a, y.y_b), FieldElement(0));
}

TEST(SecureNormTest, MatchesPlaintextOracle) {
  PrimeField f;
  TrustedDealer dealer(f, 8);
  Rng rng = Rng::Derive(8, Stream::kTest);
  for (int i = 0; i < 1000; ++i) {
    const size_t d = 1 + rng.UniformBelow(64);
    FieldVector x(d);
    for (auto& e : x) e = f.Uniform(rng);
    const FieldElement c_sq = f.Uniform(rng);
    auto [xa, xb] = Split(f, x, rng);
    NormTriple t = dealer.DealNormTriple(d);
    const NormShares y = SecureNormShares(f, xa, xb, c_sq, t);
    ASSERT_EQ(f.Add(y.y_a, y.y_b), PlainNormMinus(f, x, c_sq));
  }
}

TEST(SecureNormTest, BoundaryNormGivesZero) {
  FixedPointCodec codec(PrimeField(), 16);
  const PrimeField& f = codec.field();
  TrustedDealer dealer(f, 9);
  Rng rng = Rng::Derive(9, Stream::kTest);
  // (3, 4) has norm exactly 5 and encodes without round-off.
  const FieldVector x = codec.EncodeVector(std::vector<double>{3.0, 4.0});
  auto [xa, xb] = Split(f, x, rng);
  NormTriple t = dealer.DealNormTriple(2);
  const NormShares y =
      SecureNormShares(f, xa, xb, codec.EncodeAtScale(25.0, 32), t);
  EXPECT_EQ(f.Add(y.y_a, y.y_b), FieldElement(0));
}

TEST(SecureNormTest, ContractViolations) {
  PrimeField f;
  TrustedDealer dealer(f, 10);
  Rng rng = Rng::Derive(10, Stream::kTest);
  auto [xa, xb] = Split(f, FieldVector(4), rng);
  NormTriple wrong = dealer.DealNormTriple(5);
  EXPECT_THROW(SecureNormShares(f, xa, xb, FieldElement(0), wrong),
               UsageError);
  NormTriple t = dealer.DealNormTriple(4);
  EXPECT_THROW(SecureNormShares(f, xb, xa, FieldElement(0), t), UsageError);
  SecureNormShares(f, xa, xb, FieldElement(0), t);
  EXPECT_THROW(SecureNormShares(f, xa, xb, FieldElement(0), t), UsageError);
}

TEST(SecureNormTest, ExhaustiveOverTinyField) {
  const testing::SweepCount n = testing::TinyFieldNormSweep(11);
  EXPECT_GT(n.cases, 900000u);
  EXPECT_EQ(n.mismatches, 0u) << "over " << n.cases << " cases";
}

TEST(SignTestTest, Examples) {
  FixedPointCodec codec(PrimeField(), 16);
  const PrimeField& f = codec.field();
  Rng coins = Rng::Derive(12, Stream::kTest);
  auto bit = [&](int64_t y) {
    const FieldElement ya = f.Uniform(coins);
    const SignTestResult r =
        SecureSignTest(f, ya, f.Sub(f.FromSigned(y), ya), coins);
    EXPECT_EQ(f.Add(r.bit_a, r.bit_b).value, r.opened ? 1u : 0u);
    return r.opened;
  };
  EXPECT_TRUE(bit(-1));
  EXPECT_FALSE(bit(1));
  EXPECT_TRUE(bit(0));
  EXPECT_TRUE(bit(-(int64_t{1} << 59)));
  EXPECT_FALSE(bit(int64_t{1} << 59));
}

ValidationVerdict Validate(const FixedPointCodec& codec,
                           const std::vector<double>& x, double C,
                           TrustedDealer& dealer, Rng& rng) {
  auto [a, b] = Split(codec.field(), codec.EncodeVector(x), rng);
  return ValidateUpdate(codec, a, b, C, kDefaultValidationSlack, dealer, 0);
}

TEST(ValidateTest, ScaledExamples) {
  FixedPointCodec codec(PrimeField(), 16);
  TrustedDealer dealer(codec.field(), 13);
  Rng rng = Rng::Derive(13, Stream::kTest);
  const double C = 30.0;
  for (int i = 0; i < 50; ++i) {
    std::vector<double> u = testing::RandomDirection(100, rng);
    std::vector<double> over = u, under = u;
    Scale(1.01 * (C + kDefaultValidationSlack), over);
    Scale(0.99 * C, under);
    EXPECT_FALSE(Validate(codec, over, C, dealer, rng).valid);
    const ValidationVerdict ok = Validate(codec, under, C, dealer, rng);
    EXPECT_TRUE(ok.valid);
    EXPECT_TRUE(ok.revealed_bit);
    EXPECT_TRUE(ok.ideal_comparison);
    EXPECT_EQ(ok.revealed_b.size(), 100u);
  }
}

TEST(ValidateTest, SoundnessAgainstPlaintextPredicate) {
  FixedPointCodec codec(PrimeField(), 16);
  TrustedDealer dealer(codec.field(), 14);
  Rng rng = Rng::Derive(14, Stream::kTest);
  const double C = 5.0;
  size_t mismatches = 0;
  for (int i = 0; i < 2000; ++i) {
    const size_t d = 1 + rng.UniformBelow(200);
    std::vector<double> x = testing::RandomDirection(d, rng);
    // Half the draws land within 1e-4 of the threshold.
    const double norm = i % 2 == 0
                            ? 2.0 * C * rng.Uniform()
                            : C + kDefaultValidationSlack +
                                  (rng.Uniform() - 0.5) * 2e-4;
    Scale(norm, x);
    const std::vector<double> q =
        codec.DecodeVector(codec.EncodeVector(x));
    const bool expected = L2Norm(q) <= C + kDefaultValidationSlack;
    if (Validate(codec, x, C, dealer, rng).valid != expected) ++mismatches;
  }
  EXPECT_EQ(mismatches, 0u);
}

// b = x - a for a fixed x over many triples: low bits of b[0] are uniform.
TEST(ValidateTest, MaskedVectorLooksUniform) {
  FixedPointCodec codec(PrimeField(), 16);
  const PrimeField& f = codec.field();
  TrustedDealer dealer(f, 15);
  Rng rng = Rng::Derive(15, Stream::kTest);
  const std::vector<double> x = {1.0, -2.0};
  std::array<int, 256> counts{};
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    auto [a, b] = Split(f, codec.EncodeVector(x), rng);
    NormTriple t = dealer.DealNormTriple(2);
    const NormShares y = SecureNormShares(f, a, b, FieldElement(0), t);
    ++counts[y.opened_b[0].value & 0xff];
  }
  const double expected = draws / 256.0;
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  EXPECT_LT(chi2, 380.0);
}

}  // namespace
}  // namespace secfl
