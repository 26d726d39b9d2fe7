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

// Arithmetic in a public prime field F_p and the fixed-point embedding of
// reals into it. All secret-shared values in the simulator live here.

#ifndef SECFL_FFIELD_H_
#define SECFL_FFIELD_H_

#include <compare>
#include <cstdint>
#include <span>
#include <vector>

namespace secfl {

class Rng;

// An element of F_p, always reduced into [0, p). Carries no reference to its
// field; the owning PrimeField does the arithmetic.
struct FieldElement {
  uint64_t value = 0;

  constexpr FieldElement() = default;
  constexpr explicit FieldElement(uint64_t v) : value(v) {}

  friend constexpr auto operator<=>(FieldElement, FieldElement) = default;
};

using FieldVector = std::vector<FieldElement>;

inline constexpr uint64_t kMersenne61 = (uint64_t{1} << 61) - 1;

class PrimeField {
 public:
  // Default field p = 2^61 - 1.
  PrimeField() : PrimeField(kMersenne61) {}

  // Throws DomainError unless p is an odd prime below 2^62. The bound keeps
  // every sum of two reduced elements inside a machine word.
  explicit PrimeField(uint64_t modulus);

  uint64_t modulus() const { return p_; }

  FieldElement Reduce(uint64_t x) const { return FieldElement(x % p_); }

  FieldElement Add(FieldElement a, FieldElement b) const {
    uint64_t s = a.value + b.value;
    return FieldElement(s >= p_ ? s - p_ : s);
  }

  FieldElement Sub(FieldElement a, FieldElement b) const {
    return FieldElement(a.value >= b.value ? a.value - b.value
                                           : a.value + p_ - b.value);
  }

  FieldElement Neg(FieldElement a) const {
    return FieldElement(a.value == 0 ? 0 : p_ - a.value);
  }

  FieldElement Mul(FieldElement a, FieldElement b) const;

  FieldElement Pow(FieldElement base, uint64_t exponent) const;

  // Multiplicative inverse by Fermat. Throws DomainError on zero.
  FieldElement Inv(FieldElement a) const;

  // Inner product sum_i a_i * b_i. Spans must have equal length.
  FieldElement Dot(std::span<const FieldElement> a,
                   std::span<const FieldElement> b) const;

  FieldElement Uniform(Rng& rng) const;

  // Centered representative in (-p/2, p/2]. Elements above floor(p/2) map to
  // the negative half.
  int64_t ToSigned(FieldElement e) const;
  FieldElement FromSigned(int64_t v) const;

  friend bool operator==(const PrimeField&, const PrimeField&) = default;

 private:
  uint64_t p_;
};

bool IsPrime(uint64_t n);

// Fixed-point codec: a real x maps to round(x * 2^f) mod p with
// round-half-away-from-zero. Products of two encoded values carry scale 2f
// and are compared against constants encoded at scale 2f.
class FixedPointCodec {
 public:
  static constexpr int kDefaultScaleBits = 16;

  FixedPointCodec() = default;
  FixedPointCodec(PrimeField field, int scale_bits);

  const PrimeField& field() const { return field_; }
  int scale_bits() const { return scale_bits_; }
  int squared_scale_bits() const { return 2 * scale_bits_; }

  // Encodes at scale f. Throws OverflowError unless |x| * 2^f < p/2.
  FieldElement Encode(double x) const { return EncodeAtScale(x, scale_bits_); }
  FieldElement EncodeAtScale(double x, int scale_exponent) const;
  FieldVector EncodeVector(std::span<const double> xs) const;

  // floor(x * 2^scale) for a non-negative public threshold. An integer N
  // satisfies N <= floor(t) exactly when N <= t, so comparisons against the
  // encoded threshold agree with the real-valued predicate.
  FieldElement EncodeThreshold(double x, int scale_exponent) const;

  double Decode(FieldElement e) const { return DecodeAtScale(e, scale_bits_); }
  double DecodeAtScale(FieldElement e, int scale_exponent) const;
  std::vector<double> DecodeVector(std::span<const FieldElement> es) const;

  // Largest magnitude encodable at scale f.
  double MaxMagnitude() const;

 private:
  PrimeField field_;
  int scale_bits_ = kDefaultScaleBits;
};

}  // namespace secfl

#endif  // SECFL_FFIELD_H_
