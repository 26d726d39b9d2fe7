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

#include "secfl/ffield.h"

#include <cmath>
#include <string>

#include "secfl/errors.h"
#include "secfl/rng.h"

namespace secfl {
namespace {

using u128 = unsigned __int128;

uint64_t MulMod(uint64_t a, uint64_t b, uint64_t m) {
  return static_cast<uint64_t>(static_cast<u128>(a) * b % m);
}

uint64_t PowMod(uint64_t base, uint64_t e, uint64_t m) {
  uint64_t result = 1 % m;
  base %= m;
  while (e > 0) {
    if (e & 1) result = MulMod(result, base, m);
    base = MulMod(base, base, m);
    e >>= 1;
  }
  return result;
}

}  // namespace

// Deterministic Miller-Rabin; these bases are exact for all 64-bit inputs.
bool IsPrime(uint64_t n) {
  if (n < 2) return false;
  for (uint64_t small : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (n % small == 0) return n == small;
  }
  uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (uint64_t a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    uint64_t x = PowMod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = MulMod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

PrimeField::PrimeField(uint64_t modulus) : p_(modulus) {
  if (modulus < 3 || modulus >= (uint64_t{1} << 62) || !IsPrime(modulus)) {
    throw DomainError("field modulus must be an odd prime below 2^62, got " +
                      std::to_string(modulus));
  }
}

FieldElement PrimeField::Mul(FieldElement a, FieldElement b) const {
  const u128 prod = static_cast<u128>(a.value) * b.value;
  if (p_ == kMersenne61) {
    // x mod (2^61 - 1) = (x & p) + (x >> 61), folded twice.
    uint64_t lo = static_cast<uint64_t>(prod & kMersenne61);
    uint64_t hi = static_cast<uint64_t>(prod >> 61);
    uint64_t s = lo + hi;
    s = (s & kMersenne61) + (s >> 61);
    return FieldElement(s >= p_ ? s - p_ : s);
  }
  return FieldElement(static_cast<uint64_t>(prod % p_));
}

FieldElement PrimeField::Pow(FieldElement base, uint64_t exponent) const {
  FieldElement result(1);
  while (exponent > 0) {
    if (exponent & 1) result = Mul(result, base);
    base = Mul(base, base);
    exponent >>= 1;
  }
  return result;
}

FieldElement PrimeField::Inv(FieldElement a) const {
  if (a.value % p_ == 0) throw DomainError("inverse of zero field element");
  return Pow(a, p_ - 2);
}

FieldElement PrimeField::Dot(std::span<const FieldElement> a,
                             std::span<const FieldElement> b) const {
  if (a.size() != b.size()) {
    throw UsageError("dot product of vectors with different lengths");
  }
  FieldElement acc(0);
  for (size_t i = 0; i < a.size(); ++i) acc = Add(acc, Mul(a[i], b[i]));
  return acc;
}

FieldElement PrimeField::Uniform(Rng& rng) const {
  return FieldElement(rng.UniformBelow(p_));
}

int64_t PrimeField::ToSigned(FieldElement e) const {
  if (e.value > p_ / 2) return -static_cast<int64_t>(p_ - e.value);
  return static_cast<int64_t>(e.value);
}

FieldElement PrimeField::FromSigned(int64_t v) const {
  if (v >= 0) return Reduce(static_cast<uint64_t>(v));
  // Avoid negating INT64_MIN.
  const uint64_t mag = static_cast<uint64_t>(-(v + 1)) + 1;
  return Neg(Reduce(mag));
}

FixedPointCodec::FixedPointCodec(PrimeField field, int scale_bits)
    : field_(field), scale_bits_(scale_bits) {
  if (scale_bits < 0 || scale_bits > 30) {
    throw DomainError("fixed-point scale bits must lie in [0, 30]");
  }
}

double FixedPointCodec::MaxMagnitude() const {
  return std::ldexp(static_cast<double>(field_.modulus() / 2), -scale_bits_);
}

FieldElement FixedPointCodec::EncodeAtScale(double x,
                                            int scale_exponent) const {
  const double scaled = std::round(std::ldexp(x, scale_exponent));
  const double half = static_cast<double>(field_.modulus() / 2);
  if (!std::isfinite(scaled) || std::fabs(scaled) >= half) {
    throw OverflowError("value " + std::to_string(x) +
                        " exceeds fixed-point headroom at scale 2^" +
                        std::to_string(scale_exponent));
  }
  return field_.FromSigned(static_cast<int64_t>(scaled));
}

FieldElement FixedPointCodec::EncodeThreshold(double x,
                                              int scale_exponent) const {
  if (!(x >= 0.0)) throw DomainError("threshold must be non-negative");
  const double scaled = std::floor(std::ldexp(x, scale_exponent));
  if (!std::isfinite(scaled) ||
      scaled >= static_cast<double>(field_.modulus() / 2)) {
    throw OverflowError("threshold " + std::to_string(x) +
                        " exceeds fixed-point headroom");
  }
  return FieldElement(static_cast<uint64_t>(scaled));
}

FieldVector FixedPointCodec::EncodeVector(std::span<const double> xs) const {
  FieldVector out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back(Encode(x));
  return out;
}

double FixedPointCodec::DecodeAtScale(FieldElement e,
                                      int scale_exponent) const {
  return std::ldexp(static_cast<double>(field_.ToSigned(e)), -scale_exponent);
}

std::vector<double> FixedPointCodec::DecodeVector(
    std::span<const FieldElement> es) const {
  std::vector<double> out;
  out.reserve(es.size());
  for (FieldElement e : es) out.push_back(Decode(e));
  return out;
}

}  // namespace secfl
