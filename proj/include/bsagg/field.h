/*
 * Copyright 2026 The bsagg Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Arithmetic over the prime field Z_p with p = 2^61 - 1, and the fixed-point
// codec that carries real-valued model updates into and out of the field.

#ifndef BSAGG_FIELD_H_
#define BSAGG_FIELD_H_

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <random>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "bsagg/wire.h"

namespace bsagg {

// The Mersenne prime 2^61 - 1. Every protocol quantity lives in Z_p.
inline constexpr uint64_t kModulus = (uint64_t{1} << 61) - 1;

// Seeded generator used wherever the protocol draws randomness. std::mt19937_64
// has a fully specified output sequence, so simulations are reproducible
// across standard libraries.
using Prng = std::mt19937_64;

namespace internal {

constexpr uint64_t ReduceMersenne(unsigned __int128 x) {
  // Fold 2^61 = 1 (mod p) until the value fits, then a final conditional
  // subtraction.
  while (x >> 61) {
    x = (x & kModulus) + (x >> 61);
  }
  uint64_t r = static_cast<uint64_t>(x);
  return r == kModulus ? 0 : r;
}

}  // namespace internal

class FieldElement {
 public:
  constexpr FieldElement() = default;

  // Reduces an arbitrary integer into the canonical range [0, p).
  static constexpr FieldElement FromUint64(uint64_t v) {
    return FieldElement(internal::ReduceMersenne(v));
  }
  static constexpr FieldElement FromUint128(unsigned __int128 v) {
    return FieldElement(internal::ReduceMersenne(v));
  }
  // Negative values map to the upper half of the field.
  static constexpr FieldElement FromInt64(int64_t v) {
    if (v >= 0) return FromUint64(static_cast<uint64_t>(v));
    // -(v+1) is representable for every int64.
    uint64_t magnitude = static_cast<uint64_t>(-(v + 1)) + 1;
    return -FromUint64(magnitude);
  }
  // Accepts only values already in [0, p); used when decoding wire data.
  static absl::StatusOr<FieldElement> FromCanonical(uint64_t v);

  static constexpr FieldElement Zero() { return FieldElement(); }
  static constexpr FieldElement One() { return FieldElement(1); }

  constexpr uint64_t value() const { return value_; }

  constexpr FieldElement operator+(FieldElement o) const {
    uint64_t s = value_ + o.value_;  // < 2^62, no overflow
    return FieldElement(s >= kModulus ? s - kModulus : s);
  }
  constexpr FieldElement operator-(FieldElement o) const {
    return FieldElement(value_ >= o.value_ ? value_ - o.value_
                                           : value_ + kModulus - o.value_);
  }
  constexpr FieldElement operator-() const {
    return FieldElement(value_ == 0 ? 0 : kModulus - value_);
  }
  constexpr FieldElement operator*(FieldElement o) const {
    return FieldElement(internal::ReduceMersenne(
        static_cast<unsigned __int128>(value_) * o.value_));
  }
  FieldElement& operator+=(FieldElement o) { return *this = *this + o; }
  FieldElement& operator-=(FieldElement o) { return *this = *this - o; }
  FieldElement& operator*=(FieldElement o) { return *this = *this * o; }

  constexpr bool operator==(const FieldElement&) const = default;

  FieldElement Pow(uint64_t exponent) const;
  // Multiplicative inverse via Fermat; zero has none.
  absl::StatusOr<FieldElement> Inverse() const;

  bool IsZero() const { return value_ == 0; }

 private:
  explicit constexpr FieldElement(uint64_t canonical) : value_(canonical) {}

  uint64_t value_ = 0;
};

std::ostream& operator<<(std::ostream& os, FieldElement e);

// Uniform over Z_p by rejection sampling on 61-bit draws.
FieldElement RandomFieldElement(Prng& prng);

// An element of Z_p^d. Dimension is fixed at construction.
class FieldVector {
 public:
  FieldVector() = default;
  explicit FieldVector(size_t dim) : elems_(dim) {}
  explicit FieldVector(std::vector<FieldElement> elems)
      : elems_(std::move(elems)) {}

  size_t dim() const { return elems_.size(); }

  FieldElement& operator[](size_t i) { return elems_[i]; }
  const FieldElement& operator[](size_t i) const { return elems_[i]; }

  std::span<const FieldElement> elements() const { return elems_; }
  auto begin() const { return elems_.begin(); }
  auto end() const { return elems_.end(); }

  // In-place componentwise operations; fail on dimension mismatch.
  absl::Status AddAssign(const FieldVector& other);
  absl::Status SubAssign(const FieldVector& other);
  // this += scalar * other.
  absl::Status AddScaled(FieldElement scalar, const FieldVector& other);

  bool operator==(const FieldVector&) const = default;

 private:
  std::vector<FieldElement> elems_;
};

absl::StatusOr<FieldVector> VecAdd(const FieldVector& a, const FieldVector& b);
absl::StatusOr<FieldVector> VecSub(const FieldVector& a, const FieldVector& b);
FieldVector ScalarMul(FieldElement scalar, const FieldVector& v);

// Wire encodings: an element is 8 bytes little-endian; a vector is a 4-byte
// little-endian length followed by its elements.
void WriteFieldElement(FieldElement e, ByteWriter& out);
void WriteFieldVector(const FieldVector& v, ByteWriter& out);
absl::StatusOr<FieldElement> ReadFieldElement(ByteReader& in);
absl::StatusOr<FieldVector> ReadFieldVector(ByteReader& in);

// Signed fixed-point codec: x -> round(x * 2^frac_bits) mod p, with negatives
// in the upper half of the field. Construction enforces
//   max_summands * (magnitude_bound * 2^frac_bits + 1) < p / 2
// so that any sum of up to max_summands encodings decodes without ambiguity.
class FixedPointCodec {
 public:
  static absl::StatusOr<FixedPointCodec> Create(int frac_bits,
                                                double magnitude_bound,
                                                int max_summands);

  int frac_bits() const { return frac_bits_; }
  double magnitude_bound() const { return magnitude_bound_; }
  int max_summands() const { return max_summands_; }
  double scale() const { return scale_; }

 private:
  FixedPointCodec(int frac_bits, double magnitude_bound, int max_summands);

  int frac_bits_;
  double magnitude_bound_;
  int max_summands_;
  double scale_;
};

// Fails with kOutOfRange if any |w[i]| exceeds the codec's magnitude bound or
// is not finite.
absl::StatusOr<FieldVector> EncodeUpdate(std::span<const double> w,
                                         const FixedPointCodec& codec);

// Decodes a field sum of `num_summands` encodings back to reals.
absl::StatusOr<std::vector<double>> DecodeSum(const FieldVector& v,
                                              const FixedPointCodec& codec,
                                              int num_summands);

}  // namespace bsagg

#endif  // BSAGG_FIELD_H_
