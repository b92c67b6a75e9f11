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

#include "bsagg/field.h"

#include <cmath>
#include <limits>

#include "absl/strings/str_cat.h"
#include "bsagg/status_macros.h"

namespace bsagg {

absl::StatusOr<FieldElement> FieldElement::FromCanonical(uint64_t v) {
  if (v >= kModulus) {
    return absl::InvalidArgumentError(
        absl::StrCat("field element ", v, " is not reduced mod 2^61-1"));
  }
  return FieldElement(v);
}

FieldElement FieldElement::Pow(uint64_t exponent) const {
  FieldElement result = One();
  FieldElement base = *this;
  while (exponent != 0) {
    if (exponent & 1) result *= base;
    base *= base;
    exponent >>= 1;
  }
  return result;
}

absl::StatusOr<FieldElement> FieldElement::Inverse() const {
  if (IsZero()) {
    return absl::InvalidArgumentError("zero has no multiplicative inverse");
  }
  return Pow(kModulus - 2);
}

std::ostream& operator<<(std::ostream& os, FieldElement e) {
  return os << e.value();
}

FieldElement RandomFieldElement(Prng& prng) {
  for (;;) {
    uint64_t candidate = prng() >> 3;
    if (candidate < kModulus) return FieldElement::FromUint64(candidate);
  }
}

namespace {

absl::Status CheckSameDim(const FieldVector& a, const FieldVector& b) {
  if (a.dim() != b.dim()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "field vector dimension mismatch: ", a.dim(), " vs ", b.dim()));
  }
  return absl::OkStatus();
}

}  // namespace

absl::Status FieldVector::AddAssign(const FieldVector& other) {
  BSAGG_RETURN_IF_ERROR(CheckSameDim(*this, other));
  for (size_t i = 0; i < elems_.size(); ++i) elems_[i] += other.elems_[i];
  return absl::OkStatus();
}

absl::Status FieldVector::SubAssign(const FieldVector& other) {
  BSAGG_RETURN_IF_ERROR(CheckSameDim(*this, other));
  for (size_t i = 0; i < elems_.size(); ++i) elems_[i] -= other.elems_[i];
  return absl::OkStatus();
}

absl::Status FieldVector::AddScaled(FieldElement scalar,
                                    const FieldVector& other) {
  BSAGG_RETURN_IF_ERROR(CheckSameDim(*this, other));
  for (size_t i = 0; i < elems_.size(); ++i) {
    elems_[i] += scalar * other.elems_[i];
  }
  return absl::OkStatus();
}

absl::StatusOr<FieldVector> VecAdd(const FieldVector& a, const FieldVector& b) {
  FieldVector result = a;
  BSAGG_RETURN_IF_ERROR(result.AddAssign(b));
  return result;
}

absl::StatusOr<FieldVector> VecSub(const FieldVector& a, const FieldVector& b) {
  FieldVector result = a;
  BSAGG_RETURN_IF_ERROR(result.SubAssign(b));
  return result;
}

FieldVector ScalarMul(FieldElement scalar, const FieldVector& v) {
  FieldVector result(v.dim());
  for (size_t i = 0; i < v.dim(); ++i) result[i] = scalar * v[i];
  return result;
}

void WriteFieldElement(FieldElement e, ByteWriter& out) {
  out.PutU64(e.value());
}

void WriteFieldVector(const FieldVector& v, ByteWriter& out) {
  out.PutU32(static_cast<uint32_t>(v.dim()));
  for (FieldElement e : v) WriteFieldElement(e, out);
}

absl::StatusOr<FieldElement> ReadFieldElement(ByteReader& in) {
  BSAGG_ASSIGN_OR_RETURN(uint64_t raw, in.ReadU64());
  return FieldElement::FromCanonical(raw);
}

absl::StatusOr<FieldVector> ReadFieldVector(ByteReader& in) {
  BSAGG_ASSIGN_OR_RETURN(uint32_t dim, in.ReadU32());
  if (in.remaining() / 8 < dim) {
    return absl::InvalidArgumentError(
        absl::StrCat("field vector claims ", dim, " elements but only ",
                     in.remaining(), " bytes remain"));
  }
  std::vector<FieldElement> elems;
  elems.reserve(dim);
  for (uint32_t i = 0; i < dim; ++i) {
    BSAGG_ASSIGN_OR_RETURN(FieldElement e, ReadFieldElement(in));
    elems.push_back(e);
  }
  return FieldVector(std::move(elems));
}

FixedPointCodec::FixedPointCodec(int frac_bits, double magnitude_bound,
                                 int max_summands)
    : frac_bits_(frac_bits),
      magnitude_bound_(magnitude_bound),
      max_summands_(max_summands),
      scale_(std::ldexp(1.0, frac_bits)) {}

absl::StatusOr<FixedPointCodec> FixedPointCodec::Create(int frac_bits,
                                                        double magnitude_bound,
                                                        int max_summands) {
  if (frac_bits < 0 || frac_bits > 60) {
    return absl::InvalidArgumentError(
        absl::StrCat("frac_bits must be in [0, 60], got ", frac_bits));
  }
  if (!(magnitude_bound > 0) || !std::isfinite(magnitude_bound)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "magnitude bound must be positive and finite, got ", magnitude_bound));
  }
  if (max_summands < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("max_summands must be >= 1, got ", max_summands));
  }
  long double per_summand =
      std::ldexp(static_cast<long double>(magnitude_bound), frac_bits) + 1.0L;
  long double worst_sum = per_summand * max_summands;
  long double half_field = static_cast<long double>(kModulus) / 2.0L;
  if (!(worst_sum < half_field)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "codec headroom violated: ", max_summands, " * (", magnitude_bound,
        " * 2^", frac_bits, " + 1) must be below p/2"));
  }
  return FixedPointCodec(frac_bits, magnitude_bound, max_summands);
}

absl::StatusOr<FieldVector> EncodeUpdate(std::span<const double> w,
                                         const FixedPointCodec& codec) {
  FieldVector out(w.size());
  for (size_t i = 0; i < w.size(); ++i) {
    if (!std::isfinite(w[i]) || std::fabs(w[i]) > codec.magnitude_bound()) {
      return absl::OutOfRangeError(
          absl::StrCat("update component ", i, " = ", w[i],
                       " exceeds magnitude bound ", codec.magnitude_bound()));
    }
    out[i] = FieldElement::FromInt64(std::llround(w[i] * codec.scale()));
  }
  return out;
}

absl::StatusOr<std::vector<double>> DecodeSum(const FieldVector& v,
                                              const FixedPointCodec& codec,
                                              int num_summands) {
  if (num_summands < 1 || num_summands > codec.max_summands()) {
    return absl::InvalidArgumentError(
        absl::StrCat("num_summands ", num_summands, " outside [1, ",
                     codec.max_summands(), "]"));
  }
  constexpr uint64_t kHalf = kModulus / 2;
  std::vector<double> out(v.dim());
  for (size_t i = 0; i < v.dim(); ++i) {
    uint64_t raw = v[i].value();
    int64_t signed_value = raw > kHalf ? -static_cast<int64_t>(kModulus - raw)
                                       : static_cast<int64_t>(raw);
    out[i] = static_cast<double>(signed_value) / codec.scale();
  }
  return out;
}

}  // namespace bsagg
