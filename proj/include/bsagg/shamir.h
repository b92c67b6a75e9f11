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

// t-out-of-k Shamir secret sharing of scalar keys over Z_p.
//
// Share j of a secret is the evaluation of a random degree-(t-1) polynomial
// at x = j, so the share index doubles as the base station index. Recovery
// is Lagrange interpolation at zero; because interpolation is linear, the
// same coefficients reconstruct any linear function of the secret from the
// same linear function applied to the shares (CombineLinear).

#ifndef BSAGG_SHAMIR_H_
#define BSAGG_SHAMIR_H_

#include <optional>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "bsagg/field.h"
#include "bsagg/wire.h"

namespace bsagg {

struct SecretShare {
  FieldElement x;  // evaluation point, never zero
  FieldElement y;

  bool operator==(const SecretShare&) const = default;
};

// Serialized as x then y, 8 bytes little-endian each.
void WriteSecretShare(const SecretShare& share, ByteWriter& out);
absl::StatusOr<SecretShare> ReadSecretShare(ByteReader& in);

class AccessStructure {
 public:
  // Requires 1 <= threshold <= total.
  static absl::StatusOr<AccessStructure> Create(int threshold, int total);

  int threshold() const { return threshold_; }
  int total() const { return total_; }

 private:
  AccessStructure(int threshold, int total)
      : threshold_(threshold), total_(total) {}

  int threshold_;
  int total_;
};

// Coefficients in ascending degree order; coeffs[0] is the constant term.
using Polynomial = std::vector<FieldElement>;

FieldElement EvaluatePolynomial(const Polynomial& coeffs, FieldElement x);

// Shares of coeffs[0] at x = 1..k under the given polynomial.
std::vector<SecretShare> SplitWithPolynomial(const Polynomial& coeffs, int k);

// Draws t-1 uniform coefficients from `prng` and shares `secret` at
// x = 1..acc.total().
std::vector<SecretShare> Split(FieldElement secret, const AccessStructure& acc,
                               Prng& prng);

// Reconstructs the secret. Returns std::nullopt when fewer than
// acc.threshold() shares are supplied; duplicate or zero x values are errors.
absl::StatusOr<std::optional<FieldElement>> Recover(
    std::span<const SecretShare> shares, const AccessStructure& acc);

// Lagrange basis coefficients evaluated at `at`:
//   lambda_j = prod_{m != j} (at - x_m) / (x_j - x_m).
// Points must be distinct.
absl::StatusOr<std::vector<FieldElement>> LagrangeCoefficientsAt(
    std::span<const FieldElement> points, FieldElement at);

// Specialisation at zero; points must additionally be nonzero.
absl::StatusOr<std::vector<FieldElement>> LagrangeCoefficientsAtZero(
    std::span<const FieldElement> points);

// Returns the unique polynomial of degree < points.size() through the given
// (x, y) points, in coefficient form.
absl::StatusOr<Polynomial> InterpolatePolynomial(
    std::span<const SecretShare> points);

// sum_j coeffs[j] * payloads[j], componentwise mod p.
absl::StatusOr<FieldVector> CombineLinear(std::span<const FieldVector> payloads,
                                          std::span<const FieldElement> coeffs);

}  // namespace bsagg

#endif  // BSAGG_SHAMIR_H_
