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

#include "bsagg/shamir.h"

#include <set>

#include "absl/strings/str_cat.h"
#include "bsagg/status_macros.h"

namespace bsagg {

void WriteSecretShare(const SecretShare& share, ByteWriter& out) {
  WriteFieldElement(share.x, out);
  WriteFieldElement(share.y, out);
}

absl::StatusOr<SecretShare> ReadSecretShare(ByteReader& in) {
  SecretShare share;
  BSAGG_ASSIGN_OR_RETURN(share.x, ReadFieldElement(in));
  BSAGG_ASSIGN_OR_RETURN(share.y, ReadFieldElement(in));
  if (share.x.IsZero()) {
    return absl::InvalidArgumentError("secret share has reserved x = 0");
  }
  return share;
}

absl::StatusOr<AccessStructure> AccessStructure::Create(int threshold,
                                                        int total) {
  if (threshold < 1 || threshold > total) {
    return absl::InvalidArgumentError(absl::StrCat(
        "invalid access structure: need 1 <= t <= k, got t=", threshold,
        " k=", total));
  }
  return AccessStructure(threshold, total);
}

FieldElement EvaluatePolynomial(const Polynomial& coeffs, FieldElement x) {
  FieldElement acc = FieldElement::Zero();
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
    acc = acc * x + *it;
  }
  return acc;
}

std::vector<SecretShare> SplitWithPolynomial(const Polynomial& coeffs, int k) {
  std::vector<SecretShare> shares;
  shares.reserve(k);
  for (int j = 1; j <= k; ++j) {
    FieldElement x = FieldElement::FromUint64(j);
    shares.push_back({x, EvaluatePolynomial(coeffs, x)});
  }
  return shares;
}

std::vector<SecretShare> Split(FieldElement secret, const AccessStructure& acc,
                               Prng& prng) {
  Polynomial coeffs;
  coeffs.reserve(acc.threshold());
  coeffs.push_back(secret);
  for (int i = 1; i < acc.threshold(); ++i) {
    coeffs.push_back(RandomFieldElement(prng));
  }
  return SplitWithPolynomial(coeffs, acc.total());
}

namespace {

absl::Status CheckDistinct(std::span<const FieldElement> points) {
  std::set<uint64_t> seen;
  for (FieldElement x : points) {
    if (!seen.insert(x.value()).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("duplicate evaluation point x = ", x.value()));
    }
  }
  return absl::OkStatus();
}

std::vector<FieldElement> XValues(std::span<const SecretShare> shares) {
  std::vector<FieldElement> xs;
  xs.reserve(shares.size());
  for (const SecretShare& s : shares) xs.push_back(s.x);
  return xs;
}

}  // namespace

absl::StatusOr<std::vector<FieldElement>> LagrangeCoefficientsAt(
    std::span<const FieldElement> points, FieldElement at) {
  BSAGG_RETURN_IF_ERROR(CheckDistinct(points));
  std::vector<FieldElement> coeffs;
  coeffs.reserve(points.size());
  for (size_t j = 0; j < points.size(); ++j) {
    FieldElement num = FieldElement::One();
    FieldElement den = FieldElement::One();
    for (size_t m = 0; m < points.size(); ++m) {
      if (m == j) continue;
      num *= at - points[m];
      den *= points[j] - points[m];
    }
    BSAGG_ASSIGN_OR_RETURN(FieldElement den_inv, den.Inverse());
    coeffs.push_back(num * den_inv);
  }
  return coeffs;
}

absl::StatusOr<std::vector<FieldElement>> LagrangeCoefficientsAtZero(
    std::span<const FieldElement> points) {
  for (FieldElement x : points) {
    if (x.IsZero()) {
      return absl::InvalidArgumentError(
          "evaluation point x = 0 is reserved for the secret");
    }
  }
  return LagrangeCoefficientsAt(points, FieldElement::Zero());
}

absl::StatusOr<std::optional<FieldElement>> Recover(
    std::span<const SecretShare> shares, const AccessStructure& acc) {
  std::vector<FieldElement> xs = XValues(shares);
  BSAGG_RETURN_IF_ERROR(CheckDistinct(xs));
  for (FieldElement x : xs) {
    if (x.IsZero()) {
      return absl::InvalidArgumentError("secret share has reserved x = 0");
    }
  }
  if (shares.size() < static_cast<size_t>(acc.threshold())) {
    return std::optional<FieldElement>();
  }
  BSAGG_ASSIGN_OR_RETURN(std::vector<FieldElement> lambda,
                         LagrangeCoefficientsAtZero(xs));
  FieldElement secret = FieldElement::Zero();
  for (size_t j = 0; j < shares.size(); ++j) secret += lambda[j] * shares[j].y;
  return std::optional<FieldElement>(secret);
}

absl::StatusOr<Polynomial> InterpolatePolynomial(
    std::span<const SecretShare> points) {
  std::vector<FieldElement> xs = XValues(points);
  BSAGG_RETURN_IF_ERROR(CheckDistinct(xs));
  const size_t n = points.size();
  Polynomial result(n, FieldElement::Zero());
  for (size_t j = 0; j < n; ++j) {
    // Build prod_{m != j} (X - x_m) and its value at x_j.
    Polynomial basis{FieldElement::One()};
    FieldElement den = FieldElement::One();
    for (size_t m = 0; m < n; ++m) {
      if (m == j) continue;
      Polynomial next(basis.size() + 1, FieldElement::Zero());
      for (size_t d = 0; d < basis.size(); ++d) {
        next[d + 1] += basis[d];
        next[d] -= basis[d] * xs[m];
      }
      basis = std::move(next);
      den *= xs[j] - xs[m];
    }
    BSAGG_ASSIGN_OR_RETURN(FieldElement den_inv, den.Inverse());
    FieldElement scale = points[j].y * den_inv;
    for (size_t d = 0; d < basis.size(); ++d) result[d] += scale * basis[d];
  }
  while (result.size() > 1 && result.back().IsZero()) result.pop_back();
  return result;
}

absl::StatusOr<FieldVector> CombineLinear(
    std::span<const FieldVector> payloads,
    std::span<const FieldElement> coeffs) {
  if (payloads.size() != coeffs.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("CombineLinear: ", payloads.size(), " payloads but ",
                     coeffs.size(), " coefficients"));
  }
  if (payloads.empty()) {
    return absl::InvalidArgumentError("CombineLinear: no payloads");
  }
  FieldVector result(payloads.front().dim());
  for (size_t j = 0; j < payloads.size(); ++j) {
    BSAGG_RETURN_IF_ERROR(result.AddScaled(coeffs[j], payloads[j]));
  }
  return result;
}

}  // namespace bsagg
