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

// Key-homomorphic mask generation.
//
// A KeyHomomorphicPrf maps (scalar key, iteration) to a vector in Z_p^d such
// that Eval(k1 + k2, t) == Eval(k1, t) + Eval(k2, t). The aggregation
// protocol depends on this identity: a base station evaluates the PRF on the
// sum of its key shares, and Lagrange interpolation of those evaluations
// yields the sum of the users' masks.
//
// WARNING: the default backend, LinearHashPrf, computes
//   Eval(k, t)[i] = k * H(t, i)
// with a public hash H. It is exactly key-homomorphic and Lagrange-compatible,
// which makes every correctness property testable bit-for-bit, but it is NOT
// a pseudorandom function: anyone who sees a single output component and
// knows H can solve for k. It stands in for a lattice-based (almost)
// key-homomorphic PRF, which can be slotted in behind the same interface.

#ifndef BSAGG_KHPRF_H_
#define BSAGG_KHPRF_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "bsagg/field.h"

namespace bsagg {

// Domain separation tag fixed by the protocol.
inline constexpr std::string_view kHashDomainTag = "STANDFIRM-H";

// SHA-256(domain_tag || le64(t) || le64(i)); the first 16 digest bytes are
// read as a little-endian 128-bit integer and reduced mod p.
FieldElement HashToField(std::string_view domain_tag, uint64_t t, uint64_t i);

struct KhprfKey {
  FieldElement value;

  KhprfKey operator+(const KhprfKey& o) const { return {value + o.value}; }
  bool operator==(const KhprfKey&) const = default;
};

struct MaskVector {
  uint64_t iteration = 0;
  FieldVector values;

  bool operator==(const MaskVector&) const = default;
};

class KeyHomomorphicPrf {
 public:
  virtual ~KeyHomomorphicPrf() = default;

  // Deterministic in (key, t, d). d must be at least 1.
  virtual MaskVector Eval(const KhprfKey& key, uint64_t t, size_t d) const = 0;
};

class LinearHashPrf final : public KeyHomomorphicPrf {
 public:
  explicit LinearHashPrf(std::string domain_tag = std::string(kHashDomainTag))
      : domain_tag_(std::move(domain_tag)) {}

  MaskVector Eval(const KhprfKey& key, uint64_t t, size_t d) const override;

  // The public vector [H(t, 0), ..., H(t, d-1)]; Eval is this times the key.
  FieldVector Coefficients(uint64_t t, size_t d) const;

  const std::string& domain_tag() const { return domain_tag_; }

 private:
  std::string domain_tag_;
};

// Masks for iterations 0..num_iterations-1, each bitwise equal to
// prf.Eval(key, t, d).
std::vector<MaskVector> PrecomputeMasks(const KeyHomomorphicPrf& prf,
                                        const KhprfKey& key,
                                        uint64_t num_iterations, size_t d);

}  // namespace bsagg

#endif  // BSAGG_KHPRF_H_
