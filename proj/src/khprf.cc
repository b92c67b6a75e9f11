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

#include "bsagg/khprf.h"

#include <openssl/sha.h>

#include <array>
#include <vector>

namespace bsagg {

FieldElement HashToField(std::string_view domain_tag, uint64_t t, uint64_t i) {
  std::vector<uint8_t> input(domain_tag.begin(), domain_tag.end());
  input.reserve(domain_tag.size() + 16);
  for (uint64_t word : {t, i}) {
    for (int b = 0; b < 8; ++b) {
      input.push_back(static_cast<uint8_t>(word >> (8 * b)));
    }
  }
  std::array<uint8_t, SHA256_DIGEST_LENGTH> digest;
  SHA256(input.data(), input.size(), digest.data());

  unsigned __int128 v = 0;
  for (int b = 15; b >= 0; --b) v = (v << 8) | digest[b];
  return FieldElement::FromUint128(v);
}

FieldVector LinearHashPrf::Coefficients(uint64_t t, size_t d) const {
  FieldVector coeffs(d);
  for (size_t i = 0; i < d; ++i) coeffs[i] = HashToField(domain_tag_, t, i);
  return coeffs;
}

MaskVector LinearHashPrf::Eval(const KhprfKey& key, uint64_t t,
                               size_t d) const {
  return MaskVector{t, ScalarMul(key.value, Coefficients(t, d))};
}

std::vector<MaskVector> PrecomputeMasks(const KeyHomomorphicPrf& prf,
                                        const KhprfKey& key,
                                        uint64_t num_iterations, size_t d) {
  std::vector<MaskVector> masks;
  masks.reserve(num_iterations);
  for (uint64_t t = 0; t < num_iterations; ++t) {
    masks.push_back(prf.Eval(key, t, d));
  }
  return masks;
}

}  // namespace bsagg
