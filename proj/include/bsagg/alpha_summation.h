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

// Reference oracle for what secure aggregation is allowed to release: for
// each set of a partition of the users, the plaintext field sum of that set's
// inputs if the set holds at least alpha * n users, nothing otherwise.
// Test-only in spirit; it touches plaintext inputs.

#ifndef BSAGG_ALPHA_SUMMATION_H_
#define BSAGG_ALPHA_SUMMATION_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "absl/status/statusor.h"
#include "bsagg/field.h"

namespace bsagg {

// Sets must be pairwise disjoint and every member must have an entry in
// `inputs`. std::nullopt marks a set below the size bound.
absl::StatusOr<std::vector<std::optional<FieldVector>>> AlphaSummation(
    const std::vector<std::set<uint64_t>>& partition,
    const std::map<uint64_t, FieldVector>& inputs, double alpha, int n);

}  // namespace bsagg

#endif  // BSAGG_ALPHA_SUMMATION_H_
