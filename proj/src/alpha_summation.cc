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

#include "bsagg/alpha_summation.h"

#include "absl/strings/str_cat.h"
#include "bsagg/status_macros.h"

namespace bsagg {

absl::StatusOr<std::vector<std::optional<FieldVector>>> AlphaSummation(
    const std::vector<std::set<uint64_t>>& partition,
    const std::map<uint64_t, FieldVector>& inputs, double alpha, int n) {
  std::set<uint64_t> seen;
  for (const auto& set : partition) {
    for (uint64_t id : set) {
      if (!seen.insert(id).second) {
        return absl::InvalidArgumentError(
            absl::StrCat("user ", id, " appears in more than one set"));
      }
      if (!inputs.contains(id)) {
        return absl::InvalidArgumentError(
            absl::StrCat("no input for user ", id));
      }
    }
  }
  const size_t dim = inputs.empty() ? 0 : inputs.begin()->second.dim();
  const double bound = alpha * n;

  std::vector<std::optional<FieldVector>> out;
  out.reserve(partition.size());
  for (const auto& set : partition) {
    if (static_cast<double>(set.size()) + 1e-9 < bound) {
      out.emplace_back(std::nullopt);
      continue;
    }
    FieldVector sum(dim);
    for (uint64_t id : set) BSAGG_RETURN_IF_ERROR(sum.AddAssign(inputs.at(id)));
    out.emplace_back(std::move(sum));
  }
  return out;
}

}  // namespace bsagg
