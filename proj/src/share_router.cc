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

#include "bsagg/share_router.h"

#include "absl/strings/str_cat.h"

namespace bsagg {

absl::StatusOr<RoutingResult> RouteSetupShares(
    std::span<const ProtocolMessage> batch, const std::set<uint64_t>& region,
    const std::set<uint64_t>& reachable) {
  std::set<uint64_t> targets;
  for (const ProtocolMessage& msg : batch) {
    const auto* payload = std::get_if<SetupSharePayload>(&msg.payload);
    if (payload == nullptr) {
      return absl::InvalidArgumentError(
          absl::StrCat("router expected SETUP_SHARE, got ",
                       std::string(MessageTypeName(msg.type()))));
    }
    if (msg.sender != batch.front().sender) {
      return absl::InvalidArgumentError("setup batch mixes senders");
    }
    if (!region.contains(payload->target_bs)) {
      return absl::NotFoundError(absl::StrCat("BS ", payload->target_bs,
                                              " is not in the routing region"));
    }
    if (!targets.insert(payload->target_bs).second) {
      return absl::InvalidArgumentError(absl::StrCat(
          "setup batch addresses BS ", payload->target_bs, " twice"));
    }
  }
  if (targets.size() != region.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("setup batch covers ", targets.size(), " of ",
                     region.size(), " base stations"));
  }

  RoutingResult result;
  for (const ProtocolMessage& msg : batch) {
    uint64_t target = std::get<SetupSharePayload>(msg.payload).target_bs;
    if (reachable.contains(target)) result.deliveries.emplace(target, msg);
  }
  result.complete = result.deliveries.size() == region.size();
  return result;
}

}  // namespace bsagg
