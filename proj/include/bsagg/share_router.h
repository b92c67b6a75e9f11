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

#ifndef BSAGG_SHARE_ROUTER_H_
#define BSAGG_SHARE_ROUTER_H_

#include <cstdint>
#include <map>
#include <set>
#include <span>

#include "absl/status/statusor.h"
#include "bsagg/messages.h"

namespace bsagg {

struct RoutingResult {
  // Shares that reached their base station, by BS id.
  std::map<uint64_t, ProtocolMessage> deliveries;
  // True iff every base station in the region received its share. Only such
  // UEs may be admitted to aggregation.
  bool complete = false;
};

// The core network's trusted share router. Takes one UE's setup batch, which
// must hold exactly one SETUP_SHARE per BS in `region`, and forwards each
// share to its target if that BS is in `reachable`. Stateless.
absl::StatusOr<RoutingResult> RouteSetupShares(
    std::span<const ProtocolMessage> batch, const std::set<uint64_t>& region,
    const std::set<uint64_t>& reachable);

}  // namespace bsagg

#endif  // BSAGG_SHARE_ROUTER_H_
