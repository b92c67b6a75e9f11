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

#ifndef BSAGG_BASE_STATION_H_
#define BSAGG_BASE_STATION_H_

#include <cstdint>
#include <map>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "bsagg/khprf.h"
#include "bsagg/messages.h"
#include "bsagg/shamir.h"

namespace bsagg {

// Base station j. Stores the share at x = j of every registered UE's key and
// answers each online list with a single mask share.
class BaseStation {
 public:
  explicit BaseStation(uint64_t id) : id_(id) {}

  uint64_t id() const { return id_; }

  // Accepts a routed SETUP_SHARE addressed to this station. Rejects shares
  // for another station, shares whose x differs from the station id, and a
  // second share from the same UE.
  absl::Status ReceiveSetupShare(const ProtocolMessage& msg);

  bool HasShareFor(uint64_t ue_id) const { return shares_.contains(ue_id); }
  size_t num_shares() const { return shares_.size(); }

  // MASK_SHARE for the list's iteration. Evaluated mode sends
  // Eval(sum of held shares, t); compact mode sends the sum itself. Fails with
  // kFailedPrecondition if any listed UE has no share here, in which case the
  // station abstains for the round.
  absl::StatusOr<ProtocolMessage> ComputeMaskShare(
      const ProtocolMessage& online_list, MaskShareMode mode, size_t model_dim,
      const KeyHomomorphicPrf& prf) const;

 private:
  uint64_t id_;
  std::map<uint64_t, SecretShare> shares_;  // by UE id
};

}  // namespace bsagg

#endif  // BSAGG_BASE_STATION_H_
