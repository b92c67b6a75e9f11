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

// The aggregation server. Per iteration it
//   1. collects masked updates and logs their senders in the online list,
//   2. publishes the list if it is long enough,
//   3. collects one mask share per online base station, interpolates the sum
//      of the online users' masks from the t lowest-indexed shares, and
//   4. unmasks the summed updates and averages them into the global model.
// If step 2 or 3 fails it redistributes the previous global model instead.

#ifndef BSAGG_AGGREGATION_SERVER_H_
#define BSAGG_AGGREGATION_SERVER_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "bsagg/field.h"
#include "bsagg/khprf.h"
#include "bsagg/messages.h"
#include "bsagg/shamir.h"

namespace bsagg {

// Sender id the aggregation server stamps on its messages.
inline constexpr uint64_t kAggregatorId = 0;

// ceil(fraction * n), floored at 1 so an empty list never proceeds.
int MinimumOnlineCount(double fraction, int n);

// Interpolates sum_i Eval(S_i, t) from base-station mask shares. Uses the
// acc.threshold() lowest-indexed stations present in `shares`; returns
// std::nullopt when fewer are present. Payloads must match `mode` and, in
// evaluated mode, have dimension `model_dim`.
absl::StatusOr<std::optional<FieldVector>> RecoverAggregatedMask(
    const std::map<uint64_t, MaskSharePayload>& shares,
    const AccessStructure& acc, MaskShareMode mode, uint64_t t,
    size_t model_dim, const KeyHomomorphicPrf& prf);

struct AggregatorConfig {
  int num_ues = 8;
  double min_online_fraction = 1.0 / 3.0;
  AccessStructure bs_threshold;
  FixedPointCodec codec;
  size_t model_dim = 1;
  MaskShareMode mode = MaskShareMode::kEvaluated;
};

class AggregationServer {
 public:
  enum class CollectResult { kAccepted, kStale };

  // `prf` must outlive the server.
  AggregationServer(AggregatorConfig config, const KeyHomomorphicPrf& prf,
                    std::vector<double> initial_model);

  // Admits a UE whose setup shares reached every base station.
  void RegisterUe(uint64_t ue_id) { registered_.insert(ue_id); }
  bool IsRegistered(uint64_t ue_id) const {
    return registered_.contains(ue_id);
  }
  const std::set<uint64_t>& registered() const { return registered_; }

  uint64_t iteration() const { return iteration_; }
  const AggregatorConfig& config() const { return config_; }

  // Logs a MASKED_UPDATE. Updates for another iteration, or arriving after
  // the list was finalized, are dropped and counted as stale. A second update
  // from the same UE, or one from an unregistered UE, is an error.
  absl::StatusOr<CollectResult> CollectUpdate(const ProtocolMessage& msg);

  // Closes collection. Returns the ONLINE_LIST broadcast, or std::nullopt if
  // fewer than MinimumOnlineCount(min_online_fraction, num_ues) UEs are
  // online, in which case the caller falls back.
  std::optional<ProtocolMessage> FinalizeOnlineList();
  bool list_finalized() const { return list_finalized_; }
  const std::vector<uint64_t>& online_list() const { return online_list_; }

  absl::Status ReceiveMaskShare(const ProtocolMessage& msg);
  size_t num_mask_shares() const { return mask_shares_.size(); }
  std::vector<uint64_t> mask_share_senders() const;

  // std::nullopt when fewer than t base stations reported.
  absl::StatusOr<std::optional<FieldVector>> RecoverMask() const;

  // FedAvg of the online updates: (sum of masked updates - agg_mask), decoded
  // and divided by |online list|.
  absl::StatusOr<std::vector<double>> UnmaskAndAggregate(
      const FieldVector& agg_mask) const;

  // Field sum of the masked updates in the online list minus `agg_mask`,
  // before decoding.
  absl::StatusOr<FieldVector> UnmaskedFieldSum(
      const FieldVector& agg_mask) const;

  // Adds the averaged update to the global model, returns the GLOBAL_MODEL
  // broadcast and advances to the next iteration.
  absl::StatusOr<ProtocolMessage> CommitGlobalUpdate(
      std::span<const double> update);

  // Rebroadcasts the unchanged global model and advances the iteration.
  ProtocolMessage Fallback();

  const std::vector<double>& global_model() const { return global_model_; }
  int stale_updates() const { return stale_updates_; }

 private:
  ProtocolMessage GlobalModelMessage() const;
  void AdvanceIteration();

  AggregatorConfig config_;
  const KeyHomomorphicPrf* prf_;
  std::vector<double> global_model_;
  std::set<uint64_t> registered_;

  uint64_t iteration_ = 0;
  bool list_finalized_ = false;
  std::map<uint64_t, FieldVector> masked_updates_;
  std::vector<uint64_t> online_list_;
  std::map<uint64_t, MaskSharePayload> mask_shares_;
  int stale_updates_ = 0;
};

}  // namespace bsagg

#endif  // BSAGG_AGGREGATION_SERVER_H_
