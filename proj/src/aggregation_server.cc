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

#include "bsagg/aggregation_server.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"
#include "bsagg/status_macros.h"

namespace bsagg {

int MinimumOnlineCount(double fraction, int n) {
  // The epsilon absorbs representation error in products like (1/3) * 9.
  int count = static_cast<int>(std::ceil(fraction * n - 1e-9));
  return std::max(count, 1);
}

absl::StatusOr<std::optional<FieldVector>> RecoverAggregatedMask(
    const std::map<uint64_t, MaskSharePayload>& shares,
    const AccessStructure& acc, MaskShareMode mode, uint64_t t,
    size_t model_dim, const KeyHomomorphicPrf& prf) {
  for (const auto& [bs, payload] : shares) {
    if (payload.mode() != mode) {
      return absl::InvalidArgumentError(absl::StrCat(
          "BS ", bs, " sent a ", std::string(MaskShareModeName(payload.mode())),
          " mask share in a ", std::string(MaskShareModeName(mode)), " run"));
    }
    if (const auto* v = std::get_if<FieldVector>(&payload.value);
        v != nullptr && v->dim() != model_dim) {
      return absl::InvalidArgumentError(
          absl::StrCat("BS ", bs, " mask share has dimension ", v->dim(),
                       ", expected ", model_dim));
    }
  }
  const size_t threshold = acc.threshold();
  if (shares.size() < threshold) return std::optional<FieldVector>();

  // std::map iterates in ascending BS id, so the first t entries are the
  // lowest-indexed online stations.
  std::vector<FieldElement> points;
  std::vector<const MaskSharePayload*> chosen;
  for (const auto& [bs, payload] : shares) {
    if (points.size() == threshold) break;
    points.push_back(FieldElement::FromUint64(bs));
    chosen.push_back(&payload);
  }
  BSAGG_ASSIGN_OR_RETURN(std::vector<FieldElement> lambda,
                         LagrangeCoefficientsAtZero(points));

  if (mode == MaskShareMode::kEvaluated) {
    std::vector<FieldVector> payloads;
    payloads.reserve(chosen.size());
    for (const MaskSharePayload* p : chosen) {
      payloads.push_back(std::get<FieldVector>(p->value));
    }
    BSAGG_ASSIGN_OR_RETURN(FieldVector mask, CombineLinear(payloads, lambda));
    return std::optional<FieldVector>(std::move(mask));
  }
  // Compact: interpolate the aggregated key, then expand it once.
  FieldElement aggregated_key = FieldElement::Zero();
  for (size_t j = 0; j < chosen.size(); ++j) {
    aggregated_key += lambda[j] * std::get<FieldElement>(chosen[j]->value);
  }
  return std::optional<FieldVector>(
      prf.Eval(KhprfKey{aggregated_key}, t, model_dim).values);
}

AggregationServer::AggregationServer(AggregatorConfig config,
                                     const KeyHomomorphicPrf& prf,
                                     std::vector<double> initial_model)
    : config_(std::move(config)),
      prf_(&prf),
      global_model_(std::move(initial_model)) {}

absl::StatusOr<AggregationServer::CollectResult>
AggregationServer::CollectUpdate(const ProtocolMessage& msg) {
  const auto* payload = std::get_if<MaskedUpdatePayload>(&msg.payload);
  if (payload == nullptr) {
    return absl::InvalidArgumentError(
        absl::StrCat("aggregator expected MASKED_UPDATE, got ",
                     std::string(MessageTypeName(msg.type()))));
  }
  if (msg.iteration != iteration_ || list_finalized_) {
    ++stale_updates_;
    return CollectResult::kStale;
  }
  if (!IsRegistered(msg.sender)) {
    return absl::FailedPreconditionError(
        absl::StrCat("UE ", msg.sender, " is not registered"));
  }
  if (payload->values.dim() != config_.model_dim) {
    return absl::InvalidArgumentError(
        absl::StrCat("masked update from UE ", msg.sender, " has dimension ",
                     payload->values.dim(), ", expected ", config_.model_dim));
  }
  if (!masked_updates_.emplace(msg.sender, payload->values).second) {
    return absl::AlreadyExistsError(absl::StrCat(
        "duplicate masked update from UE ", msg.sender, " at ", iteration_));
  }
  return CollectResult::kAccepted;
}

std::optional<ProtocolMessage> AggregationServer::FinalizeOnlineList() {
  list_finalized_ = true;
  online_list_.clear();
  for (const auto& [ue, update] : masked_updates_) online_list_.push_back(ue);
  const int needed =
      MinimumOnlineCount(config_.min_online_fraction, config_.num_ues);
  if (static_cast<int>(online_list_.size()) < needed) return std::nullopt;
  return ProtocolMessage{.sender = kAggregatorId,
                         .iteration = iteration_,
                         .payload = OnlineListPayload{online_list_}};
}

absl::Status AggregationServer::ReceiveMaskShare(const ProtocolMessage& msg) {
  const auto* payload = std::get_if<MaskSharePayload>(&msg.payload);
  if (payload == nullptr) {
    return absl::InvalidArgumentError(
        absl::StrCat("aggregator expected MASK_SHARE, got ",
                     std::string(MessageTypeName(msg.type()))));
  }
  if (!list_finalized_ || msg.iteration != iteration_) {
    return absl::FailedPreconditionError(
        absl::StrCat("mask share from BS ", msg.sender, " for iteration ",
                     msg.iteration, " does not match open round ", iteration_));
  }
  if (!mask_shares_.emplace(msg.sender, *payload).second) {
    return absl::AlreadyExistsError(
        absl::StrCat("duplicate mask share from BS ", msg.sender));
  }
  return absl::OkStatus();
}

std::vector<uint64_t> AggregationServer::mask_share_senders() const {
  std::vector<uint64_t> ids;
  for (const auto& [bs, payload] : mask_shares_) ids.push_back(bs);
  return ids;
}

absl::StatusOr<std::optional<FieldVector>> AggregationServer::RecoverMask()
    const {
  return RecoverAggregatedMask(mask_shares_, config_.bs_threshold, config_.mode,
                               iteration_, config_.model_dim, *prf_);
}

absl::StatusOr<FieldVector> AggregationServer::UnmaskedFieldSum(
    const FieldVector& agg_mask) const {
  if (!list_finalized_ || online_list_.empty()) {
    return absl::FailedPreconditionError("online list not finalized");
  }
  FieldVector sum(config_.model_dim);
  for (uint64_t ue : online_list_) {
    BSAGG_RETURN_IF_ERROR(sum.AddAssign(masked_updates_.at(ue)));
  }
  BSAGG_RETURN_IF_ERROR(sum.SubAssign(agg_mask));
  return sum;
}

absl::StatusOr<std::vector<double>> AggregationServer::UnmaskAndAggregate(
    const FieldVector& agg_mask) const {
  BSAGG_ASSIGN_OR_RETURN(FieldVector field_sum, UnmaskedFieldSum(agg_mask));
  const int count = static_cast<int>(online_list_.size());
  BSAGG_ASSIGN_OR_RETURN(std::vector<double> sum,
                         DecodeSum(field_sum, config_.codec, count));
  for (double& v : sum) v /= count;
  return sum;
}

absl::StatusOr<ProtocolMessage> AggregationServer::CommitGlobalUpdate(
    std::span<const double> update) {
  if (update.size() != global_model_.size()) {
    return absl::InvalidArgumentError("global update dimension mismatch");
  }
  for (size_t i = 0; i < update.size(); ++i) global_model_[i] += update[i];
  ProtocolMessage msg = GlobalModelMessage();
  AdvanceIteration();
  return msg;
}

ProtocolMessage AggregationServer::Fallback() {
  ProtocolMessage msg = GlobalModelMessage();
  AdvanceIteration();
  return msg;
}

ProtocolMessage AggregationServer::GlobalModelMessage() const {
  return ProtocolMessage{.sender = kAggregatorId,
                         .iteration = iteration_,
                         .payload = GlobalModelPayload{global_model_}};
}

void AggregationServer::AdvanceIteration() {
  ++iteration_;
  list_finalized_ = false;
  masked_updates_.clear();
  online_list_.clear();
  mask_shares_.clear();
}

}  // namespace bsagg
