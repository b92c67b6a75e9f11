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

#include "bsagg/base_station.h"

#include "absl/strings/str_cat.h"

namespace bsagg {

absl::Status BaseStation::ReceiveSetupShare(const ProtocolMessage& msg) {
  const auto* payload = std::get_if<SetupSharePayload>(&msg.payload);
  if (payload == nullptr) {
    return absl::InvalidArgumentError(
        absl::StrCat("BS ", id_, " expected SETUP_SHARE, got ",
                     std::string(MessageTypeName(msg.type()))));
  }
  if (payload->target_bs != id_) {
    return absl::InvalidArgumentError(absl::StrCat("share addressed to BS ",
                                                   payload->target_bs,
                                                   " delivered to BS ", id_));
  }
  if (payload->share.x.value() != id_) {
    return absl::InvalidArgumentError(absl::StrCat(
        "BS ", id_, " received share with x = ", payload->share.x.value()));
  }
  if (!shares_.emplace(msg.sender, payload->share).second) {
    return absl::AlreadyExistsError(
        absl::StrCat("BS ", id_, " already holds a share of UE ", msg.sender));
  }
  return absl::OkStatus();
}

absl::StatusOr<ProtocolMessage> BaseStation::ComputeMaskShare(
    const ProtocolMessage& online_list, MaskShareMode mode, size_t model_dim,
    const KeyHomomorphicPrf& prf) const {
  const auto* list = std::get_if<OnlineListPayload>(&online_list.payload);
  if (list == nullptr) {
    return absl::InvalidArgumentError(
        absl::StrCat("BS ", id_, " expected ONLINE_LIST, got ",
                     std::string(MessageTypeName(online_list.type()))));
  }
  FieldElement key_sum = FieldElement::Zero();
  for (uint64_t ue : list->ue_ids) {
    auto it = shares_.find(ue);
    if (it == shares_.end()) {
      return absl::FailedPreconditionError(
          absl::StrCat("BS ", id_, " holds no share for listed UE ", ue));
    }
    key_sum += it->second.y;
  }
  MaskSharePayload payload;
  if (mode == MaskShareMode::kEvaluated) {
    payload.value =
        prf.Eval(KhprfKey{key_sum}, online_list.iteration, model_dim).values;
  } else {
    payload.value = key_sum;
  }
  return ProtocolMessage{.sender = id_,
                         .iteration = online_list.iteration,
                         .payload = std::move(payload)};
}

}  // namespace bsagg
