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

#include "bsagg/user_equipment.h"

#include "absl/strings/str_cat.h"
#include "bsagg/status_macros.h"

namespace bsagg {

UserEquipment::UserEquipment(uint64_t id, FixedPointCodec codec,
                             size_t model_dim, const KeyHomomorphicPrf& prf,
                             Prng& prng)
    : id_(id),
      codec_(codec),
      model_dim_(model_dim),
      prf_(&prf),
      secret_{RandomFieldElement(prng)},
      current_model_(model_dim, 0.0) {}

absl::StatusOr<std::vector<ProtocolMessage>> UserEquipment::Setup(
    const AccessStructure& acc, Prng& prng) {
  if (is_setup_) {
    return absl::FailedPreconditionError(
        absl::StrCat("UE ", id_, " already completed setup"));
  }
  std::vector<SecretShare> shares = Split(secret_.value, acc, prng);
  std::vector<ProtocolMessage> out;
  out.reserve(shares.size());
  for (const SecretShare& share : shares) {
    out.push_back(ProtocolMessage{
        .sender = id_,
        .iteration = 0,
        .payload =
            SetupSharePayload{.target_bs = share.x.value(), .share = share}});
  }
  is_setup_ = true;
  return out;
}

void UserEquipment::PrecomputeMasks(uint64_t num_iterations) {
  precomputed_ =
      bsagg::PrecomputeMasks(*prf_, secret_, num_iterations, model_dim_);
}

absl::StatusOr<ProtocolMessage> UserEquipment::MaskUpdate(
    std::span<const double> update, uint64_t t) {
  if (update.size() != model_dim_) {
    return absl::InvalidArgumentError(absl::StrCat(
        "update has dimension ", update.size(), ", expected ", model_dim_));
  }
  if (used_iterations_.contains(t)) {
    return absl::FailedPreconditionError(
        absl::StrCat("UE ", id_, " already used its mask for iteration ", t));
  }
  BSAGG_ASSIGN_OR_RETURN(FieldVector masked, EncodeUpdate(update, codec_));
  if (t < precomputed_.size()) {
    BSAGG_RETURN_IF_ERROR(masked.AddAssign(precomputed_[t].values));
  } else {
    BSAGG_RETURN_IF_ERROR(
        masked.AddAssign(prf_->Eval(secret_, t, model_dim_).values));
  }
  used_iterations_.insert(t);
  return ProtocolMessage{.sender = id_,
                         .iteration = t,
                         .payload = MaskedUpdatePayload{std::move(masked)}};
}

absl::Status UserEquipment::ApplyGlobalModel(const ProtocolMessage& msg) {
  const auto* payload = std::get_if<GlobalModelPayload>(&msg.payload);
  if (payload == nullptr) {
    return absl::InvalidArgumentError(
        absl::StrCat("UE expected GLOBAL_MODEL, got ",
                     std::string(MessageTypeName(msg.type()))));
  }
  if (payload->model.size() != model_dim_) {
    return absl::InvalidArgumentError("global model dimension mismatch");
  }
  current_model_ = payload->model;
  return absl::OkStatus();
}

}  // namespace bsagg
