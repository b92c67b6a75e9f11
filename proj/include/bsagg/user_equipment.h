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

#ifndef BSAGG_USER_EQUIPMENT_H_
#define BSAGG_USER_EQUIPMENT_H_

#include <cstdint>
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

// Client-side state machine. Holds the long-term masking key, shares it once
// with the base stations, then emits one masked update per iteration.
class UserEquipment {
 public:
  // Draws the secret key from `prng`. `prf` must outlive this object.
  UserEquipment(uint64_t id, FixedPointCodec codec, size_t model_dim,
                const KeyHomomorphicPrf& prf, Prng& prng);

  uint64_t id() const { return id_; }
  const KhprfKey& secret() const { return secret_; }
  size_t model_dim() const { return model_dim_; }

  // One SETUP_SHARE per base station, message j carrying the share at x = j
  // and addressed to BS j. Fails if called twice.
  absl::StatusOr<std::vector<ProtocolMessage>> Setup(const AccessStructure& acc,
                                                     Prng& prng);
  bool is_setup() const { return is_setup_; }

  // Caches masks for iterations [0, num_iterations).
  void PrecomputeMasks(uint64_t num_iterations);
  size_t num_precomputed() const { return precomputed_.size(); }

  // MASKED_UPDATE for iteration t: encode(update) + Eval(secret, t). Each
  // iteration's mask can be used once.
  absl::StatusOr<ProtocolMessage> MaskUpdate(std::span<const double> update,
                                             uint64_t t);

  absl::Status ApplyGlobalModel(const ProtocolMessage& msg);
  const std::vector<double>& current_model() const { return current_model_; }
  void set_current_model(std::vector<double> model) {
    current_model_ = std::move(model);
  }

 private:
  uint64_t id_;
  FixedPointCodec codec_;
  size_t model_dim_;
  const KeyHomomorphicPrf* prf_;
  KhprfKey secret_;
  bool is_setup_ = false;
  std::vector<MaskVector> precomputed_;
  std::set<uint64_t> used_iterations_;
  std::vector<double> current_model_;
};

}  // namespace bsagg

#endif  // BSAGG_USER_EQUIPMENT_H_
