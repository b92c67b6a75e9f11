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

// Protocol messages and their bit-exact little-endian wire format.
//
//   header        = type(1) | sender(8) | iteration(8)
//   SETUP_SHARE   = target_bs(8) | share.x(8) | share.y(8)
//   MASKED_UPDATE = dim(4) | elements(8 each)
//   ONLINE_LIST   = count(4) | sorted UE ids(8 each)
//   MASK_SHARE    = mode(1) | dim(4) | elements(8 each)    (evaluated)
//                   mode(1) | scalar(8)                    (compact)
//   GLOBAL_MODEL  = dim(4) | IEEE-754 binary64 values(8 each)
//
// Serialized length is the unit of bandwidth accounting.

#ifndef BSAGG_MESSAGES_H_
#define BSAGG_MESSAGES_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "absl/status/statusor.h"
#include "bsagg/field.h"
#include "bsagg/shamir.h"

namespace bsagg {

enum class MessageType : uint8_t {
  kSetupShare = 1,
  kMaskedUpdate = 2,
  kOnlineList = 3,
  kMaskShare = 4,
  kGlobalModel = 5,
};

std::string_view MessageTypeName(MessageType type);

// How a base station reports its per-round mask share. All parties in a run
// use the same mode.
//
// kCompact sends the summed key share instead of its PRF expansion. This
// saves bandwidth but lets the aggregator interpolate the aggregated key of
// each online list; two rounds whose lists differ by one user reveal that
// user's key. kEvaluated is the default.
enum class MaskShareMode : uint8_t {
  kEvaluated = 0,
  kCompact = 1,
};

std::string_view MaskShareModeName(MaskShareMode mode);
absl::StatusOr<MaskShareMode> ParseMaskShareMode(std::string_view name);

inline constexpr size_t kHeaderSize = 17;

struct SetupSharePayload {
  uint64_t target_bs = 0;
  SecretShare share;

  bool operator==(const SetupSharePayload&) const = default;
};

struct MaskedUpdatePayload {
  FieldVector values;

  bool operator==(const MaskedUpdatePayload&) const = default;
};

struct OnlineListPayload {
  std::vector<uint64_t> ue_ids;  // strictly increasing

  bool operator==(const OnlineListPayload&) const = default;
};

struct MaskSharePayload {
  // FieldVector in evaluated mode, FieldElement (summed key share) in compact.
  std::variant<FieldVector, FieldElement> value;

  MaskShareMode mode() const {
    return std::holds_alternative<FieldVector>(value)
               ? MaskShareMode::kEvaluated
               : MaskShareMode::kCompact;
  }
  bool operator==(const MaskSharePayload&) const = default;
};

struct GlobalModelPayload {
  std::vector<double> model;

  bool operator==(const GlobalModelPayload&) const = default;
};

using MessagePayload =
    std::variant<SetupSharePayload, MaskedUpdatePayload, OnlineListPayload,
                 MaskSharePayload, GlobalModelPayload>;

struct ProtocolMessage {
  uint64_t sender = 0;
  uint64_t iteration = 0;
  MessagePayload payload;

  MessageType type() const;

  std::vector<uint8_t> Serialize() const;
  size_t WireSize() const { return kHeaderSize + PayloadSize(); }
  size_t PayloadSize() const;

  // Rejects unknown types, truncation, trailing bytes, non-canonical field
  // elements and unsorted online lists.
  static absl::StatusOr<ProtocolMessage> Deserialize(
      std::span<const uint8_t> bytes);

  bool operator==(const ProtocolMessage&) const = default;
};

}  // namespace bsagg

#endif  // BSAGG_MESSAGES_H_
