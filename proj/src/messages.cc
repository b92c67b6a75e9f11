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

#include "bsagg/messages.h"

#include "absl/strings/str_cat.h"
#include "bsagg/status_macros.h"

namespace bsagg {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void WritePayload(const MessagePayload& payload, ByteWriter& out) {
  std::visit(Overloaded{
                 [&](const SetupSharePayload& p) {
                   out.PutU64(p.target_bs);
                   WriteSecretShare(p.share, out);
                 },
                 [&](const MaskedUpdatePayload& p) {
                   WriteFieldVector(p.values, out);
                 },
                 [&](const OnlineListPayload& p) {
                   out.PutU32(static_cast<uint32_t>(p.ue_ids.size()));
                   for (uint64_t id : p.ue_ids) out.PutU64(id);
                 },
                 [&](const MaskSharePayload& p) {
                   out.PutU8(static_cast<uint8_t>(p.mode()));
                   if (const auto* v = std::get_if<FieldVector>(&p.value)) {
                     WriteFieldVector(*v, out);
                   } else {
                     WriteFieldElement(std::get<FieldElement>(p.value), out);
                   }
                 },
                 [&](const GlobalModelPayload& p) {
                   out.PutU32(static_cast<uint32_t>(p.model.size()));
                   for (double v : p.model) out.PutF64(v);
                 },
             },
             payload);
}

absl::StatusOr<MessagePayload> ReadPayload(MessageType type, ByteReader& in) {
  switch (type) {
    case MessageType::kSetupShare: {
      SetupSharePayload p;
      BSAGG_ASSIGN_OR_RETURN(p.target_bs, in.ReadU64());
      BSAGG_ASSIGN_OR_RETURN(p.share, ReadSecretShare(in));
      return p;
    }
    case MessageType::kMaskedUpdate: {
      MaskedUpdatePayload p;
      BSAGG_ASSIGN_OR_RETURN(p.values, ReadFieldVector(in));
      return p;
    }
    case MessageType::kOnlineList: {
      BSAGG_ASSIGN_OR_RETURN(uint32_t count, in.ReadU32());
      if (in.remaining() / 8 < count) {
        return absl::InvalidArgumentError("online list count exceeds payload");
      }
      OnlineListPayload p;
      p.ue_ids.reserve(count);
      for (uint32_t i = 0; i < count; ++i) {
        BSAGG_ASSIGN_OR_RETURN(uint64_t id, in.ReadU64());
        if (!p.ue_ids.empty() && id <= p.ue_ids.back()) {
          return absl::InvalidArgumentError(
              "online list is not strictly increasing");
        }
        p.ue_ids.push_back(id);
      }
      return p;
    }
    case MessageType::kMaskShare: {
      BSAGG_ASSIGN_OR_RETURN(uint8_t mode, in.ReadU8());
      MaskSharePayload p;
      if (mode == static_cast<uint8_t>(MaskShareMode::kEvaluated)) {
        BSAGG_ASSIGN_OR_RETURN(FieldVector v, ReadFieldVector(in));
        p.value = std::move(v);
      } else if (mode == static_cast<uint8_t>(MaskShareMode::kCompact)) {
        BSAGG_ASSIGN_OR_RETURN(FieldElement e, ReadFieldElement(in));
        p.value = e;
      } else {
        return absl::InvalidArgumentError(
            absl::StrCat("unknown mask share mode ", mode));
      }
      return p;
    }
    case MessageType::kGlobalModel: {
      BSAGG_ASSIGN_OR_RETURN(uint32_t dim, in.ReadU32());
      if (in.remaining() / 8 < dim) {
        return absl::InvalidArgumentError("global model dim exceeds payload");
      }
      GlobalModelPayload p;
      p.model.reserve(dim);
      for (uint32_t i = 0; i < dim; ++i) {
        BSAGG_ASSIGN_OR_RETURN(double v, in.ReadF64());
        p.model.push_back(v);
      }
      return p;
    }
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown message type ", static_cast<int>(type)));
}

}  // namespace

std::string_view MessageTypeName(MessageType type) {
  switch (type) {
    case MessageType::kSetupShare:
      return "SETUP_SHARE";
    case MessageType::kMaskedUpdate:
      return "MASKED_UPDATE";
    case MessageType::kOnlineList:
      return "ONLINE_LIST";
    case MessageType::kMaskShare:
      return "MASK_SHARE";
    case MessageType::kGlobalModel:
      return "GLOBAL_MODEL";
  }
  return "UNKNOWN";
}

std::string_view MaskShareModeName(MaskShareMode mode) {
  return mode == MaskShareMode::kEvaluated ? "evaluated" : "compact";
}

absl::StatusOr<MaskShareMode> ParseMaskShareMode(std::string_view name) {
  if (name == "evaluated" || name == "EVALUATED") {
    return MaskShareMode::kEvaluated;
  }
  if (name == "compact" || name == "COMPACT") return MaskShareMode::kCompact;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown mask share mode '", std::string(name),
                   "' (expected evaluated or compact)"));
}

MessageType ProtocolMessage::type() const {
  return static_cast<MessageType>(payload.index() + 1);
}

size_t ProtocolMessage::PayloadSize() const {
  return std::visit(
      Overloaded{
          [](const SetupSharePayload&) -> size_t { return 24; },
          [](const MaskedUpdatePayload& p) -> size_t {
            return 4 + 8 * p.values.dim();
          },
          [](const OnlineListPayload& p) -> size_t {
            return 4 + 8 * p.ue_ids.size();
          },
          [](const MaskSharePayload& p) -> size_t {
            if (const auto* v = std::get_if<FieldVector>(&p.value)) {
              return 1 + 4 + 8 * v->dim();
            }
            return 1 + 8;
          },
          [](const GlobalModelPayload& p) -> size_t {
            return 4 + 8 * p.model.size();
          },
      },
      payload);
}

std::vector<uint8_t> ProtocolMessage::Serialize() const {
  ByteWriter out;
  out.PutU8(static_cast<uint8_t>(type()));
  out.PutU64(sender);
  out.PutU64(iteration);
  WritePayload(payload, out);
  return std::move(out).Release();
}

absl::StatusOr<ProtocolMessage> ProtocolMessage::Deserialize(
    std::span<const uint8_t> bytes) {
  ByteReader in(bytes);
  BSAGG_ASSIGN_OR_RETURN(uint8_t raw_type, in.ReadU8());
  if (raw_type < 1 || raw_type > 5) {
    return absl::InvalidArgumentError(
        absl::StrCat("unknown message type ", raw_type));
  }
  ProtocolMessage msg;
  BSAGG_ASSIGN_OR_RETURN(msg.sender, in.ReadU64());
  BSAGG_ASSIGN_OR_RETURN(msg.iteration, in.ReadU64());
  BSAGG_ASSIGN_OR_RETURN(msg.payload,
                         ReadPayload(static_cast<MessageType>(raw_type), in));
  BSAGG_RETURN_IF_ERROR(in.ExpectEnd());
  return msg;
}

}  // namespace bsagg
