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

#include "bsagg/dropout.h"

#include <random>

#include "absl/strings/str_cat.h"

namespace bsagg {

DropoutSchedule DropoutSchedule::Probabilistic(double ue_probability,
                                               double bs_probability,
                                               uint64_t seed) {
  DropoutSchedule schedule;
  schedule.ue_probability_ = ue_probability;
  schedule.bs_probability_ = bs_probability;
  schedule.seed_ = seed;
  return schedule;
}

DropoutSchedule& DropoutSchedule::DropUe(uint64_t t, uint64_t ue) {
  ue_drops_[t].insert(ue);
  return *this;
}

DropoutSchedule& DropoutSchedule::DropBs(uint64_t t, uint64_t bs) {
  bs_drops_[t].insert(bs);
  return *this;
}

DropoutSchedule& DropoutSchedule::DropUeFrom(uint64_t t, uint64_t ue) {
  ue_drop_from_[ue] = t;
  return *this;
}

DropoutSchedule& DropoutSchedule::DropBsFrom(uint64_t t, uint64_t bs) {
  bs_drop_from_[bs] = t;
  return *this;
}

DropoutSchedule& DropoutSchedule::BlockSetupShare(uint64_t ue, uint64_t bs) {
  blocked_setup_[ue].insert(bs);
  return *this;
}

bool DropoutSchedule::CoinDrop(uint64_t t, Kind kind, uint64_t id,
                               double probability) const {
  if (probability <= 0.0) return false;
  // One independent stream per (seed, iteration, entity) keeps the answer a
  // pure function of its arguments.
  std::seed_seq seq{
      static_cast<uint32_t>(seed_),   static_cast<uint32_t>(seed_ >> 32),
      static_cast<uint32_t>(t),       static_cast<uint32_t>(t >> 32),
      static_cast<uint32_t>(kind),    static_cast<uint32_t>(id),
      static_cast<uint32_t>(id >> 32)};
  std::mt19937_64 rng(seq);
  double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return u < probability;
}

bool DropoutSchedule::IsUeDropped(uint64_t t, uint64_t ue) const {
  if (auto it = ue_drops_.find(t);
      it != ue_drops_.end() && it->second.contains(ue)) {
    return true;
  }
  if (auto it = ue_drop_from_.find(ue);
      it != ue_drop_from_.end() && t >= it->second) {
    return true;
  }
  return CoinDrop(t, Kind::kUe, ue, ue_probability_);
}

bool DropoutSchedule::IsBsDropped(uint64_t t, uint64_t bs) const {
  if (auto it = bs_drops_.find(t);
      it != bs_drops_.end() && it->second.contains(bs)) {
    return true;
  }
  if (auto it = bs_drop_from_.find(bs);
      it != bs_drop_from_.end() && t >= it->second) {
    return true;
  }
  return CoinDrop(t, Kind::kBs, bs, bs_probability_);
}

std::set<uint64_t> DropoutSchedule::BlockedSetupShares(uint64_t ue) const {
  auto it = blocked_setup_.find(ue);
  return it == blocked_setup_.end() ? std::set<uint64_t>() : it->second;
}

absl::Status DropoutSchedule::Validate(int num_ues, int num_bss) const {
  auto check_ue = [&](uint64_t ue) -> absl::Status {
    if (ue >= static_cast<uint64_t>(num_ues)) {
      return absl::InvalidArgumentError(
          absl::StrCat("dropout schedule names UE ", ue, " but only ", num_ues,
                       " are configured"));
    }
    return absl::OkStatus();
  };
  auto check_bs = [&](uint64_t bs) -> absl::Status {
    if (bs < 1 || bs > static_cast<uint64_t>(num_bss)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "dropout schedule names BS ", bs, " outside [1, ", num_bss, "]"));
    }
    return absl::OkStatus();
  };
  for (const auto& [t, ues] : ue_drops_) {
    for (uint64_t ue : ues) {
      if (auto s = check_ue(ue); !s.ok()) return s;
    }
  }
  for (const auto& [t, bss] : bs_drops_) {
    for (uint64_t bs : bss) {
      if (auto s = check_bs(bs); !s.ok()) return s;
    }
  }
  for (const auto& [ue, t] : ue_drop_from_) {
    if (auto s = check_ue(ue); !s.ok()) return s;
  }
  for (const auto& [bs, t] : bs_drop_from_) {
    if (auto s = check_bs(bs); !s.ok()) return s;
  }
  for (const auto& [ue, bss] : blocked_setup_) {
    if (auto s = check_ue(ue); !s.ok()) return s;
    for (uint64_t bs : bss) {
      if (auto s = check_bs(bs); !s.ok()) return s;
    }
  }
  for (double p : {ue_probability_, bs_probability_}) {
    if (!(p >= 0.0 && p <= 1.0)) {
      return absl::InvalidArgumentError(
          absl::StrCat("dropout probability ", p, " outside [0, 1]"));
    }
  }
  return absl::OkStatus();
}

OnlineSets ApplyDropout(const DropoutSchedule& schedule, uint64_t t,
                        const std::set<uint64_t>& ues,
                        const std::set<uint64_t>& bss) {
  OnlineSets online;
  for (uint64_t ue : ues) {
    if (!schedule.IsUeDropped(t, ue)) online.ues.insert(ue);
  }
  for (uint64_t bs : bss) {
    if (!schedule.IsBsDropped(t, bs)) online.bss.insert(bs);
  }
  return online;
}

}  // namespace bsagg
