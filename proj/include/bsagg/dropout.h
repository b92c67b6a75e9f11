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

#ifndef BSAGG_DROPOUT_H_
#define BSAGG_DROPOUT_H_

#include <cstdint>
#include <map>
#include <set>

#include "absl/status/status.h"

namespace bsagg {

// Which UEs and BSs are offline in each iteration. An offline entity is out
// for the whole iteration. Drops come from explicit per-iteration lists,
// "from iteration t onward" lists, and an optional seeded coin per
// (iteration, entity). Setup-time share loss is configured separately.
class DropoutSchedule {
 public:
  DropoutSchedule() = default;

  static DropoutSchedule Probabilistic(double ue_probability,
                                       double bs_probability, uint64_t seed);

  DropoutSchedule& DropUe(uint64_t t, uint64_t ue);
  DropoutSchedule& DropBs(uint64_t t, uint64_t bs);
  DropoutSchedule& DropUeFrom(uint64_t t, uint64_t ue);
  DropoutSchedule& DropBsFrom(uint64_t t, uint64_t bs);
  // The setup share of `ue` addressed to `bs` is never delivered.
  DropoutSchedule& BlockSetupShare(uint64_t ue, uint64_t bs);

  bool IsUeDropped(uint64_t t, uint64_t ue) const;
  bool IsBsDropped(uint64_t t, uint64_t bs) const;
  std::set<uint64_t> BlockedSetupShares(uint64_t ue) const;

  // Every explicitly named UE must lie in [0, num_ues) and every BS in
  // [1, num_bss].
  absl::Status Validate(int num_ues, int num_bss) const;

 private:
  enum class Kind : uint64_t { kUe = 1, kBs = 2 };

  bool CoinDrop(uint64_t t, Kind kind, uint64_t id, double probability) const;

  std::map<uint64_t, std::set<uint64_t>> ue_drops_;
  std::map<uint64_t, std::set<uint64_t>> bs_drops_;
  std::map<uint64_t, uint64_t> ue_drop_from_;  // id -> first iteration
  std::map<uint64_t, uint64_t> bs_drop_from_;
  std::map<uint64_t, std::set<uint64_t>> blocked_setup_;
  double ue_probability_ = 0.0;
  double bs_probability_ = 0.0;
  uint64_t seed_ = 0;
};

struct OnlineSets {
  std::set<uint64_t> ues;
  std::set<uint64_t> bss;
};

// Configured entities minus those the schedule drops at iteration t.
OnlineSets ApplyDropout(const DropoutSchedule& schedule, uint64_t t,
                        const std::set<uint64_t>& ues,
                        const std::set<uint64_t>& bss);

}  // namespace bsagg

#endif  // BSAGG_DROPOUT_H_
