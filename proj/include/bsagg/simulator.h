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

// Deterministic discrete-event simulation of the full protocol: one setup
// phase followed by `iterations` aggregation rounds over n UEs, k BSs and the
// aggregation server, with seeded link latency, per-round dropout and
// collection deadlines.
//
// Simulated time alone drives protocol behaviour, so (config, schedule, task)
// fully determine the event trace, outcomes, byte counts and models.
// Wall-clock compute time is measured alongside for reporting only.

#ifndef BSAGG_SIMULATOR_H_
#define BSAGG_SIMULATOR_H_

#include <cstdint>
#include <map>
#include <string_view>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "bsagg/dropout.h"
#include "bsagg/fl_task.h"
#include "bsagg/messages.h"

namespace bsagg {

struct SimConfig {
  int num_ues = 8;
  int num_bss = 4;
  int bs_threshold = 3;
  double min_online_fraction = 1.0 / 3.0;
  size_t model_dim = 11;
  int iterations = 10;
  uint64_t rng_seed = 1;
  // Link latency is base + U[0, jitter].
  double latency_base_ms = 10.0;
  double latency_jitter_ms = 5.0;
  // Length of each collection window (masked updates, then mask shares).
  double deadline_ms = 50.0;
  MaskShareMode mask_share_mode = MaskShareMode::kEvaluated;
  int frac_bits = 16;
  bool precompute_masks = true;

  absl::Status Validate() const;
};

enum class Role { kUe, kBs, kAggregator };
std::string_view RoleName(Role role);

enum class RoundOutcome { kAggregated, kFallback };
std::string_view RoundOutcomeName(RoundOutcome outcome);

enum class FallbackReason { kNone, kTooFewUes, kTooFewBss };

struct RoleTotals {
  uint64_t bytes_sent = 0;
  uint64_t bytes_received = 0;
  int messages_sent = 0;
  int messages_received = 0;
  double compute_ms = 0.0;  // wall clock; not deterministic
};

using EntityId = std::pair<Role, uint64_t>;

// Byte and message accounting happens on delivery; a message to or from an
// offline entity is never sent and never counted.
struct TrafficMetrics {
  std::map<Role, RoleTotals> per_role;
  std::map<EntityId, int> messages_sent_by;
  std::map<std::pair<Role, Role>, int> messages_by_route;  // (from, to)

  uint64_t TotalBytesSent() const;
  uint64_t TotalBytesReceived() const;
  const RoleTotals& role(Role r) const;
};

struct SetupMetrics {
  TrafficMetrics traffic;
  int admitted_ues = 0;
};

struct RoundMetrics {
  uint64_t iteration = 0;
  RoundOutcome outcome = RoundOutcome::kFallback;
  FallbackReason fallback_reason = FallbackReason::kNone;
  int online_ues = 0;            // |L_t^on|
  int scheduled_online_ues = 0;  // UEs not dropped this round
  int online_bss = 0;            // BSs not dropped this round
  int mask_shares_used = 0;      // shares received before the deadline
  int late_updates = 0;
  int late_mask_shares = 0;
  int bs_abstentions = 0;
  int af_broadcasts = 0;
  TrafficMetrics traffic;
  double training_ms = 0.0;  // local training, wall clock
  double accuracy = 0.0;     // global model after this round
  std::vector<double> global_model;
};

struct TraceEntry {
  double time_ms;
  int kind;              // 0 deliver, 1 deadline, 2 round start
  uint8_t message_type;  // MessageType for deliveries, 0 otherwise
  Role from;
  uint64_t from_id;
  Role to;
  uint64_t to_id;
  uint64_t iteration;

  bool operator==(const TraceEntry&) const = default;
};

struct SimulationResult {
  SetupMetrics setup;
  std::vector<RoundMetrics> rounds;
  std::vector<double> initial_model;
  double initial_accuracy = 0.0;
  std::vector<TraceEntry> trace;

  const std::vector<double>& final_model() const {
    return rounds.empty() ? initial_model : rounds.back().global_model;
  }
};

absl::StatusOr<SimulationResult> RunSimulation(const SimConfig& config,
                                               const DropoutSchedule& schedule,
                                               const FlTask& task);

// Adds msg.WireSize() to the sender's bytes_sent and the receiver's
// bytes_received and bumps the message counters.
void AccountMessage(const ProtocolMessage& msg, EntityId from, EntityId to,
                    TrafficMetrics& metrics);

}  // namespace bsagg

#endif  // BSAGG_SIMULATOR_H_
