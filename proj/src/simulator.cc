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

#include "bsagg/simulator.h"

#include <chrono>
#include <queue>
#include <random>
#include <set>
#include <tuple>

#include "absl/strings/str_cat.h"
#include "bsagg/aggregation_server.h"
#include "bsagg/base_station.h"
#include "bsagg/khprf.h"
#include "bsagg/share_router.h"
#include "bsagg/status_macros.h"
#include "bsagg/user_equipment.h"
#include "glog/logging.h"

namespace bsagg {

absl::Status SimConfig::Validate() const {
  if (num_ues < 1) return absl::InvalidArgumentError("num_ues must be >= 1");
  if (num_bss < 1) return absl::InvalidArgumentError("num_bss must be >= 1");
  if (bs_threshold < 1 || bs_threshold > num_bss) {
    return absl::InvalidArgumentError(absl::StrCat(
        "bs_threshold must be in [1, num_bss], got ", bs_threshold));
  }
  if (!(min_online_fraction >= 0.0 && min_online_fraction <= 1.0)) {
    return absl::InvalidArgumentError("min_online_fraction must be in [0, 1]");
  }
  if (model_dim < 1)
    return absl::InvalidArgumentError("model_dim must be >= 1");
  if (iterations < 1) {
    return absl::InvalidArgumentError("iterations must be >= 1");
  }
  if (latency_base_ms < 0.0 || latency_jitter_ms < 0.0) {
    return absl::InvalidArgumentError("latency parameters must be >= 0");
  }
  if (!(deadline_ms > latency_base_ms)) {
    return absl::InvalidArgumentError(
        "deadline_ms must exceed latency_base_ms");
  }
  return absl::OkStatus();
}

std::string_view RoleName(Role role) {
  switch (role) {
    case Role::kUe:
      return "ue";
    case Role::kBs:
      return "bs";
    case Role::kAggregator:
      return "af";
  }
  return "unknown";
}

std::string_view RoundOutcomeName(RoundOutcome outcome) {
  return outcome == RoundOutcome::kAggregated ? "AGGREGATED" : "FALLBACK";
}

uint64_t TrafficMetrics::TotalBytesSent() const {
  uint64_t total = 0;
  for (const auto& [role, totals] : per_role) total += totals.bytes_sent;
  return total;
}

uint64_t TrafficMetrics::TotalBytesReceived() const {
  uint64_t total = 0;
  for (const auto& [role, totals] : per_role) total += totals.bytes_received;
  return total;
}

const RoleTotals& TrafficMetrics::role(Role r) const {
  static const RoleTotals kEmpty;
  auto it = per_role.find(r);
  return it == per_role.end() ? kEmpty : it->second;
}

void AccountMessage(const ProtocolMessage& msg, EntityId from, EntityId to,
                    TrafficMetrics& metrics) {
  const uint64_t bytes = msg.WireSize();
  RoleTotals& sender = metrics.per_role[from.first];
  sender.bytes_sent += bytes;
  ++sender.messages_sent;
  RoleTotals& receiver = metrics.per_role[to.first];
  receiver.bytes_received += bytes;
  ++receiver.messages_received;
  ++metrics.messages_sent_by[from];
  ++metrics.messages_by_route[{from.first, to.first}];
}

namespace {

enum class EventKind { kDeliver = 0, kDeadline = 1, kRoundStart = 2 };
enum class DeadlineKind { kUpdates, kMaskShares };

struct Event {
  double time_ms = 0.0;
  EventKind kind = EventKind::kDeliver;
  EntityId from{Role::kAggregator, kAggregatorId};
  uint64_t seq = 0;
  EntityId to{Role::kAggregator, kAggregatorId};
  ProtocolMessage msg{};
  DeadlineKind deadline = DeadlineKind::kUpdates;
  uint64_t iteration = 0;
};

// Min-heap order: time, then kind rank, then sender, then insertion order.
struct LaterEvent {
  bool operator()(const Event& a, const Event& b) const {
    return std::tie(a.time_ms, a.kind, a.from, a.seq) >
           std::tie(b.time_ms, b.kind, b.from, b.seq);
  }
};

class ScopedTimer {
 public:
  explicit ScopedTimer(double& sink)
      : sink_(sink), start_(std::chrono::steady_clock::now()) {}
  ~ScopedTimer() {
    sink_ += std::chrono::duration<double, std::milli>(
                 std::chrono::steady_clock::now() - start_)
                 .count();
  }

 private:
  double& sink_;
  std::chrono::steady_clock::time_point start_;
};

Prng StreamPrng(uint64_t seed, uint32_t stream) {
  std::seed_seq seq{static_cast<uint32_t>(seed),
                    static_cast<uint32_t>(seed >> 32), stream};
  return Prng(seq);
}

class Simulation {
 public:
  Simulation(const SimConfig& config, const DropoutSchedule& schedule,
             const FlTask& task, FixedPointCodec codec, AccessStructure acc)
      : config_(config),
        schedule_(schedule),
        task_(task),
        acc_(acc),
        latency_prng_(StreamPrng(config.rng_seed, 3)),
        aggregator_(
            AggregatorConfig{.num_ues = config.num_ues,
                             .min_online_fraction = config.min_online_fraction,
                             .bs_threshold = acc,
                             .codec = codec,
                             .model_dim = config.model_dim,
                             .mode = config.mask_share_mode},
            prf_, std::vector<double>(config.model_dim, 0.0)) {
    Prng key_prng = StreamPrng(config.rng_seed, 1);
    for (int i = 0; i < config.num_ues; ++i) {
      ues_.emplace_back(i, codec, config.model_dim, prf_, key_prng);
      all_ues_.insert(i);
    }
    for (int j = 1; j <= config.num_bss; ++j) {
      bss_.emplace(j, BaseStation(j));
      all_bss_.insert(j);
    }
  }

  absl::StatusOr<SimulationResult> Run() {
    result_.initial_model = aggregator_.global_model();
    result_.initial_accuracy = Evaluate(result_.initial_model, task_.test_set);
    BSAGG_RETURN_IF_ERROR(RunSetup());
    Schedule(Event{.time_ms = MaxLatency(),
                   .kind = EventKind::kRoundStart,
                   .iteration = 0});
    while (!queue_.empty()) {
      Event event = queue_.top();
      queue_.pop();
      now_ms_ = event.time_ms;
      Trace(event);
      switch (event.kind) {
        case EventKind::kDeliver:
          BSAGG_RETURN_IF_ERROR(OnDeliver(event));
          break;
        case EventKind::kDeadline:
          BSAGG_RETURN_IF_ERROR(OnDeadline(event));
          break;
        case EventKind::kRoundStart:
          BSAGG_RETURN_IF_ERROR(OnRoundStart(event.iteration));
          break;
      }
    }
    return std::move(result_);
  }

 private:
  double MaxLatency() const {
    return config_.latency_base_ms + config_.latency_jitter_ms;
  }

  double DrawLatency() {
    double u = static_cast<double>(latency_prng_() >> 11) * 0x1.0p-53;
    return config_.latency_base_ms + u * config_.latency_jitter_ms;
  }

  void Schedule(Event event) {
    event.seq = next_seq_++;
    queue_.push(std::move(event));
  }

  void Send(ProtocolMessage msg, EntityId from, EntityId to) {
    Schedule(Event{.time_ms = now_ms_ + DrawLatency(),
                   .kind = EventKind::kDeliver,
                   .from = from,
                   .to = to,
                   .msg = std::move(msg)});
  }

  void Trace(const Event& e) {
    result_.trace.push_back(
        TraceEntry{.time_ms = e.time_ms,
                   .kind = static_cast<int>(e.kind),
                   .message_type = e.kind == EventKind::kDeliver
                                       ? static_cast<uint8_t>(e.msg.type())
                                       : uint8_t{0},
                   .from = e.from.first,
                   .from_id = e.from.second,
                   .to = e.to.first,
                   .to_id = e.to.second,
                   .iteration = e.kind == EventKind::kDeliver ? e.msg.iteration
                                                              : e.iteration});
  }

  RoundMetrics& Round(uint64_t t) { return result_.rounds.at(t); }

  TrafficMetrics& TrafficFor(const ProtocolMessage& msg) {
    if (msg.type() == MessageType::kSetupShare) return result_.setup.traffic;
    return Round(msg.iteration).traffic;
  }

  absl::Status RunSetup() {
    Prng split_prng = StreamPrng(config_.rng_seed, 2);
    RoleTotals& ue_totals = result_.setup.traffic.per_role[Role::kUe];
    for (UserEquipment& ue : ues_) {
      std::vector<ProtocolMessage> batch;
      {
        ScopedTimer timer(ue_totals.compute_ms);
        BSAGG_ASSIGN_OR_RETURN(batch, ue.Setup(acc_, split_prng));
        if (config_.precompute_masks) ue.PrecomputeMasks(config_.iterations);
      }
      std::set<uint64_t> reachable;
      std::set<uint64_t> blocked = schedule_.BlockedSetupShares(ue.id());
      for (uint64_t bs : all_bss_) {
        if (!blocked.contains(bs)) reachable.insert(bs);
      }
      BSAGG_ASSIGN_OR_RETURN(RoutingResult routed,
                             RouteSetupShares(batch, all_bss_, reachable));
      if (!routed.complete) {
        VLOG(1) << "UE " << ue.id() << " setup incomplete ("
                << routed.deliveries.size() << "/" << all_bss_.size()
                << " shares delivered); not admitted";
        continue;
      }
      for (auto& [bs, msg] : routed.deliveries) {
        Send(std::move(msg), {Role::kUe, ue.id()}, {Role::kBs, bs});
      }
      aggregator_.RegisterUe(ue.id());
    }
    result_.setup.admitted_ues =
        static_cast<int>(aggregator_.registered().size());
    return absl::OkStatus();
  }

  absl::Status OnRoundStart(uint64_t t) {
    current_ = ApplyDropout(schedule_, t, all_ues_, all_bss_);
    RoundMetrics metrics;
    metrics.iteration = t;
    metrics.online_bss = static_cast<int>(current_.bss.size());
    result_.rounds.push_back(std::move(metrics));
    RoundMetrics& round = Round(t);
    RoleTotals& ue_totals = round.traffic.per_role[Role::kUe];

    for (uint64_t id : current_.ues) {
      if (!aggregator_.IsRegistered(id)) continue;
      ++round.scheduled_online_ues;
      UserEquipment& ue = ues_[id];
      std::vector<double> delta;
      {
        ScopedTimer timer(round.training_ms);
        delta = LocalTrain(ue.current_model(), task_.shards[id],
                           task_.learning_rate, task_.local_epochs,
                           task_.clip_bound);
      }
      ProtocolMessage msg;
      {
        ScopedTimer timer(ue_totals.compute_ms);
        BSAGG_ASSIGN_OR_RETURN(msg, ue.MaskUpdate(delta, t));
      }
      Send(std::move(msg), {Role::kUe, id}, {Role::kAggregator, kAggregatorId});
    }
    Schedule(Event{.time_ms = now_ms_ + config_.deadline_ms,
                   .kind = EventKind::kDeadline,
                   .deadline = DeadlineKind::kUpdates,
                   .iteration = t});
    return absl::OkStatus();
  }

  absl::Status OnDeliver(const Event& event) {
    const ProtocolMessage& msg = event.msg;
    AccountMessage(msg, event.from, event.to, TrafficFor(msg));
    switch (msg.type()) {
      case MessageType::kSetupShare: {
        RoleTotals& bs_totals = result_.setup.traffic.per_role[Role::kBs];
        ScopedTimer timer(bs_totals.compute_ms);
        return bss_.at(event.to.second).ReceiveSetupShare(msg);
      }
      case MessageType::kMaskedUpdate: {
        RoundMetrics& round = Round(msg.iteration);
        ScopedTimer timer(round.traffic.per_role[Role::kAggregator].compute_ms);
        BSAGG_ASSIGN_OR_RETURN(AggregationServer::CollectResult collected,
                               aggregator_.CollectUpdate(msg));
        if (collected == AggregationServer::CollectResult::kStale) {
          ++round.late_updates;
        }
        return absl::OkStatus();
      }
      case MessageType::kOnlineList: {
        RoundMetrics& round = Round(msg.iteration);
        absl::StatusOr<ProtocolMessage> share;
        {
          ScopedTimer timer(round.traffic.per_role[Role::kBs].compute_ms);
          share = bss_.at(event.to.second)
                      .ComputeMaskShare(msg, config_.mask_share_mode,
                                        config_.model_dim, prf_);
        }
        if (absl::IsFailedPrecondition(share.status())) {
          VLOG(1) << "BS " << event.to.second
                  << " abstains: " << share.status().message();
          ++round.bs_abstentions;
          return absl::OkStatus();
        }
        if (!share.ok()) return share.status();
        Send(*std::move(share), event.to, {Role::kAggregator, kAggregatorId});
        return absl::OkStatus();
      }
      case MessageType::kMaskShare: {
        RoundMetrics& round = Round(msg.iteration);
        absl::Status status = aggregator_.ReceiveMaskShare(msg);
        if (absl::IsFailedPrecondition(status)) {
          ++round.late_mask_shares;
          return absl::OkStatus();
        }
        return status;
      }
      case MessageType::kGlobalModel:
        return ues_[event.to.second].ApplyGlobalModel(msg);
    }
    return absl::InternalError("unhandled message type");
  }

  absl::Status OnDeadline(const Event& event) {
    RoundMetrics& round = Round(event.iteration);
    double& af_compute = round.traffic.per_role[Role::kAggregator].compute_ms;
    if (event.deadline == DeadlineKind::kUpdates) {
      std::optional<ProtocolMessage> list;
      {
        ScopedTimer timer(af_compute);
        list = aggregator_.FinalizeOnlineList();
      }
      round.online_ues = static_cast<int>(aggregator_.online_list().size());
      if (!list.has_value()) {
        return FinishRound(aggregator_.Fallback(), RoundOutcome::kFallback,
                           FallbackReason::kTooFewUes);
      }
      ++round.af_broadcasts;
      for (uint64_t bs : current_.bss) {
        Send(*list, {Role::kAggregator, kAggregatorId}, {Role::kBs, bs});
      }
      Schedule(Event{.time_ms = now_ms_ + config_.deadline_ms,
                     .kind = EventKind::kDeadline,
                     .deadline = DeadlineKind::kMaskShares,
                     .iteration = event.iteration});
      return absl::OkStatus();
    }

    round.mask_shares_used = static_cast<int>(aggregator_.num_mask_shares());
    std::optional<FieldVector> mask;
    std::vector<double> update;
    {
      ScopedTimer timer(af_compute);
      BSAGG_ASSIGN_OR_RETURN(mask, aggregator_.RecoverMask());
      if (mask.has_value()) {
        BSAGG_ASSIGN_OR_RETURN(update, aggregator_.UnmaskAndAggregate(*mask));
      }
    }
    if (!mask.has_value()) {
      return FinishRound(aggregator_.Fallback(), RoundOutcome::kFallback,
                         FallbackReason::kTooFewBss);
    }
    BSAGG_ASSIGN_OR_RETURN(ProtocolMessage global,
                           aggregator_.CommitGlobalUpdate(update));
    return FinishRound(std::move(global), RoundOutcome::kAggregated,
                       FallbackReason::kNone);
  }

  absl::Status FinishRound(ProtocolMessage global, RoundOutcome outcome,
                           FallbackReason reason) {
    RoundMetrics& round = Round(global.iteration);
    round.outcome = outcome;
    round.fallback_reason = reason;
    ++round.af_broadcasts;
    round.global_model = aggregator_.global_model();
    round.accuracy = Evaluate(round.global_model, task_.test_set);
    VLOG(1) << "iteration " << global.iteration << ": "
            << RoundOutcomeName(outcome) << " |L|=" << round.online_ues
            << " bss=" << round.online_bss << " acc=" << round.accuracy;
    for (uint64_t id : current_.ues) {
      if (!aggregator_.IsRegistered(id)) continue;
      Send(global, {Role::kAggregator, kAggregatorId}, {Role::kUe, id});
    }
    const uint64_t next = global.iteration + 1;
    if (next < static_cast<uint64_t>(config_.iterations)) {
      Schedule(Event{.time_ms = now_ms_ + MaxLatency(),
                     .kind = EventKind::kRoundStart,
                     .iteration = next});
    }
    return absl::OkStatus();
  }

  const SimConfig& config_;
  const DropoutSchedule& schedule_;
  const FlTask& task_;
  AccessStructure acc_;
  LinearHashPrf prf_;
  Prng latency_prng_;

  std::vector<UserEquipment> ues_;
  std::map<uint64_t, BaseStation> bss_;
  AggregationServer aggregator_;
  std::set<uint64_t> all_ues_;
  std::set<uint64_t> all_bss_;

  std::priority_queue<Event, std::vector<Event>, LaterEvent> queue_;
  uint64_t next_seq_ = 0;
  double now_ms_ = 0.0;
  OnlineSets current_;
  SimulationResult result_;
};

}  // namespace

absl::StatusOr<SimulationResult> RunSimulation(const SimConfig& config,
                                               const DropoutSchedule& schedule,
                                               const FlTask& task) {
  BSAGG_RETURN_IF_ERROR(config.Validate());
  BSAGG_RETURN_IF_ERROR(schedule.Validate(config.num_ues, config.num_bss));
  if (task.model_dim() != config.model_dim) {
    return absl::InvalidArgumentError(
        absl::StrCat("task model dimension ", task.model_dim(),
                     " does not match config model_dim ", config.model_dim));
  }
  if (task.shards.size() != static_cast<size_t>(config.num_ues)) {
    return absl::InvalidArgumentError(
        absl::StrCat("task has ", task.shards.size(), " shards for ",
                     config.num_ues, " UEs"));
  }
  BSAGG_ASSIGN_OR_RETURN(
      FixedPointCodec codec,
      FixedPointCodec::Create(config.frac_bits, task.clip_bound,
                              config.num_ues));
  BSAGG_ASSIGN_OR_RETURN(
      AccessStructure acc,
      AccessStructure::Create(config.bs_threshold, config.num_bss));
  Simulation simulation(config, schedule, task, codec, acc);
  return simulation.Run();
}

}  // namespace bsagg
