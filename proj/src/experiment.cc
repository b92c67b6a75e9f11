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

#include "bsagg/experiment.h"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <set>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "bsagg/aggregation_server.h"
#include "bsagg/khprf.h"
#include "bsagg/status_macros.h"
#include "glog/logging.h"
#include "json.hpp"

namespace bsagg {

namespace {

using nlohmann::json;

std::string_view SweepAxisName(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kNone:
      return "none";
    case SweepAxis::kUeDropout:
      return "ue_dropout";
    case SweepAxis::kBsDropout:
      return "bs_dropout";
  }
  return "none";
}

absl::StatusOr<SweepAxis> ParseSweepAxis(std::string_view name) {
  if (name == "none") return SweepAxis::kNone;
  if (name == "ue_dropout") return SweepAxis::kUeDropout;
  if (name == "bs_dropout") return SweepAxis::kBsDropout;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown sweep '", std::string(name),
                   "' (expected none, ue_dropout or bs_dropout)"));
}

absl::StatusOr<OutputFormat> ParseOutputFormat(std::string_view name) {
  if (name == "csv") return OutputFormat::kCsv;
  if (name == "json") return OutputFormat::kJson;
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown format '", std::string(name), "' (expected csv or json)"));
}

absl::Status ApplyKey(const std::string& key, const json& value,
                      ExperimentSpec& spec) {
  SimConfig& sim = spec.sim;
  FlTaskOptions& task = spec.task;
  if (key == "num_ues") {
    sim.num_ues = value.get<int>();
  } else if (key == "num_bss") {
    sim.num_bss = value.get<int>();
  } else if (key == "bs_threshold") {
    sim.bs_threshold = value.get<int>();
  } else if (key == "min_online_fraction") {
    sim.min_online_fraction = value.get<double>();
  } else if (key == "model_dim") {
    int d = value.get<int>();
    if (d < 2) {
      return absl::InvalidArgumentError(
          "model_dim must be >= 2 (features plus bias)");
    }
    sim.model_dim = d;
    task.feature_dim = d - 1;
  } else if (key == "iterations") {
    sim.iterations = value.get<int>();
  } else if (key == "latency_base_ms") {
    sim.latency_base_ms = value.get<double>();
  } else if (key == "latency_jitter_ms") {
    sim.latency_jitter_ms = value.get<double>();
  } else if (key == "deadline_ms") {
    sim.deadline_ms = value.get<double>();
  } else if (key == "mask_share_mode") {
    BSAGG_ASSIGN_OR_RETURN(sim.mask_share_mode,
                           ParseMaskShareMode(value.get<std::string>()));
  } else if (key == "frac_bits") {
    sim.frac_bits = value.get<int>();
  } else if (key == "precompute_masks") {
    sim.precompute_masks = value.get<bool>();
  } else if (key == "samples_per_ue") {
    task.samples_per_ue = value.get<int>();
  } else if (key == "test_samples") {
    task.test_samples = value.get<int>();
  } else if (key == "separation") {
    task.separation = value.get<double>();
  } else if (key == "learning_rate") {
    task.learning_rate = value.get<double>();
  } else if (key == "local_epochs") {
    task.local_epochs = value.get<int>();
  } else if (key == "clip_bound") {
    task.clip_bound = value.get<double>();
  } else if (key == "sweep") {
    BSAGG_ASSIGN_OR_RETURN(spec.sweep,
                           ParseSweepAxis(value.get<std::string>()));
  } else if (key == "sweep_min") {
    spec.sweep_min = value.get<int>();
  } else if (key == "sweep_max") {
    spec.sweep_max = value.get<int>();
  } else if (key == "seeds") {
    spec.seeds = value.get<std::vector<uint64_t>>();
  } else if (key == "ue_dropout_prob") {
    spec.ue_dropout_prob = value.get<double>();
  } else if (key == "bs_dropout_prob") {
    spec.bs_dropout_prob = value.get<double>();
  } else if (key == "dropped_ues") {
    spec.dropped_ues = value.get<std::vector<uint64_t>>();
  } else if (key == "dropped_bss") {
    spec.dropped_bss = value.get<std::vector<uint64_t>>();
  } else if (key == "output") {
    spec.output_path = value.get<std::string>();
  } else if (key == "format") {
    BSAGG_ASSIGN_OR_RETURN(spec.format,
                           ParseOutputFormat(value.get<std::string>()));
  } else {
    return absl::InvalidArgumentError(
        absl::StrCat("unknown config key '", key, "'"));
  }
  return absl::OkStatus();
}

std::string FormatDouble(double v) { return absl::StrFormat("%.10g", v); }

}  // namespace

absl::Status ExperimentSpec::Validate() const {
  BSAGG_RETURN_IF_ERROR(sim.Validate());
  if (sim.model_dim != static_cast<size_t>(task.feature_dim) + 1) {
    return absl::InvalidArgumentError("model_dim must equal feature_dim + 1");
  }
  if (seeds.empty()) {
    return absl::InvalidArgumentError("at least one seed is required");
  }
  if (task.samples_per_ue < 1 || task.test_samples < 1) {
    return absl::InvalidArgumentError(
        "samples_per_ue and test_samples must be >= 1");
  }
  if (task.local_epochs < 0) {
    return absl::InvalidArgumentError("local_epochs must be >= 0");
  }
  if (sweep != SweepAxis::kNone) {
    const int limit =
        sweep == SweepAxis::kUeDropout ? sim.num_ues - 2 : sim.num_bss - 2;
    const int hi = sweep_max < 0 ? limit : sweep_max;
    if (sweep_min < 0 || sweep_min > hi || hi > limit) {
      return absl::InvalidArgumentError(
          absl::StrCat("sweep range [", sweep_min, ", ", hi, "] outside [0, ",
                       limit, "] for ", std::string(SweepAxisName(sweep))));
    }
  }
  std::set<uint64_t> unique_seeds(seeds.begin(), seeds.end());
  if (unique_seeds.size() != seeds.size()) {
    return absl::InvalidArgumentError("seeds must be distinct");
  }
  return BuildSchedule(*this, 0, seeds.front())
      .Validate(sim.num_ues, sim.num_bss);
}

std::vector<int> ExperimentSpec::SweepPoints() const {
  if (sweep == SweepAxis::kNone) return {0};
  const int limit =
      sweep == SweepAxis::kUeDropout ? sim.num_ues - 2 : sim.num_bss - 2;
  const int hi = sweep_max < 0 ? limit : sweep_max;
  std::vector<int> points;
  for (int v = sweep_min; v <= hi; ++v) points.push_back(v);
  return points;
}

absl::StatusOr<ExperimentSpec> ParseExperimentSpec(
    std::string_view json_text, const std::vector<std::string>& overrides) {
  ExperimentSpec spec;
  try {
    json root = json::parse(json_text.begin(), json_text.end());
    if (!root.is_object()) {
      return absl::InvalidArgumentError("config must be a JSON object");
    }
    for (const std::string& entry : overrides) {
      size_t eq = entry.find('=');
      if (eq == std::string::npos || eq == 0) {
        return absl::InvalidArgumentError(
            absl::StrCat("override '", entry, "' is not key=value"));
      }
      std::string key = entry.substr(0, eq);
      std::string raw = entry.substr(eq + 1);
      json value = json::parse(raw, nullptr, /*allow_exceptions=*/false);
      root[key] = value.is_discarded() ? json(raw) : value;
    }
    // model_dim also sets the feature count, so it goes first.
    if (root.contains("model_dim")) {
      BSAGG_RETURN_IF_ERROR(ApplyKey("model_dim", root["model_dim"], spec));
    } else {
      spec.task.feature_dim = static_cast<int>(spec.sim.model_dim) - 1;
    }
    for (const auto& [key, value] : root.items()) {
      if (key == "model_dim") continue;
      BSAGG_RETURN_IF_ERROR(ApplyKey(key, value, spec));
    }
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("bad config: ", e.what()));
  }
  BSAGG_RETURN_IF_ERROR(spec.Validate());
  return spec;
}

DropoutSchedule BuildSchedule(const ExperimentSpec& spec, int sweep_value,
                              uint64_t seed) {
  DropoutSchedule schedule = DropoutSchedule::Probabilistic(
      spec.ue_dropout_prob, spec.bs_dropout_prob, seed);
  for (uint64_t ue : spec.dropped_ues) schedule.DropUeFrom(0, ue);
  for (uint64_t bs : spec.dropped_bss) schedule.DropBsFrom(0, bs);
  if (spec.sweep == SweepAxis::kUeDropout) {
    for (int i = 0; i < sweep_value; ++i) {
      schedule.DropUeFrom(0, spec.sim.num_ues - 1 - i);
    }
  } else if (spec.sweep == SweepAxis::kBsDropout) {
    for (int i = 0; i < sweep_value; ++i) {
      schedule.DropBsFrom(0, spec.sim.num_bss - i);
    }
  }
  return schedule;
}

std::vector<std::pair<std::string, std::string>> SpecMetadata(
    const ExperimentSpec& spec) {
  const SimConfig& sim = spec.sim;
  const FlTaskOptions& task = spec.task;
  std::vector<std::pair<std::string, std::string>> meta = {
      {"num_ues", absl::StrCat(sim.num_ues)},
      {"num_bss", absl::StrCat(sim.num_bss)},
      {"bs_threshold", absl::StrCat(sim.bs_threshold)},
      {"min_online_fraction", FormatDouble(sim.min_online_fraction)},
      {"min_online_count",
       absl::StrCat(MinimumOnlineCount(sim.min_online_fraction, sim.num_ues))},
      {"model_dim", absl::StrCat(sim.model_dim)},
      {"iterations", absl::StrCat(sim.iterations)},
      {"latency_base_ms", FormatDouble(sim.latency_base_ms)},
      {"latency_jitter_ms", FormatDouble(sim.latency_jitter_ms)},
      {"deadline_ms", FormatDouble(sim.deadline_ms)},
      {"mask_share_mode", std::string(MaskShareModeName(sim.mask_share_mode))},
      {"frac_bits", absl::StrCat(sim.frac_bits)},
      {"clip_bound", FormatDouble(task.clip_bound)},
      {"precompute_masks", sim.precompute_masks ? "true" : "false"},
      {"samples_per_ue", absl::StrCat(task.samples_per_ue)},
      {"test_samples", absl::StrCat(task.test_samples)},
      {"separation", FormatDouble(task.separation)},
      {"learning_rate", FormatDouble(task.learning_rate)},
      {"local_epochs", absl::StrCat(task.local_epochs)},
      {"sweep", std::string(SweepAxisName(spec.sweep))},
      {"sweep_points", absl::StrJoin(spec.SweepPoints(), " ")},
      {"seeds", absl::StrJoin(spec.seeds, " ")},
      {"ue_dropout_prob", FormatDouble(spec.ue_dropout_prob)},
      {"bs_dropout_prob", FormatDouble(spec.bs_dropout_prob)},
      {"dropped_ues", absl::StrJoin(spec.dropped_ues, " ")},
      {"dropped_bss", absl::StrJoin(spec.dropped_bss, " ")},
      {"field_modulus", "2^61-1"},
      {"khprf",
       "linear-hash sha256 (exactly key-homomorphic; not a secure PRF)"},
      {"hash_domain_tag", std::string(kHashDomainTag)},
  };
  if (sim.mask_share_mode == MaskShareMode::kCompact) {
    meta.emplace_back("warning",
                      "compact mask shares reveal the aggregated key of each "
                      "online list to the aggregator");
  }
  return meta;
}

absl::StatusOr<ResultTable> RunExperiment(const ExperimentSpec& spec) {
  BSAGG_RETURN_IF_ERROR(spec.Validate());
  ResultTable table;
  table.metadata = SpecMetadata(spec);
  for (int point : spec.SweepPoints()) {
    for (uint64_t seed : spec.seeds) {
      FlTask task = GenerateData(seed, spec.sim.num_ues, spec.task);
      SimConfig config = spec.sim;
      config.rng_seed = seed;
      BSAGG_ASSIGN_OR_RETURN(
          SimulationResult result,
          RunSimulation(config, BuildSchedule(spec, point, seed), task));
      double setup_ms = 0.0;
      for (const auto& [role, totals] : result.setup.traffic.per_role) {
        setup_ms += totals.compute_ms;
      }
      for (const RoundMetrics& round : result.rounds) {
        ResultRow row;
        row.sweep_value = point;
        row.seed = seed;
        row.iteration = round.iteration;
        row.outcome = round.outcome;
        row.online_ues = round.online_ues;
        row.online_bss = round.online_bss;
        row.accuracy = round.accuracy;
        row.bytes_ue_sent = round.traffic.role(Role::kUe).bytes_sent;
        row.bytes_bs_sent = round.traffic.role(Role::kBs).bytes_sent;
        row.bytes_af_sent = round.traffic.role(Role::kAggregator).bytes_sent;
        row.time_setup_ms = setup_ms;
        for (const auto& [role, totals] : round.traffic.per_role) {
          row.time_aggregation_ms += totals.compute_ms;
        }
        row.mode = config.mask_share_mode;
        table.rows.push_back(row);
      }
      LOG(INFO) << std::string(SweepAxisName(spec.sweep)) << "=" << point
                << " seed=" << seed << " final accuracy "
                << result.rounds.back().accuracy;
    }
  }
  return table;
}

absl::StatusOr<ModeComparison> CompareModes(const ExperimentSpec& spec) {
  BSAGG_RETURN_IF_ERROR(spec.Validate());
  ModeComparison comparison;
  comparison.metadata = SpecMetadata(spec);
  comparison.metadata.erase(
      std::remove_if(comparison.metadata.begin(), comparison.metadata.end(),
                     [](const auto& kv) {
                       return kv.first == "mask_share_mode" ||
                              kv.first == "warning";
                     }),
      comparison.metadata.end());
  comparison.metadata.emplace_back("mask_share_mode", "evaluated,compact");

  uint64_t evaluated_payload = 0;
  uint64_t compact_payload = 0;
  for (uint64_t seed : spec.seeds) {
    FlTask task = GenerateData(seed, spec.sim.num_ues, spec.task);
    DropoutSchedule schedule = BuildSchedule(spec, 0, seed);
    std::vector<SimulationResult> results;
    for (MaskShareMode mode :
         {MaskShareMode::kEvaluated, MaskShareMode::kCompact}) {
      SimConfig config = spec.sim;
      config.rng_seed = seed;
      config.mask_share_mode = mode;
      BSAGG_ASSIGN_OR_RETURN(SimulationResult result,
                             RunSimulation(config, schedule, task));
      ModeComparisonRow row;
      row.seed = seed;
      row.mode = mode;
      int bs_messages = 0;
      for (const RoundMetrics& round : result.rounds) {
        row.bs_bytes_sent += round.traffic.role(Role::kBs).bytes_sent;
        bs_messages += round.traffic.role(Role::kBs).messages_sent;
      }
      if (bs_messages == 0) {
        return absl::FailedPreconditionError(
            absl::StrCat("seed ", seed, " produced no mask shares to compare"));
      }
      row.mask_share_wire_bytes = row.bs_bytes_sent / bs_messages;
      row.mask_share_payload_bytes = row.mask_share_wire_bytes - kHeaderSize;
      row.final_accuracy = result.rounds.back().accuracy;
      (mode == MaskShareMode::kEvaluated ? evaluated_payload
                                         : compact_payload) =
          row.mask_share_payload_bytes;
      comparison.rows.push_back(row);
      results.push_back(std::move(result));
    }
    for (size_t r = 0; r < results[0].rounds.size(); ++r) {
      if (results[0].rounds[r].global_model !=
          results[1].rounds[r].global_model) {
        comparison.models_identical = false;
      }
    }
  }
  comparison.payload_ratio =
      static_cast<double>(evaluated_payload) / compact_payload;
  comparison.wire_ratio = static_cast<double>(evaluated_payload + kHeaderSize) /
                          (compact_payload + kHeaderSize);
  return comparison;
}

std::string ToCsv(const ResultTable& table, bool include_timing) {
  std::string out;
  for (const auto& [key, value] : table.metadata) {
    absl::StrAppend(&out, "# ", key, "=", value, "\n");
  }
  absl::StrAppend(&out,
                  "sweep_value,seed,iteration,outcome,online_ues,online_bss,"
                  "accuracy,bytes_ue_sent,bytes_bs_sent,bytes_af_sent");
  if (include_timing)
    absl::StrAppend(&out, ",time_setup_ms,time_aggregation_ms");
  absl::StrAppend(&out, ",mode\n");
  for (const ResultRow& r : table.rows) {
    absl::StrAppend(&out, r.sweep_value, ",", r.seed, ",", r.iteration, ",",
                    std::string(RoundOutcomeName(r.outcome)), ",", r.online_ues,
                    ",", r.online_bss, ",", absl::StrFormat("%.6f", r.accuracy),
                    ",", r.bytes_ue_sent, ",", r.bytes_bs_sent, ",",
                    r.bytes_af_sent);
    if (include_timing) {
      absl::StrAppend(&out, ",", absl::StrFormat("%.3f", r.time_setup_ms), ",",
                      absl::StrFormat("%.3f", r.time_aggregation_ms));
    }
    absl::StrAppend(&out, ",", std::string(MaskShareModeName(r.mode)), "\n");
  }
  return out;
}

std::string ToJson(const ResultTable& table, bool include_timing) {
  json root;
  json meta = json::object();
  for (const auto& [key, value] : table.metadata) meta[key] = value;
  root["metadata"] = meta;
  json rows = json::array();
  for (const ResultRow& r : table.rows) {
    json row = {
        {"sweep_value", r.sweep_value},
        {"seed", r.seed},
        {"iteration", r.iteration},
        {"outcome", std::string(RoundOutcomeName(r.outcome))},
        {"online_ues", r.online_ues},
        {"online_bss", r.online_bss},
        {"accuracy", r.accuracy},
        {"bytes_ue_sent", r.bytes_ue_sent},
        {"bytes_bs_sent", r.bytes_bs_sent},
        {"bytes_af_sent", r.bytes_af_sent},
        {"mode", std::string(MaskShareModeName(r.mode))},
    };
    if (include_timing) {
      row["time_setup_ms"] = r.time_setup_ms;
      row["time_aggregation_ms"] = r.time_aggregation_ms;
    }
    rows.push_back(std::move(row));
  }
  root["rows"] = std::move(rows);
  return root.dump(2) + "\n";
}

std::string ToCsv(const ModeComparison& comparison) {
  std::string out;
  for (const auto& [key, value] : comparison.metadata) {
    absl::StrAppend(&out, "# ", key, "=", value, "\n");
  }
  absl::StrAppend(&out, "# models_identical=",
                  comparison.models_identical ? "true" : "false", "\n");
  absl::StrAppend(&out, "# payload_ratio=",
                  absl::StrFormat("%.3f", comparison.payload_ratio), "\n");
  absl::StrAppend(&out, "# wire_ratio=",
                  absl::StrFormat("%.3f", comparison.wire_ratio), "\n");
  absl::StrAppend(&out,
                  "seed,mode,bs_bytes_sent,mask_share_wire_bytes,"
                  "mask_share_payload_bytes,final_accuracy\n");
  for (const ModeComparisonRow& r : comparison.rows) {
    absl::StrAppend(&out, r.seed, ",", std::string(MaskShareModeName(r.mode)),
                    ",", r.bs_bytes_sent, ",", r.mask_share_wire_bytes, ",",
                    r.mask_share_payload_bytes, ",",
                    absl::StrFormat("%.6f", r.final_accuracy), "\n");
  }
  return out;
}

std::string ToJson(const ModeComparison& comparison) {
  json root;
  json meta = json::object();
  for (const auto& [key, value] : comparison.metadata) meta[key] = value;
  root["metadata"] = meta;
  root["models_identical"] = comparison.models_identical;
  root["payload_ratio"] = comparison.payload_ratio;
  root["wire_ratio"] = comparison.wire_ratio;
  json rows = json::array();
  for (const ModeComparisonRow& r : comparison.rows) {
    rows.push_back({{"seed", r.seed},
                    {"mode", std::string(MaskShareModeName(r.mode))},
                    {"bs_bytes_sent", r.bs_bytes_sent},
                    {"mask_share_wire_bytes", r.mask_share_wire_bytes},
                    {"mask_share_payload_bytes", r.mask_share_payload_bytes},
                    {"final_accuracy", r.final_accuracy}});
  }
  root["rows"] = std::move(rows);
  return root.dump(2) + "\n";
}

absl::Status WriteOutput(const std::string& path, std::string_view content) {
  if (path.empty()) {
    std::cout << content;
    std::cout.flush();
    return std::cout ? absl::OkStatus()
                     : absl::UnavailableError("failed writing to stdout");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    return absl::PermissionDeniedError(
        absl::StrCat("cannot open output file '", path, "'"));
  }
  out << content;
  out.close();
  if (!out) {
    return absl::DataLossError(absl::StrCat("failed writing '", path, "'"));
  }
  return absl::OkStatus();
}

}  // namespace bsagg
