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

// Experiment orchestration behind the command-line tool: single runs, sweeps
// over the number of dropped UEs or BSs, and evaluated-vs-compact mask share
// comparisons, with CSV/JSON emission.
//
// An experiment is described by a flat JSON object. Recognised keys:
//
//   num_ues, num_bss, bs_threshold, min_online_fraction, model_dim,
//   iterations, latency_base_ms, latency_jitter_ms, deadline_ms,
//   mask_share_mode ("evaluated" | "compact"), frac_bits, precompute_masks,
//   samples_per_ue, test_samples, separation, learning_rate, local_epochs,
//   clip_bound, sweep ("none" | "ue_dropout" | "bs_dropout"), sweep_min,
//   sweep_max, seeds (list), ue_dropout_prob, bs_dropout_prob,
//   dropped_ues (list), dropped_bss (list), output, format ("csv" | "json").
//
// Unknown keys are rejected. The model has model_dim - 1 features plus bias.

#ifndef BSAGG_EXPERIMENT_H_
#define BSAGG_EXPERIMENT_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "bsagg/dropout.h"
#include "bsagg/fl_task.h"
#include "bsagg/simulator.h"

namespace bsagg {

enum class SweepAxis { kNone, kUeDropout, kBsDropout };
enum class OutputFormat { kCsv, kJson };

struct ExperimentSpec {
  SimConfig sim;
  FlTaskOptions task;
  SweepAxis sweep = SweepAxis::kNone;
  // Inclusive; sweep_max < 0 selects the widest range (n-2 dropped UEs or
  // k-2 dropped BSs).
  int sweep_min = 0;
  int sweep_max = -1;
  std::vector<uint64_t> seeds{1};
  double ue_dropout_prob = 0.0;
  double bs_dropout_prob = 0.0;
  // Offline in every iteration.
  std::vector<uint64_t> dropped_ues;
  std::vector<uint64_t> dropped_bss;
  std::string output_path;  // empty: stdout
  OutputFormat format = OutputFormat::kCsv;

  absl::Status Validate() const;
  // Sweep points, {0} when there is no sweep axis.
  std::vector<int> SweepPoints() const;
};

// Parses a JSON config and applies `overrides` ("key=value", value parsed as
// JSON when possible and as a string otherwise) on top of it.
absl::StatusOr<ExperimentSpec> ParseExperimentSpec(
    std::string_view json_text, const std::vector<std::string>& overrides = {});

// The schedule for one (sweep point, seed): fixed drops from the spec, the
// sweep's highest-indexed UEs or BSs offline in every iteration, and the
// probabilistic coins seeded by `seed`.
DropoutSchedule BuildSchedule(const ExperimentSpec& spec, int sweep_value,
                              uint64_t seed);

struct ResultRow {
  int sweep_value = 0;
  uint64_t seed = 0;
  uint64_t iteration = 0;
  RoundOutcome outcome = RoundOutcome::kFallback;
  int online_ues = 0;
  int online_bss = 0;
  double accuracy = 0.0;
  uint64_t bytes_ue_sent = 0;
  uint64_t bytes_bs_sent = 0;
  uint64_t bytes_af_sent = 0;
  double time_setup_ms = 0.0;        // wall clock
  double time_aggregation_ms = 0.0;  // wall clock
  MaskShareMode mode = MaskShareMode::kEvaluated;
};

struct ResultTable {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<ResultRow> rows;
};

// Every knob that affects results, echoed as key/value strings.
std::vector<std::pair<std::string, std::string>> SpecMetadata(
    const ExperimentSpec& spec);

// One row per (sweep point, seed, iteration), in that order.
absl::StatusOr<ResultTable> RunExperiment(const ExperimentSpec& spec);

struct ModeComparisonRow {
  uint64_t seed = 0;
  MaskShareMode mode = MaskShareMode::kEvaluated;
  uint64_t bs_bytes_sent = 0;          // all BSs, all iterations
  uint64_t mask_share_wire_bytes = 0;  // one MASK_SHARE incl. header
  uint64_t mask_share_payload_bytes = 0;
  double final_accuracy = 0.0;
};

struct ModeComparison {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<ModeComparisonRow> rows;
  bool models_identical = true;
  double payload_ratio = 0.0;  // evaluated / compact MASK_SHARE payload
  double wire_ratio = 0.0;     // same, including headers
};

// Runs every seed under both modes with the spec's sweep ignored. Fails if
// any seed never produced a mask share.
absl::StatusOr<ModeComparison> CompareModes(const ExperimentSpec& spec);

std::string ToCsv(const ResultTable& table, bool include_timing = true);
std::string ToJson(const ResultTable& table, bool include_timing = true);
std::string ToCsv(const ModeComparison& comparison);
std::string ToJson(const ModeComparison& comparison);

// Writes to `path`, or stdout when empty.
absl::Status WriteOutput(const std::string& path, std::string_view content);

}  // namespace bsagg

#endif  // BSAGG_EXPERIMENT_H_
