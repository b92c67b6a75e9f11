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

// bsagg: runs secure aggregation experiments from a JSON config.
//
//   bsagg run config.json [--set key=value]... [--output path] [--format csv]
//   bsagg sweep config.json ...
//   bsagg compare-modes config.json ...
//
// Logging goes to stderr; raise verbosity with GLOG_minloglevel=0 (default
// shows warnings and errors only).

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "bsagg/experiment.h"
#include "glog/logging.h"

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitRunError = 1;

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string output;
  std::string format;
  bool no_timing = false;
};

void AddCommonOptions(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("config", args.config_path, "JSON experiment config")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--set", args.overrides,
                  "Override a config key, e.g. --set num_ues=16");
  cmd->add_option("-o,--output", args.output,
                  "Output file (default: config 'output', else stdout)");
  cmd->add_option("-f,--format", args.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_flag("--no-timing", args.no_timing,
                "Omit wall-clock columns so output is byte-reproducible");
}

absl::StatusOr<bsagg::ExperimentSpec> LoadSpec(const CommonArgs& args) {
  std::ifstream in(args.config_path);
  if (!in) {
    return absl::NotFoundError(
        absl::StrCat("cannot read config '", args.config_path, "'"));
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  std::vector<std::string> overrides = args.overrides;
  if (!args.output.empty()) overrides.push_back("output=" + args.output);
  if (!args.format.empty()) overrides.push_back("format=" + args.format);
  return bsagg::ParseExperimentSpec(buffer.str(), overrides);
}

int Fail(const absl::Status& status, int code) {
  std::cerr << "bsagg: " << status.message() << "\n";
  return code;
}

int RunTable(const CommonArgs& args, bool require_sweep) {
  absl::StatusOr<bsagg::ExperimentSpec> spec = LoadSpec(args);
  if (!spec.ok()) return Fail(spec.status(), kExitConfigError);
  if (require_sweep && spec->sweep == bsagg::SweepAxis::kNone) {
    return Fail(absl::InvalidArgumentError(
                    "sweep requires 'sweep' to be ue_dropout or bs_dropout"),
                kExitConfigError);
  }
  absl::StatusOr<bsagg::ResultTable> table = bsagg::RunExperiment(*spec);
  if (!table.ok()) return Fail(table.status(), kExitRunError);
  std::string content = spec->format == bsagg::OutputFormat::kJson
                            ? bsagg::ToJson(*table, !args.no_timing)
                            : bsagg::ToCsv(*table, !args.no_timing);
  if (absl::Status s = bsagg::WriteOutput(spec->output_path, content);
      !s.ok()) {
    return Fail(s, kExitRunError);
  }
  return EXIT_SUCCESS;
}

int RunCompare(const CommonArgs& args) {
  absl::StatusOr<bsagg::ExperimentSpec> spec = LoadSpec(args);
  if (!spec.ok()) return Fail(spec.status(), kExitConfigError);
  absl::StatusOr<bsagg::ModeComparison> comparison = bsagg::CompareModes(*spec);
  if (!comparison.ok()) return Fail(comparison.status(), kExitRunError);
  std::string content = spec->format == bsagg::OutputFormat::kJson
                            ? bsagg::ToJson(*comparison)
                            : bsagg::ToCsv(*comparison);
  if (absl::Status s = bsagg::WriteOutput(spec->output_path, content);
      !s.ok()) {
    return Fail(s, kExitRunError);
  }
  if (!comparison->models_identical) {
    std::cerr << "bsagg: evaluated and compact runs diverged\n";
    return kExitRunError;
  }
  return EXIT_SUCCESS;
}

}  // namespace

int main(int argc, char** argv) {
  FLAGS_logtostderr = true;
  if (std::getenv("GLOG_minloglevel") == nullptr) FLAGS_minloglevel = 1;
  google::InitGoogleLogging(argv[0]);

  CLI::App app{"Dropout-resilient secure aggregation experiments"};
  app.require_subcommand(1);

  CommonArgs run_args, sweep_args, compare_args;
  CLI::App* run = app.add_subcommand("run", "Run one configuration per seed");
  AddCommonOptions(run, run_args);
  CLI::App* sweep =
      app.add_subcommand("sweep", "Sweep the number of dropped UEs or BSs");
  AddCommonOptions(sweep, sweep_args);
  CLI::App* compare = app.add_subcommand(
      "compare-modes", "Compare evaluated and compact mask shares");
  AddCommonOptions(compare, compare_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitConfigError;
  }

  if (run->parsed()) return RunTable(run_args, /*require_sweep=*/false);
  if (sweep->parsed()) return RunTable(sweep_args, /*require_sweep=*/true);
  return RunCompare(compare_args);
}
