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

// Synthetic federated learning workload: logistic regression on two Gaussian
// blobs, split into equal per-UE shards plus a shared held-out test set.
// Models are weight vectors with the bias as the last component.

#ifndef BSAGG_FL_TASK_H_
#define BSAGG_FL_TASK_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace bsagg {

struct Dataset {
  std::vector<std::vector<double>> features;
  std::vector<int> labels;  // +1 / -1

  size_t size() const { return labels.size(); }
};

struct FlTaskOptions {
  int feature_dim = 10;
  int samples_per_ue = 40;
  int test_samples = 2000;
  // Distance between the class means, in units of the per-axis stddev.
  double separation = 4.0;
  double learning_rate = 0.1;
  int local_epochs = 2;
  double clip_bound = 1.0;
};

struct FlTask {
  int feature_dim = 0;
  std::vector<Dataset> shards;  // one per UE, pairwise disjoint
  Dataset test_set;
  double learning_rate = 0.0;
  int local_epochs = 0;
  double clip_bound = 1.0;

  size_t model_dim() const { return static_cast<size_t>(feature_dim) + 1; }
};

// Deterministic per seed. Classes are balanced within every shard and the
// test set.
FlTask GenerateData(uint64_t seed, int n_ues,
                    const FlTaskOptions& options = {});

// Mean logistic loss log(1 + exp(-y * (w.x + b))).
double LogisticLoss(std::span<const double> model, const Dataset& data);

// Runs `epochs` full-batch gradient steps from `model` and returns the
// parameter delta, each component clipped to [-clip_bound, clip_bound].
std::vector<double> LocalTrain(std::span<const double> model,
                               const Dataset& shard, double learning_rate,
                               int epochs, double clip_bound);

// Fraction of examples whose label matches sign(w.x + b); a zero score
// predicts +1.
double Evaluate(std::span<const double> model, const Dataset& test);

}  // namespace bsagg

#endif  // BSAGG_FL_TASK_H_
