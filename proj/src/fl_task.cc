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

#include "bsagg/fl_task.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "glog/logging.h"

namespace bsagg {

namespace {

double Score(std::span<const double> model, const std::vector<double>& x) {
  double s = model.back();
  for (size_t i = 0; i < x.size(); ++i) s += model[i] * x[i];
  return s;
}

Dataset Sample(int count, const std::vector<double>& half_gap,
               std::mt19937_64& rng) {
  std::normal_distribution<double> noise(0.0, 1.0);
  Dataset data;
  data.features.reserve(count);
  data.labels.reserve(count);
  for (int s = 0; s < count; ++s) {
    int label = (s % 2 == 0) ? 1 : -1;
    std::vector<double> x(half_gap.size());
    for (size_t i = 0; i < x.size(); ++i) {
      x[i] = label * half_gap[i] + noise(rng);
    }
    data.features.push_back(std::move(x));
    data.labels.push_back(label);
  }
  return data;
}

}  // namespace

FlTask GenerateData(uint64_t seed, int n_ues, const FlTaskOptions& options) {
  CHECK_GE(n_ues, 1);
  CHECK_GE(options.feature_dim, 1);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  // Random unit direction; class means sit at +/- (separation / 2) along it.
  std::vector<double> direction(options.feature_dim);
  double norm = 0.0;
  do {
    norm = 0.0;
    for (double& v : direction) {
      v = gauss(rng);
      norm += v * v;
    }
  } while (norm == 0.0);
  norm = std::sqrt(norm);
  for (double& v : direction) v = v / norm * options.separation / 2.0;

  FlTask task;
  task.feature_dim = options.feature_dim;
  task.learning_rate = options.learning_rate;
  task.local_epochs = options.local_epochs;
  task.clip_bound = options.clip_bound;
  task.shards.reserve(n_ues);
  for (int u = 0; u < n_ues; ++u) {
    task.shards.push_back(Sample(options.samples_per_ue, direction, rng));
  }
  task.test_set = Sample(options.test_samples, direction, rng);
  return task;
}

double LogisticLoss(std::span<const double> model, const Dataset& data) {
  CHECK_GT(data.size(), 0u);
  double total = 0.0;
  for (size_t s = 0; s < data.size(); ++s) {
    double margin = data.labels[s] * Score(model, data.features[s]);
    // log(1 + e^-m), stable for large |m|.
    total += margin > 0 ? std::log1p(std::exp(-margin))
                        : -margin + std::log1p(std::exp(margin));
  }
  return total / data.size();
}

std::vector<double> LocalTrain(std::span<const double> model,
                               const Dataset& shard, double learning_rate,
                               int epochs, double clip_bound) {
  CHECK(!shard.features.empty());
  CHECK_EQ(model.size(), shard.features.front().size() + 1);
  std::vector<double> w(model.begin(), model.end());
  std::vector<double> grad(w.size());
  for (int epoch = 0; epoch < epochs; ++epoch) {
    std::fill(grad.begin(), grad.end(), 0.0);
    for (size_t s = 0; s < shard.size(); ++s) {
      const auto& x = shard.features[s];
      const double y = shard.labels[s];
      // d/ds log(1 + e^{-ys}) = -y * sigmoid(-ys)
      const double g = -y / (1.0 + std::exp(y * Score(w, x)));
      for (size_t i = 0; i < x.size(); ++i) grad[i] += g * x[i];
      grad.back() += g;
    }
    for (size_t i = 0; i < w.size(); ++i) {
      w[i] -= learning_rate * grad[i] / shard.size();
    }
  }
  std::vector<double> delta(w.size());
  for (size_t i = 0; i < w.size(); ++i) {
    delta[i] = std::clamp(w[i] - model[i], -clip_bound, clip_bound);
  }
  return delta;
}

double Evaluate(std::span<const double> model, const Dataset& test) {
  CHECK_GT(test.size(), 0u);
  CHECK_EQ(model.size(), test.features.front().size() + 1);
  size_t correct = 0;
  for (size_t s = 0; s < test.size(); ++s) {
    int predicted = Score(model, test.features[s]) >= 0.0 ? 1 : -1;
    if (predicted == test.labels[s]) ++correct;
  }
  return static_cast<double>(correct) / test.size();
}

}  // namespace bsagg
