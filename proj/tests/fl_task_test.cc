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

#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"

namespace bsagg {
namespace {

using ::testing::Each;
using ::testing::Eq;

Dataset Pool(const FlTask& task) {
  Dataset all;
  for (const Dataset& shard : task.shards) {
    all.features.insert(all.features.end(), shard.features.begin(),
                        shard.features.end());
    all.labels.insert(all.labels.end(), shard.labels.begin(),
                      shard.labels.end());
  }
  return all;
}

TEST(GenerateDataTest, DeterministicPerSeed) {
  FlTask a = GenerateData(7, 8);
  FlTask b = GenerateData(7, 8);
  FlTask c = GenerateData(8, 8);
  ASSERT_EQ(a.shards.size(), 8u);
  for (int u = 0; u < 8; ++u) {
    EXPECT_EQ(a.shards[u].features, b.shards[u].features);
    EXPECT_EQ(a.shards[u].labels, b.shards[u].labels);
  }
  EXPECT_EQ(a.test_set.features, b.test_set.features);
  EXPECT_NE(a.shards[0].features, c.shards[0].features);
}

TEST(GenerateDataTest, ShardsAreDisjointEqualSizedAndBalanced) {
  FlTaskOptions options;
  FlTask task = GenerateData(1, 8, options);
  EXPECT_EQ(task.model_dim(), static_cast<size_t>(options.feature_dim) + 1);
  std::set<std::vector<double>> seen;
  for (const Dataset& shard : task.shards) {
    ASSERT_EQ(shard.size(), static_cast<size_t>(options.samples_per_ue));
    int positives = 0;
    for (size_t s = 0; s < shard.size(); ++s) {
      EXPECT_TRUE(seen.insert(shard.features[s]).second);
      if (shard.labels[s] == 1) ++positives;
    }
    EXPECT_EQ(positives * 2, options.samples_per_ue);
  }
  for (const auto& x : task.test_set.features) {
    EXPECT_TRUE(seen.insert(x).second);
  }
  EXPECT_EQ(task.test_set.size(), static_cast<size_t>(options.test_samples));
}

TEST(LocalTrainTest, ZeroEpochsGiveZeroUpdate) {
  FlTask task = GenerateData(2, 1);
  std::vector<double> model(task.model_dim(), 0.3);
  EXPECT_THAT(LocalTrain(model, task.shards[0], 0.1, 0, 1.0), Each(Eq(0.0)));
}

TEST(LocalTrainTest, UpdateDecreasesLocalLoss) {
  FlTaskOptions options;
  for (uint64_t seed = 0; seed < 10; ++seed) {
    FlTask task = GenerateData(seed, 4, options);
    std::vector<double> model(task.model_dim(), 0.0);
    for (const Dataset& shard : task.shards) {
      std::vector<double> delta =
          LocalTrain(model, shard, options.learning_rate, options.local_epochs,
                     options.clip_bound);
      std::vector<double> next = model;
      for (size_t i = 0; i < next.size(); ++i) next[i] += delta[i];
      EXPECT_LT(LogisticLoss(next, shard), LogisticLoss(model, shard));
    }
  }
}

TEST(LocalTrainTest, ClipsToBound) {
  FlTask task = GenerateData(3, 1);
  std::vector<double> model(task.model_dim(), 0.0);
  std::vector<double> delta = LocalTrain(model, task.shards[0], 1000.0, 5, 0.5);
  bool saturated = false;
  for (double v : delta) {
    EXPECT_LE(std::abs(v), 0.5);
    if (std::abs(v) == 0.5) saturated = true;
  }
  EXPECT_TRUE(saturated);
}

TEST(EvaluateTest, RandomModelIsNearChance) {
  FlTask task = GenerateData(4, 1);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double total = 0.0;
  constexpr int kModels = 50;
  for (int m = 0; m < kModels; ++m) {
    std::vector<double> model(task.model_dim());
    for (double& v : model) v = gauss(rng);
    total += Evaluate(model, task.test_set);
  }
  EXPECT_NEAR(total / kModels, 0.5, 0.1);
}

TEST(EvaluateTest, ClassMeanHyperplaneSeparatesBlobs) {
  FlTask task = GenerateData(5, 8);
  Dataset train = Pool(task);
  // Difference of empirical class means as the normal, bias zero: the blobs
  // are symmetric about the origin.
  std::vector<double> model(task.model_dim(), 0.0);
  for (size_t s = 0; s < train.size(); ++s) {
    for (int i = 0; i < task.feature_dim; ++i) {
      model[i] += train.labels[s] * train.features[s][i];
    }
  }
  EXPECT_GT(Evaluate(model, task.test_set), 0.95);
}

TEST(EvaluateTest, CentralizedTrainingExceedsNinetyFivePercent) {
  for (uint64_t seed = 0; seed < 5; ++seed) {
    FlTask task = GenerateData(seed, 8);
    std::vector<double> model(task.model_dim(), 0.0);
    std::vector<double> delta =
        LocalTrain(model, Pool(task), 0.5, 200, /*clip_bound=*/1e9);
    for (size_t i = 0; i < model.size(); ++i) model[i] += delta[i];
    EXPECT_GT(Evaluate(model, task.test_set), 0.95) << "seed " << seed;
  }
}

}  // namespace
}  // namespace bsagg
