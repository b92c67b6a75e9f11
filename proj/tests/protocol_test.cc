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

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "absl/status/status.h"
#include "bsagg/aggregation_server.h"
#include "bsagg/alpha_summation.h"
#include "bsagg/base_station.h"
#include "bsagg/khprf.h"
#include "bsagg/shamir.h"
#include "bsagg/share_router.h"
#include "bsagg/user_equipment.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"

namespace bsagg {
namespace {

using ::testing::ElementsAre;
using ::testing::ElementsAreArray;

FieldElement F(uint64_t v) { return FieldElement::FromUint64(v); }

std::vector<double> RandomUpdate(Prng& prng, size_t d, double bound = 1.0) {
  std::uniform_real_distribution<double> u(-bound, bound);
  std::vector<double> w(d);
  for (double& x : w) x = u(prng);
  return w;
}

// n UEs, k BSs and an aggregator wired together without the simulator.
class ProtocolHarness {
 public:
  ProtocolHarness(int n, int k, int t, size_t d, uint64_t seed,
                  MaskShareMode mode = MaskShareMode::kEvaluated,
                  double min_online_fraction = 1.0 / 3.0)
      : prng_(seed),
        acc_(*AccessStructure::Create(t, k)),
        codec_(*FixedPointCodec::Create(16, 1.0, n)),
        d_(d),
        mode_(mode) {
    AggregatorConfig config{.num_ues = n,
                            .min_online_fraction = min_online_fraction,
                            .bs_threshold = acc_,
                            .codec = codec_,
                            .model_dim = d,
                            .mode = mode};
    af_ = std::make_unique<AggregationServer>(config, prf_,
                                              std::vector<double>(d, 0.0));
    std::set<uint64_t> region;
    for (int j = 1; j <= k; ++j) {
      bss_.emplace(j, BaseStation(j));
      region.insert(j);
    }
    for (int i = 0; i < n; ++i) {
      ues_.push_back(
          std::make_unique<UserEquipment>(i, codec_, d, prf_, prng_));
      std::vector<ProtocolMessage> batch = *ues_.back()->Setup(acc_, prng_);
      RoutingResult routed = *RouteSetupShares(batch, region, region);
      for (const auto& [bs, msg] : routed.deliveries) {
        EXPECT_TRUE(bss_.at(bs).ReceiveSetupShare(msg).ok());
      }
      af_->RegisterUe(i);
    }
  }

  // Runs one iteration with the given online UEs/BSs and returns the
  // recovered mask (nullopt on failure) plus the updates that were sent.
  struct RoundResult {
    std::optional<FieldVector> mask;
    std::map<uint64_t, std::vector<double>> updates;
    std::map<uint64_t, FieldVector> encoded;
    bool list_ok = false;
  };
  RoundResult RunRound(const std::set<uint64_t>& online_ues,
                       const std::set<uint64_t>& online_bss) {
    RoundResult result;
    const uint64_t t = af_->iteration();
    for (uint64_t i : online_ues) {
      std::vector<double> w = RandomUpdate(prng_, d_);
      result.encoded.emplace(i, *EncodeUpdate(w, codec_));
      result.updates.emplace(i, w);
      ProtocolMessage msg = *ues_[i]->MaskUpdate(w, t);
      EXPECT_EQ(*af_->CollectUpdate(msg),
                AggregationServer::CollectResult::kAccepted);
    }
    std::optional<ProtocolMessage> list = af_->FinalizeOnlineList();
    result.list_ok = list.has_value();
    if (!list) return result;
    for (uint64_t j : online_bss) {
      ProtocolMessage share =
          *bss_.at(j).ComputeMaskShare(*list, mode_, d_, prf_);
      EXPECT_TRUE(af_->ReceiveMaskShare(share).ok());
    }
    result.mask = *af_->RecoverMask();
    return result;
  }

  FieldVector MaskSumOracle(const std::set<uint64_t>& ues, uint64_t t) const {
    FieldVector sum(d_);
    for (uint64_t i : ues) {
      EXPECT_TRUE(
          sum.AddAssign(prf_.Eval(ues_[i]->secret(), t, d_).values).ok());
    }
    return sum;
  }

  Prng prng_;
  LinearHashPrf prf_;
  AccessStructure acc_;
  FixedPointCodec codec_;
  size_t d_;
  MaskShareMode mode_;
  std::vector<std::unique_ptr<UserEquipment>> ues_;
  std::map<uint64_t, BaseStation> bss_;
  std::unique_ptr<AggregationServer> af_;
};

std::set<uint64_t> Range(uint64_t lo, uint64_t hi) {
  std::set<uint64_t> s;
  for (uint64_t i = lo; i < hi; ++i) s.insert(i);
  return s;
}

TEST(UeSetupTest, EmitsOneShareMessagePerBs) {
  Prng prng(1);
  LinearHashPrf prf;
  FixedPointCodec codec = *FixedPointCodec::Create(16, 1.0, 8);
  AccessStructure acc = *AccessStructure::Create(3, 4);
  UserEquipment ue(5, codec, 4, prf, prng);
  std::vector<ProtocolMessage> msgs = *ue.Setup(acc, prng);
  ASSERT_EQ(msgs.size(), 4u);
  std::vector<SecretShare> shares;
  for (size_t j = 0; j < 4; ++j) {
    EXPECT_EQ(msgs[j].sender, 5u);
    EXPECT_EQ(msgs[j].type(), MessageType::kSetupShare);
    const auto& payload = std::get<SetupSharePayload>(msgs[j].payload);
    EXPECT_EQ(payload.target_bs, j + 1);
    EXPECT_EQ(payload.share.x, F(j + 1));
    shares.push_back(payload.share);
  }
  for (int skip = 0; skip < 4; ++skip) {
    std::vector<SecretShare> three;
    for (int j = 0; j < 4; ++j) {
      if (j != skip) three.push_back(shares[j]);
    }
    EXPECT_EQ(**Recover(three, acc), ue.secret().value);
  }
  EXPECT_EQ(ue.Setup(acc, prng).status().code(),
            absl::StatusCode::kFailedPrecondition);
}

TEST(UeSetupTest, FullThresholdNeedsEveryShare) {
  Prng prng(2);
  LinearHashPrf prf;
  FixedPointCodec codec = *FixedPointCodec::Create(16, 1.0, 8);
  AccessStructure acc = *AccessStructure::Create(4, 4);
  UserEquipment ue(0, codec, 4, prf, prng);
  std::vector<SecretShare> shares;
  for (const ProtocolMessage& m : *ue.Setup(acc, prng)) {
    shares.push_back(std::get<SetupSharePayload>(m.payload).share);
  }
  EXPECT_EQ(**Recover(shares, acc), ue.secret().value);
  shares.pop_back();
  EXPECT_FALSE(Recover(shares, acc)->has_value());
}

TEST(RouteSharesTest, DeliversEachShareToItsBs) {
  Prng prng(3);
  LinearHashPrf prf;
  FixedPointCodec codec = *FixedPointCodec::Create(16, 1.0, 8);
  AccessStructure acc = *AccessStructure::Create(3, 4);
  UserEquipment ue(2, codec, 4, prf, prng);
  std::vector<ProtocolMessage> batch = *ue.Setup(acc, prng);
  std::set<uint64_t> region = {1, 2, 3, 4};
  RoutingResult routed = *RouteSetupShares(batch, region, region);
  EXPECT_TRUE(routed.complete);
  ASSERT_EQ(routed.deliveries.size(), 4u);
  std::map<uint64_t, BaseStation> bss;
  for (auto& [j, msg] : routed.deliveries) {
    BaseStation bs(j);
    ASSERT_TRUE(bs.ReceiveSetupShare(msg).ok());
    EXPECT_EQ(bs.num_shares(), 1u);
    EXPECT_TRUE(bs.HasShareFor(2));
    // A second copy is rejected.
    EXPECT_EQ(bs.ReceiveSetupShare(msg).code(),
              absl::StatusCode::kAlreadyExists);
  }
}

TEST(RouteSharesTest, RejectsMalformedBatches) {
  Prng prng(4);
  LinearHashPrf prf;
  FixedPointCodec codec = *FixedPointCodec::Create(16, 1.0, 8);
  AccessStructure acc = *AccessStructure::Create(3, 4);
  UserEquipment ue(0, codec, 4, prf, prng);
  std::vector<ProtocolMessage> batch = *ue.Setup(acc, prng);
  std::set<uint64_t> region = {1, 2, 3, 4};

  std::vector<ProtocolMessage> dup = batch;
  dup[3] = dup[2];
  EXPECT_FALSE(RouteSetupShares(dup, region, region).ok());

  std::vector<ProtocolMessage> missing(batch.begin(), batch.begin() + 3);
  EXPECT_FALSE(RouteSetupShares(missing, region, region).ok());

  std::set<uint64_t> small_region = {1, 2, 3};
  EXPECT_EQ(RouteSetupShares(batch, small_region, small_region).status().code(),
            absl::StatusCode::kNotFound);
}

TEST(RouteSharesTest, PartialDeliveryLeavesUeUnadmitted) {
  ProtocolHarness h(3, 4, 3, 4, 5);
  // Build a fresh UE whose shares reach only BSs 1 and 2.
  UserEquipment late(3, h.codec_, 4, h.prf_, h.prng_);
  std::vector<ProtocolMessage> batch = *late.Setup(h.acc_, h.prng_);
  std::set<uint64_t> region = {1, 2, 3, 4};
  RoutingResult routed = *RouteSetupShares(batch, region, {1, 2});
  EXPECT_FALSE(routed.complete);
  EXPECT_EQ(routed.deliveries.size(), 2u);
  // The harness admits only complete UEs, so UE 3 stays unregistered and its
  // updates are refused.
  EXPECT_FALSE(h.af_->IsRegistered(3));
  ProtocolMessage update = *late.MaskUpdate(std::vector<double>(4, 0.1), 0);
  EXPECT_EQ(h.af_->CollectUpdate(update).status().code(),
            absl::StatusCode::kFailedPrecondition);
}

TEST(UeMaskUpdateTest, ZeroUpdateIsThePureMask) {
  Prng prng(6);
  LinearHashPrf prf;
  FixedPointCodec codec = *FixedPointCodec::Create(16, 1.0, 8);
  UserEquipment ue(0, codec, 6, prf, prng);
  ProtocolMessage msg = *ue.MaskUpdate(std::vector<double>(6, 0.0), 4);
  EXPECT_EQ(msg.type(), MessageType::kMaskedUpdate);
  EXPECT_EQ(msg.iteration, 4u);
  EXPECT_EQ(std::get<MaskedUpdatePayload>(msg.payload).values,
            prf.Eval(ue.secret(), 4, 6).values);
}

TEST(UeMaskUpdateTest, UnmaskingRecoversUpdate) {
  Prng prng(7);
  LinearHashPrf prf;
  FixedPointCodec codec = *FixedPointCodec::Create(16, 1.0, 8);
  UserEquipment ue(0, codec, 32, prf, prng);
  std::vector<double> w = RandomUpdate(prng, 32);
  ProtocolMessage msg = *ue.MaskUpdate(w, 0);
  FieldVector unmasked =
      *VecSub(std::get<MaskedUpdatePayload>(msg.payload).values,
              prf.Eval(ue.secret(), 0, 32).values);
  std::vector<double> back = *DecodeSum(unmasked, codec, 1);
  for (size_t i = 0; i < w.size(); ++i) {
    EXPECT_LE(std::abs(back[i] - w[i]), std::ldexp(1.0, -17));
  }
}

TEST(UeMaskUpdateTest, PrecomputedMatchesOnTheFly) {
  Prng a(8), b(8);
  LinearHashPrf prf;
  FixedPointCodec codec = *FixedPointCodec::Create(16, 1.0, 8);
  UserEquipment eager(0, codec, 16, prf, a);
  UserEquipment lazy(0, codec, 16, prf, b);
  ASSERT_EQ(eager.secret(), lazy.secret());
  eager.PrecomputeMasks(5);
  EXPECT_EQ(eager.num_precomputed(), 5u);
  std::vector<double> w(16, 0.25);
  // t = 7 is beyond the precomputed window and falls back to evaluation.
  for (uint64_t t : {0, 3, 4, 7}) {
    EXPECT_EQ(*eager.MaskUpdate(w, t), *lazy.MaskUpdate(w, t));
  }
}

TEST(UeMaskUpdateTest, RejectsReuseAndBadInputs) {
  Prng prng(9);
  LinearHashPrf prf;
  FixedPointCodec codec = *FixedPointCodec::Create(16, 1.0, 8);
  UserEquipment ue(0, codec, 2, prf, prng);
  std::vector<double> w = {0.1, 0.2};
  ASSERT_TRUE(ue.MaskUpdate(w, 0).ok());
  EXPECT_EQ(ue.MaskUpdate(w, 0).status().code(),
            absl::StatusCode::kFailedPrecondition);
  std::vector<double> too_big = {0.1, 2.0};
  EXPECT_EQ(ue.MaskUpdate(too_big, 1).status().code(),
            absl::StatusCode::kOutOfRange);
  std::vector<double> wrong_dim = {0.1};
  EXPECT_FALSE(ue.MaskUpdate(wrong_dim, 2).ok());
}

TEST(UeMaskUpdateTest, DistinctUesUseDistinctMasks) {
  ProtocolHarness h(2, 4, 3, 8, 10);
  std::vector<double> w(8, 0.0);
  EXPECT_NE(*h.ues_[0]->MaskUpdate(w, 0), *h.ues_[1]->MaskUpdate(w, 0));
  EXPECT_NE(h.ues_[0]->secret(), h.ues_[1]->secret());
}

TEST(CollectUpdateTest, TracksOnlineListAndRejectsDuplicatesAndStale) {
  ProtocolHarness h(8, 4, 3, 4, 11);
  std::vector<double> w(4, 0.1);
  std::vector<ProtocolMessage> msgs;
  for (auto& ue : h.ues_) msgs.push_back(*ue->MaskUpdate(w, 0));
  for (const ProtocolMessage& m : msgs) {
    EXPECT_EQ(*h.af_->CollectUpdate(m),
              AggregationServer::CollectResult::kAccepted);
  }
  EXPECT_EQ(h.af_->CollectUpdate(msgs[3]).status().code(),
            absl::StatusCode::kAlreadyExists);
  std::optional<ProtocolMessage> list = h.af_->FinalizeOnlineList();
  ASSERT_TRUE(list.has_value());
  EXPECT_THAT(h.af_->online_list(), ElementsAre(0, 1, 2, 3, 4, 5, 6, 7));
  EXPECT_EQ(list->type(), MessageType::kOnlineList);

  // Arrivals after finalisation, or for another iteration, are stale.
  EXPECT_EQ(*h.af_->CollectUpdate(msgs[0]),
            AggregationServer::CollectResult::kStale);
  h.af_->Fallback();
  EXPECT_EQ(h.af_->iteration(), 1u);
  EXPECT_EQ(*h.af_->CollectUpdate(msgs[1]),
            AggregationServer::CollectResult::kStale);
  EXPECT_EQ(h.af_->stale_updates(), 2);
}

TEST(FinalizeOnlineListTest, CeilingOfFractionTimesN) {
  EXPECT_EQ(MinimumOnlineCount(1.0 / 3.0, 8), 3);
  EXPECT_EQ(MinimumOnlineCount(0.5, 8), 4);
  EXPECT_EQ(MinimumOnlineCount(0.0, 8), 1);
  EXPECT_EQ(MinimumOnlineCount(1.0, 8), 8);

  for (auto [online, proceeds] :
       std::vector<std::pair<int, bool>>{{3, true}, {2, false}, {8, true}}) {
    ProtocolHarness h(8, 4, 3, 4, 12);
    std::vector<double> w(4, 0.0);
    for (int i = 0; i < online; ++i) {
      ASSERT_TRUE(h.af_->CollectUpdate(*h.ues_[i]->MaskUpdate(w, 0)).ok());
    }
    EXPECT_EQ(h.af_->FinalizeOnlineList().has_value(), proceeds) << online;
  }
}

TEST(BsMaskShareTest, EvaluatedShareIsSumOfPerUeEvaluations) {
  ProtocolHarness h(4, 4, 3, 16, 13);
  std::vector<double> w(16, 0.0);
  for (auto& ue : h.ues_) {
    ASSERT_TRUE(h.af_->CollectUpdate(*ue->MaskUpdate(w, 0)).ok());
  }
  ProtocolMessage list = *h.af_->FinalizeOnlineList();
  // The evaluated share must be the mask of the BS's summed key share.
  for (auto& [j, bs] : h.bss_) {
    ProtocolMessage evaluated =
        *bs.ComputeMaskShare(list, MaskShareMode::kEvaluated, 16, h.prf_);
    ProtocolMessage compact =
        *bs.ComputeMaskShare(list, MaskShareMode::kCompact, 16, h.prf_);
    EXPECT_EQ(evaluated.sender, j);
    EXPECT_EQ(evaluated.PayloadSize(), 1u + 4u + 16u * 8u);
    EXPECT_EQ(compact.PayloadSize(), 1u + 8u);
    FieldElement key_sum = std::get<FieldElement>(
        std::get<MaskSharePayload>(compact.payload).value);
    EXPECT_EQ(std::get<FieldVector>(
                  std::get<MaskSharePayload>(evaluated.payload).value),
              h.prf_.Eval({key_sum}, 0, 16).values);
  }
}

TEST(BsMaskShareTest, MatchesSumOfShareEvaluations) {
  Prng prng(14);
  LinearHashPrf prf;
  BaseStation bs(2);
  std::vector<FieldElement> ys;
  for (uint64_t ue = 0; ue < 3; ++ue) {
    SecretShare share{F(2), RandomFieldElement(prng)};
    ys.push_back(share.y);
    ASSERT_TRUE(
        bs.ReceiveSetupShare({ue, 0, SetupSharePayload{2, share}}).ok());
  }
  ProtocolMessage single{kAggregatorId, 5, OnlineListPayload{{1}}};
  ProtocolMessage one =
      *bs.ComputeMaskShare(single, MaskShareMode::kEvaluated, 8, prf);
  EXPECT_EQ(
      std::get<FieldVector>(std::get<MaskSharePayload>(one.payload).value),
      prf.Eval({ys[1]}, 5, 8).values);

  ProtocolMessage all{kAggregatorId, 5, OnlineListPayload{{0, 1, 2}}};
  ProtocolMessage summed =
      *bs.ComputeMaskShare(all, MaskShareMode::kEvaluated, 8, prf);
  FieldVector expected(8);
  for (FieldElement y : ys) {
    ASSERT_TRUE(expected.AddAssign(prf.Eval({y}, 5, 8).values).ok());
  }
  EXPECT_EQ(
      std::get<FieldVector>(std::get<MaskSharePayload>(summed.payload).value),
      expected);

  ProtocolMessage unknown{kAggregatorId, 5, OnlineListPayload{{0, 9}}};
  EXPECT_EQ(bs.ComputeMaskShare(unknown, MaskShareMode::kEvaluated, 8, prf)
                .status()
                .code(),
            absl::StatusCode::kFailedPrecondition);
}

TEST(BsSetupTest, RejectsMisaddressedShares) {
  BaseStation bs(2);
  EXPECT_FALSE(
      bs.ReceiveSetupShare({0, 0, SetupSharePayload{3, {F(3), F(1)}}}).ok());
  EXPECT_FALSE(
      bs.ReceiveSetupShare({0, 0, SetupSharePayload{2, {F(3), F(1)}}}).ok());
  EXPECT_FALSE(bs.ReceiveSetupShare({0, 0, OnlineListPayload{}}).ok());
  EXPECT_EQ(bs.num_shares(), 0u);
}

TEST(RecoverMaskTest, ThresholdBehaviourAcrossBsSubsets) {
  for (MaskShareMode mode :
       {MaskShareMode::kEvaluated, MaskShareMode::kCompact}) {
    for (auto [bss, recovers] :
         std::vector<std::pair<std::set<uint64_t>, bool>>{{{1, 2, 3, 4}, true},
                                                          {{1, 2, 4}, true},
                                                          {{2, 3, 4}, true},
                                                          {{1, 3}, false},
                                                          {{4}, false}}) {
      ProtocolHarness h(8, 4, 3, 12, 15, mode);
      std::set<uint64_t> ues = Range(0, 8);
      ProtocolHarness::RoundResult r = h.RunRound(ues, bss);
      ASSERT_TRUE(r.list_ok);
      ASSERT_EQ(r.mask.has_value(), recovers);
      if (recovers) {
        EXPECT_EQ(*r.mask, h.MaskSumOracle(ues, 0));
      }
    }
  }
}

TEST(RecoverMaskTest, ModesProduceIdenticalMasks) {
  Prng prng(16);
  LinearHashPrf prf;
  AccessStructure acc = *AccessStructure::Create(3, 4);
  std::map<uint64_t, BaseStation> bss;
  for (uint64_t j = 1; j <= 4; ++j) bss.emplace(j, BaseStation(j));
  for (uint64_t ue = 0; ue < 5; ++ue) {
    for (const SecretShare& s : Split(RandomFieldElement(prng), acc, prng)) {
      ASSERT_TRUE(
          bss.at(s.x.value())
              .ReceiveSetupShare({ue, 0, SetupSharePayload{s.x.value(), s}})
              .ok());
    }
  }
  ProtocolMessage list{kAggregatorId, 3, OnlineListPayload{{0, 2, 3, 4}}};
  std::map<uint64_t, MaskSharePayload> evaluated, compact;
  for (auto& [j, bs] : bss) {
    evaluated[j] = std::get<MaskSharePayload>(
        bs.ComputeMaskShare(list, MaskShareMode::kEvaluated, 20, prf)->payload);
    compact[j] = std::get<MaskSharePayload>(
        bs.ComputeMaskShare(list, MaskShareMode::kCompact, 20, prf)->payload);
  }
  std::optional<FieldVector> a = *RecoverAggregatedMask(
      evaluated, acc, MaskShareMode::kEvaluated, 3, 20, prf);
  std::optional<FieldVector> b =
      *RecoverAggregatedMask(compact, acc, MaskShareMode::kCompact, 3, 20, prf);
  ASSERT_TRUE(a.has_value());
  ASSERT_TRUE(b.has_value());
  EXPECT_EQ(*a, *b);
  // Mixed modes are a protocol error, not a silent mismatch.
  EXPECT_FALSE(
      RecoverAggregatedMask(evaluated, acc, MaskShareMode::kCompact, 3, 20, prf)
          .ok());
}

TEST(UnmaskTest, SingleUeAverageIsItsUpdate) {
  ProtocolHarness h(1, 4, 3, 5, 17);
  std::vector<double> w = {0.5, 0.5, -0.25, 0.0, 1.0};
  ASSERT_TRUE(h.af_->CollectUpdate(*h.ues_[0]->MaskUpdate(w, 0)).ok());
  ProtocolMessage list = *h.af_->FinalizeOnlineList();
  for (auto& [j, bs] : h.bss_) {
    ASSERT_TRUE(h.af_
                    ->ReceiveMaskShare(*bs.ComputeMaskShare(
                        list, MaskShareMode::kEvaluated, 5, h.prf_))
                    .ok());
  }
  FieldVector mask = **h.af_->RecoverMask();
  std::vector<double> avg = *h.af_->UnmaskAndAggregate(mask);
  for (size_t i = 0; i < w.size(); ++i) {
    EXPECT_NEAR(avg[i], w[i], std::ldexp(1.0, -17));
  }
}

TEST(UnmaskTest, MatchesPlaintextOracleAndAlphaSummation) {
  for (uint64_t seed = 0; seed < 20; ++seed) {
    ProtocolHarness h(8, 4, 3, 24, 100 + seed);
    std::set<uint64_t> ues = {0, 2, 3, 5, 6, 7};
    ProtocolHarness::RoundResult r = h.RunRound(ues, {1, 2, 4});
    ASSERT_TRUE(r.mask.has_value());
    FieldVector field_sum = *h.af_->UnmaskedFieldSum(*r.mask);

    // Field-exact comparison against the plaintext sum of encodings.
    std::vector<std::optional<FieldVector>> oracle =
        *AlphaSummation({ues}, r.encoded, 1.0 / 3.0, 8);
    ASSERT_EQ(oracle.size(), 1u);
    ASSERT_TRUE(oracle[0].has_value());
    EXPECT_EQ(field_sum, *oracle[0]);

    std::vector<double> avg = *h.af_->UnmaskAndAggregate(*r.mask);
    const double tol = ues.size() * std::ldexp(1.0, -17) / ues.size();
    for (size_t i = 0; i < 24; ++i) {
      double plain = 0.0;
      for (const auto& [ue, w] : r.updates) plain += w[i];
      plain /= ues.size();
      EXPECT_LE(std::abs(avg[i] - plain), tol);
    }
  }
}

TEST(UnmaskTest, IdenticalUpdatesAverageToThemselves) {
  ProtocolHarness h(8, 4, 3, 3, 18);
  std::vector<double> w = {0.125, -0.75, 0.3};
  for (auto& ue : h.ues_) {
    ASSERT_TRUE(h.af_->CollectUpdate(*ue->MaskUpdate(w, 0)).ok());
  }
  ProtocolMessage list = *h.af_->FinalizeOnlineList();
  for (auto& [j, bs] : h.bss_) {
    ASSERT_TRUE(h.af_
                    ->ReceiveMaskShare(*bs.ComputeMaskShare(
                        list, MaskShareMode::kEvaluated, 3, h.prf_))
                    .ok());
  }
  std::vector<double> avg = *h.af_->UnmaskAndAggregate(**h.af_->RecoverMask());
  for (size_t i = 0; i < 3; ++i)
    EXPECT_NEAR(avg[i], w[i], std::ldexp(1.0, -17));
}

TEST(UnmaskTest, DroppedUesNeitherContributeNorAreNeeded) {
  std::set<uint64_t> ues = {1, 4};
  // With α = 1/4, two of eight UEs suffice.
  ProtocolHarness low(8, 4, 3, 10, 19, MaskShareMode::kEvaluated, 0.25);
  ProtocolHarness::RoundResult r = low.RunRound(ues, {1, 2, 3, 4});
  ASSERT_TRUE(r.mask.has_value());
  EXPECT_EQ(*r.mask, low.MaskSumOracle(ues, 0));
  EXPECT_NE(*r.mask, low.MaskSumOracle(Range(0, 8), 0));
}

TEST(MaskShareCollectionTest, RejectsDuplicatesAndEarlyShares) {
  ProtocolHarness h(8, 4, 3, 4, 20);
  ProtocolMessage share{1, 0, MaskSharePayload{F(1)}};
  EXPECT_EQ(h.af_->ReceiveMaskShare(share).code(),
            absl::StatusCode::kFailedPrecondition);
  std::vector<double> w(4, 0.0);
  for (auto& ue : h.ues_) {
    ASSERT_TRUE(h.af_->CollectUpdate(*ue->MaskUpdate(w, 0)).ok());
  }
  ProtocolMessage list = *h.af_->FinalizeOnlineList();
  ProtocolMessage real = *h.bss_.at(1).ComputeMaskShare(
      list, MaskShareMode::kEvaluated, 4, h.prf_);
  EXPECT_TRUE(h.af_->ReceiveMaskShare(real).ok());
  EXPECT_EQ(h.af_->ReceiveMaskShare(real).code(),
            absl::StatusCode::kAlreadyExists);
  EXPECT_THAT(h.af_->mask_share_senders(), ElementsAre(1));
}

TEST(FallbackTest, RebroadcastsUnchangedModelAndAdvances) {
  ProtocolHarness h(8, 4, 3, 3, 21);
  std::vector<double> before = h.af_->global_model();
  ProtocolMessage msg = h.af_->Fallback();
  EXPECT_EQ(msg.type(), MessageType::kGlobalModel);
  EXPECT_EQ(std::get<GlobalModelPayload>(msg.payload).model, before);
  EXPECT_EQ(h.af_->global_model(), before);
  EXPECT_EQ(h.af_->iteration(), 1u);

  std::vector<double> delta = {0.5, -0.5, 0.25};
  ProtocolMessage updated = *h.af_->CommitGlobalUpdate(delta);
  EXPECT_THAT(std::get<GlobalModelPayload>(updated.payload).model,
              ElementsAre(0.5, -0.5, 0.25));
  EXPECT_EQ(h.af_->iteration(), 2u);

  ASSERT_TRUE(h.ues_[0]->ApplyGlobalModel(updated).ok());
  EXPECT_THAT(h.ues_[0]->current_model(), ElementsAre(0.5, -0.5, 0.25));
}

TEST(FallbackTest, ThresholdRestoredResumesUpdates) {
  ProtocolHarness h(8, 4, 3, 6, 22);
  std::set<uint64_t> ues = Range(0, 8);
  ProtocolHarness::RoundResult r0 = h.RunRound(ues, {1, 2});
  EXPECT_FALSE(r0.mask.has_value());
  h.af_->Fallback();
  ProtocolHarness::RoundResult r1 = h.RunRound(ues, {1, 2, 3});
  ASSERT_TRUE(r1.mask.has_value());
  EXPECT_EQ(*r1.mask, h.MaskSumOracle(ues, 1));
}

TEST(AlphaSummationTest, SumsOrFailsPerSet) {
  std::map<uint64_t, FieldVector> inputs;
  for (uint64_t i = 0; i < 6; ++i) {
    inputs[i] = FieldVector(std::vector<FieldElement>{F(i + 1), F(10 * i)});
  }
  std::vector<std::optional<FieldVector>> all =
      *AlphaSummation({{0, 1, 2, 3, 4, 5}}, inputs, 1.0, 6);
  ASSERT_TRUE(all[0].has_value());
  EXPECT_EQ(*all[0], FieldVector(std::vector<FieldElement>{F(21), F(150)}));

  std::vector<std::optional<FieldVector>> split =
      *AlphaSummation({{0, 1, 2}, {3}}, inputs, 0.5, 6);
  EXPECT_TRUE(split[0].has_value());
  EXPECT_FALSE(split[1].has_value());

  EXPECT_FALSE(AlphaSummation({{0, 1}, {1, 2}}, inputs, 0.5, 6).ok());
  EXPECT_FALSE(AlphaSummation({{0, 9}}, inputs, 0.5, 6).ok());
}

}  // namespace
}  // namespace bsagg
