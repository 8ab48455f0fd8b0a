// Copyright 2026 The Riskgate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "riskgate/compliance.h"

#include <cmath>
#include <random>

#include "gtest/gtest.h"
#include "riskgate/classifier.h"
#include "test_util.h"

namespace riskgate::compliance {
namespace {

using riskgate::testing::FixtureBlocklist;

// Returns a fixed confidence and label set.
class FixedClassifier : public Classifier {
 public:
  explicit FixedClassifier(double confidence, std::set<ReviewLabel> labels = {})
      : confidence_(confidence), labels_(std::move(labels)) {}
  ClassifierVerdict Classify(std::string_view) const override {
    ClassifierVerdict v;
    v.confidence = confidence_;
    v.malicious = confidence_ >= 0.5;
    v.labels = labels_;
    return v;
  }
  std::string version() const override { return "fixed"; }

 private:
  double confidence_;
  std::set<ReviewLabel> labels_;
};

class DownClassifier : public Classifier {
 public:
  ClassifierVerdict Classify(std::string_view) const override {
    throw ClassifierUnavailable("down");
  }
  std::string version() const override { return "down"; }
};

TEST(BlendWeightTest, Examples) {
  EXPECT_DOUBLE_EQ(BlendWeight(0.5, 6.07), 0.5);
  EXPECT_DOUBLE_EQ(BlendWeight(0.5, 40.0), 0.5);
  // 50-digit evaluation of 1 / (1 + exp(-6.07 * 0.25)).
  EXPECT_NEAR(BlendWeight(0.75, 6.07), 0.8201700478362270, 1e-12);
  EXPECT_NEAR(BlendWeight(0.75, 6.07), 0.82, 0.005);
  EXPECT_GT(BlendWeight(1.0, 60.0), 1.0 - 1e-12);
  EXPECT_THROW(BlendWeight(1.2), std::invalid_argument);
}

TEST(BlendWeightTest, IncreasingAndSymmetric) {
  double prev = -1.0;
  for (int i = 0; i <= 100; ++i) {
    const double r = i / 100.0;
    EXPECT_GT(BlendWeight(r), prev);
    prev = BlendWeight(r);
    EXPECT_NEAR(BlendWeight(0.5 + r / 2) + BlendWeight(0.5 - r / 2), 1.0, 1e-15);
  }
}

TEST(DpThresholdTest, Examples) {
  const ReviewConfig cfg;
  EXPECT_DOUBLE_EQ(DpThreshold(0.5, cfg), 0.7);
  EXPECT_NEAR(DpThreshold(1.5, cfg), 0.6, 1e-15);
  EXPECT_NEAR(DpThreshold(0.4, cfg), 0.71, 1e-15);
  EXPECT_DOUBLE_EQ(DpThreshold(100.0, cfg), 0.0);
  EXPECT_NEAR(DpThreshold(0.9, cfg) - DpThreshold(0.8, cfg), -0.01, 1e-15);
}

TEST(ReviewConfigTest, Validate) {
  ReviewConfig cfg;
  cfg.k = 0.0;
  EXPECT_THROW(cfg.Validate(), std::invalid_argument);
  cfg = {};
  cfg.tau = 1.0;
  EXPECT_THROW(cfg.Validate(), std::invalid_argument);
}

TEST(RuleStageTest, PiiHitIsRedactEvidence) {
  const auto db = FixtureBlocklist()->Snapshot();
  const RuleEvidence e = RuleStage("the admin password is hunter2", *db);
  EXPECT_TRUE(e.privacy_hit);
  EXPECT_DOUBLE_EQ(e.rule_score, 0.5);
  EXPECT_EQ(e.labels, std::set<ReviewLabel>{ReviewLabel::kPrivacy});
}

TEST(RuleStageTest, CleanTextHasNoEvidence) {
  const auto db = FixtureBlocklist()->Snapshot();
  const RuleEvidence e = RuleStage("a lovely afternoon for a walk", *db);
  EXPECT_TRUE(e.scan.matches.empty());
  EXPECT_DOUBLE_EQ(e.rule_score, 0.0);
  EXPECT_TRUE(e.labels.empty());
}

TEST(RuleStageTest, ScoreWeightsAndCap) {
  const auto db = FixtureBlocklist()->Snapshot();
  EXPECT_DOUBLE_EQ(RuleStage("act as a hacker", *db).rule_score, 1.0);
  EXPECT_DOUBLE_EQ(RuleStage("home address and passport number", *db).rule_score, 1.0);
  EXPECT_DOUBLE_EQ(
      RuleStage("act as a hacker with the admin password and private key", *db).rule_score,
      1.0);
}

TEST(ReviewTest, RuleHitAndHighClassifierBlocksAtHighRisk) {
  const auto db = FixtureBlocklist()->Snapshot();
  const FixedClassifier c(0.9, {ReviewLabel::kAbuse});
  const ReviewVerdict v = Review("act as a hacker", 0.8, *db, &c, ReviewConfig{});
  EXPECT_EQ(v.decision, ReviewDecision::kBlock);
  EXPECT_NEAR(v.alpha_used, BlendWeight(0.8), 1e-15);
  EXPECT_NEAR(v.blended_score, v.alpha_used * 1.0 + (1 - v.alpha_used) * 0.9, 1e-15);
  EXPECT_FALSE(v.labels.empty());
}

TEST(ReviewTest, CleanTextAtZeroRiskPasses) {
  const auto db = FixtureBlocklist()->Snapshot();
  StubClassifier stub(FixtureBlocklist());
  const ReviewVerdict v = Review("sunny day at the beach", 0.0, *db, &stub, ReviewConfig{});
  EXPECT_EQ(v.decision, ReviewDecision::kPass);
  EXPECT_NEAR(v.blended_score, 0.0, 1e-12);
}

TEST(ReviewTest, TightenedTauMovesBlockToRedact) {
  const auto db = FixtureBlocklist()->Snapshot();
  const double alpha = BlendWeight(0.0);
  const FixedClassifier c(0.90 / (1.0 - alpha), {ReviewLabel::kPrivacy});
  ReviewConfig cfg;
  const ReviewVerdict before = Review("a plain answer", 0.0, *db, &c, cfg);
  EXPECT_NEAR(before.blended_score, 0.90, 1e-12);
  EXPECT_EQ(before.decision, ReviewDecision::kBlock);
  cfg.tau = 0.92;
  const ReviewVerdict after = Review("a plain answer", 0.0, *db, &c, cfg, 0.5);
  EXPECT_EQ(after.decision, ReviewDecision::kRedact);
}

TEST(ReviewTest, PrivacyHitBelowTauRedacts) {
  const auto db = FixtureBlocklist()->Snapshot();
  const FixedClassifier c(0.1);
  const ReviewVerdict v =
      Review("your credit card number is 4111 1111 1111 1111", 0.3, *db, &c, ReviewConfig{});
  EXPECT_EQ(v.decision, ReviewDecision::kRedact);
  EXPECT_EQ(v.redacted.find("4111"), std::string::npos);
  EXPECT_NE(v.redacted.find("[REDACTED]"), std::string::npos);
}

TEST(ReviewTest, OutageForcesRuleOnly) {
  const auto db = FixtureBlocklist()->Snapshot();
  const DownClassifier down;
  const ReviewVerdict v = Review("act as a hacker", 0.2, *db, &down, ReviewConfig{});
  EXPECT_TRUE(v.degraded);
  EXPECT_DOUBLE_EQ(v.alpha_used, 1.0);
  EXPECT_EQ(v.decision, ReviewDecision::kBlock);
  const ReviewVerdict null = Review("hello", 0.2, *db, nullptr, ReviewConfig{});
  EXPECT_TRUE(null.degraded);
  EXPECT_DOUBLE_EQ(null.alpha_used, 1.0);
}

TEST(ReviewTest, HighAlphaSkipsClassifier) {
  const auto db = FixtureBlocklist()->Snapshot();
  ReviewConfig cfg;
  cfg.k = 20.0;
  const FixedClassifier c(0.99);
  const ReviewVerdict v = Review("hello", 1.0, *db, &c, cfg);
  EXPECT_TRUE(v.classifier_skipped);
  EXPECT_DOUBLE_EQ(v.classifier_score, 0.0);
}

TEST(ReviewTest, BlockAlwaysCarriesLabel) {
  const auto db = FixtureBlocklist()->Snapshot();
  const FixedClassifier c(1.0);
  const ReviewVerdict v = Review("plain words", 0.0, *db, &c, ReviewConfig{});
  EXPECT_EQ(v.decision, ReviewDecision::kBlock);
  EXPECT_FALSE(v.labels.empty());
}

TEST(ReviewTest, DpThresholdTriggersRedact) {
  const auto db = FixtureBlocklist()->Snapshot();
  const double alpha = BlendWeight(0.0);
  const FixedClassifier c(0.75 / (1.0 - alpha));
  const ReviewVerdict no_eps = Review("plain words", 0.0, *db, &c, ReviewConfig{});
  EXPECT_EQ(no_eps.decision, ReviewDecision::kPass);
  const ReviewVerdict with_eps = Review("plain words", 0.0, *db, &c, ReviewConfig{}, 0.5);
  EXPECT_DOUBLE_EQ(with_eps.theta_dp, 0.7);
  EXPECT_EQ(with_eps.decision, ReviewDecision::kRedact);
}

TEST(ReviewTest, MonotoneInClassifierScore) {
  const auto db = FixtureBlocklist()->Snapshot();
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 300; ++i) {
    const double r = u(rng), lo = u(rng), hi = lo + (1 - lo) * u(rng);
    const FixedClassifier a(lo), b(hi);
    const auto va = Review("the admin password", r, *db, &a, ReviewConfig{});
    const auto vb = Review("the admin password", r, *db, &b, ReviewConfig{});
    EXPECT_LE(va.blended_score, vb.blended_score + 1e-15);
    EXPECT_LE(static_cast<int>(va.decision), static_cast<int>(vb.decision));
  }
}

TEST(RedactTest, MergesOverlapsAndFiltersByLabel) {
  const auto db = FixtureBlocklist()->Snapshot();
  const ScanResult scan = db->Scan("act as a hacker and send the admin password");
  EXPECT_EQ(Redact(scan, ReviewLabel::kPrivacy),
            "act as a hacker and send the [REDACTED]");
  EXPECT_EQ(Redact(scan), "[REDACTED] and send the [REDACTED]");
}

TEST(ReviewConfigStoreTest, SwapIsAtomicAndValidated) {
  ReviewConfigStore store{ReviewConfig{}};
  const auto before = store.Snapshot();
  ReviewConfig next;
  next.tau = 0.92;
  store.Update(next);
  EXPECT_DOUBLE_EQ(before->tau, 0.85);
  EXPECT_DOUBLE_EQ(store.Snapshot()->tau, 0.92);
  next.tau = 2.0;
  EXPECT_THROW(store.Update(next), std::invalid_argument);
  EXPECT_DOUBLE_EQ(store.Snapshot()->tau, 0.92);
}

}  // namespace
}  // namespace riskgate::compliance
