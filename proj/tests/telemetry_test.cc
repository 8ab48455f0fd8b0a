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

#include "riskgate/telemetry.h"

#include <atomic>
#include <random>
#include <thread>

#include "exposition_grammar.h"
#include "gtest/gtest.h"

namespace riskgate::telemetry {
namespace {

using riskgate::testing::ParseExposition;

void AddGauge(Registry& r, Criticality c = Criticality::kCritical) {
  r.Register(MakeSpec("riskgate_risk_score", Family::kSystem, c, "Risk."));
}

TEST(MetricSpecTest, PeriodFollowsCriticality) {
  EXPECT_EQ(MakeSpec("a", Family::kInput, Criticality::kCritical).sample_period_s, 1);
  EXPECT_EQ(MakeSpec("b", Family::kInput, Criticality::kNonCritical).sample_period_s, 5);
  MetricSpec bad = MakeSpec("c", Family::kInput, Criticality::kCritical);
  bad.sample_period_s = 5;
  EXPECT_THROW(bad.Validate(), std::invalid_argument);
  EXPECT_THROW(MakeSpec("1bad", Family::kInput, Criticality::kCritical).Validate(),
               std::invalid_argument);
}

TEST(RecordTest, FastValuesCoalesceToLatest) {
  Registry r;
  AddGauge(r);
  EXPECT_EQ(r.Record("riskgate_risk_score", 0.1, 100.2), RecordOutcome::kStored);
  EXPECT_EQ(r.Record("riskgate_risk_score", 0.4, 100.5), RecordOutcome::kCoalesced);
  const auto h = r.History("riskgate_risk_score");
  ASSERT_EQ(h.size(), 1u);
  EXPECT_DOUBLE_EQ(h[0].value, 0.4);
}

TEST(RecordTest, BoundaryValueIsStored) {
  Registry r;
  AddGauge(r);
  r.Record("riskgate_risk_score", 0.1, 100.5);
  EXPECT_EQ(r.Record("riskgate_risk_score", 0.2, 101.0), RecordOutcome::kStored);
  EXPECT_EQ(r.History("riskgate_risk_score").size(), 2u);
}

TEST(RecordTest, UnknownMetricThrows) {
  Registry r;
  AddGauge(r);
  EXPECT_THROW(r.Record("nope", 1.0, 0.0), UnknownMetricError);
}

TEST(RecordTest, LateValuesDropped) {
  Registry r;
  AddGauge(r);
  r.Record("riskgate_risk_score", 0.1, 10.0);
  EXPECT_EQ(r.Record("riskgate_risk_score", 0.9, 8.0), RecordOutcome::kDroppedLate);
}

TEST(RecordTest, AtMostOneSamplePerPeriodAndRingBounded) {
  Registry r;
  r.Register(MakeSpec("m", Family::kOutput, Criticality::kNonCritical, "", 16, 60));
  std::mt19937_64 rng(4);
  double ts = 0.0;
  for (int i = 0; i < 500; ++i) {
    ts += std::uniform_real_distribution<double>(0.0, 3.0)(rng);
    r.Record("m", i, ts);
  }
  const auto h = r.History("m");
  EXPECT_LE(h.size(), 12u);
  for (std::size_t i = 1; i < h.size(); ++i) {
    EXPECT_LT(std::floor(h[i - 1].ts / 5), std::floor(h[i].ts / 5));
  }
}

TEST(RegistryTest, DuplicateRegistrationRejected) {
  Registry r;
  AddGauge(r);
  EXPECT_THROW(r.Register(MakeSpec("riskgate_risk_score", Family::kSystem,
                                   Criticality::kCritical)),
               std::invalid_argument);
}

TEST(StorageEstimateTest, Examples) {
  const MetricSpec one = MakeSpec("a", Family::kInput, Criticality::kCritical, "", 16, 3600);
  EXPECT_DOUBLE_EQ(StorageEstimate(std::span(&one, 1)), 57600.0);
  EXPECT_DOUBLE_EQ(StorageEstimate({}), 0.0);
  MetricSpec doubled = one;
  doubled.retention_s *= 2;
  EXPECT_DOUBLE_EQ(StorageEstimate(std::span(&doubled, 1)), 115200.0);
}

TEST(StorageEstimateTest, AdditiveOverDisjointLists) {
  std::mt19937_64 rng(15);
  std::vector<MetricSpec> specs;
  for (int i = 0; i < 40; ++i) {
    specs.push_back(MakeSpec("m" + std::to_string(i), Family::kSystem,
                             rng() % 2 ? Criticality::kCritical : Criticality::kNonCritical,
                             "", 1 + rng() % 64, 1 + rng() % 100000));
  }
  const std::span<const MetricSpec> all(specs);
  EXPECT_DOUBLE_EQ(StorageEstimate(all),
                   StorageEstimate(all.first(17)) + StorageEstimate(all.subspan(17)));
}

TEST(ExposeTest, GaugeLineParses) {
  Registry r;
  AddGauge(r);
  r.Record("riskgate_risk_score", 0.42, 1.0);
  const std::string doc = Expose(r);
  EXPECT_NE(doc.find("riskgate_risk_score 0.42\n"), std::string::npos);
  const auto p = ParseExposition(doc);
  ASSERT_TRUE(p.ok) << p.error;
  EXPECT_DOUBLE_EQ(p.samples.at("riskgate_risk_score"), 0.42);
  EXPECT_EQ(p.types.at("riskgate_risk_score"), "gauge");
}

TEST(ExposeTest, EmptyRegistryIsValidEmptyDocument) {
  const Registry r;
  EXPECT_EQ(Expose(r), "");
  EXPECT_TRUE(ParseExposition(Expose(r)).ok);
}

TEST(ExposeTest, HelpEscapingAndSpecialValues) {
  Registry r;
  r.Register(MakeSpec("a", Family::kSystem, Criticality::kCritical, "back\\slash\nline"));
  r.Register(MakeSpec("b", Family::kSystem, Criticality::kCritical, "b"));
  r.Register(MakeSpec("c", Family::kSystem, Criticality::kCritical, "c"));
  r.Record("a", INFINITY, 0);
  r.Record("b", std::nan(""), 0);
  r.Record("c", 1e-300, 0);
  const auto p = ParseExposition(Expose(r));
  ASSERT_TRUE(p.ok) << p.error << "\n" << Expose(r);
  EXPECT_TRUE(std::isinf(p.samples.at("a")));
  EXPECT_TRUE(std::isnan(p.samples.at("b")));
  EXPECT_DOUBLE_EQ(p.samples.at("c"), 1e-300);
}

TEST(ExposeTest, GatewaySpecsAreTwelveDistinctPrefixedGauges) {
  Registry r;
  const auto specs = GatewayMetricSpecs();
  ASSERT_EQ(specs.size(), 12u);
  std::set<Family> families;
  for (const MetricSpec& s : specs) {
    EXPECT_EQ(s.name.rfind("riskgate_", 0), 0u);
    families.insert(s.family);
    r.Register(s);
  }
  EXPECT_EQ(families.size(), 4u);
  const auto p = ParseExposition(Expose(r));
  ASSERT_TRUE(p.ok) << p.error;
  EXPECT_EQ(p.types.size(), 12u);
}

TEST(ExposeTest, ConcurrentScrapesStayParseable) {
  Registry r;
  for (const MetricSpec& s : GatewayMetricSpecs()) r.Register(s);
  std::atomic<bool> stop{false};
  std::thread writer([&] {
    double ts = 0;
    while (!stop) {
      for (const MetricSpec& s : GatewayMetricSpecs()) r.Record(s.name, ts * 0.001, ts);
      ts += 0.25;
    }
  });
  for (int i = 0; i < 200; ++i) {
    const auto p = ParseExposition(Expose(r));
    ASSERT_TRUE(p.ok) << p.error;
  }
  stop = true;
  writer.join();
}

}  // namespace
}  // namespace riskgate::telemetry
