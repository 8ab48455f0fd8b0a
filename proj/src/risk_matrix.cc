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

#include "riskgate/risk_matrix.h"

#include <algorithm>
#include <stdexcept>

namespace riskgate::risk {

namespace {

bool InUnit(double x) { return x >= 0.0 && x <= 1.0; }

Tier BandTier(double x, const std::array<double, 3>& edges) {
  if (x >= edges[2]) return Tier::kCritical;
  if (x >= edges[1]) return Tier::kHigh;
  if (x >= edges[0]) return Tier::kMedium;
  return Tier::kLow;
}

}  // namespace

std::string_view ToString(Tier tier) {
  switch (tier) {
    case Tier::kLow:
      return "Low";
    case Tier::kMedium:
      return "Medium";
    case Tier::kHigh:
      return "High";
    case Tier::kCritical:
      return "Critical";
  }
  return "Low";
}

std::string_view ToString(Action action) {
  switch (action) {
    case Action::kRegularMonitoring:
      return "RegularMonitoring";
    case Action::kDynamicDataMasking:
      return "DynamicDataMasking";
    case Action::kModelRollback:
      return "ModelRollback";
    case Action::kRealTimeBlocking:
      return "RealTimeBlocking";
  }
  return "RegularMonitoring";
}

Action ActionFor(Tier tier) {
  switch (tier) {
    case Tier::kLow:
      return Action::kRegularMonitoring;
    case Tier::kMedium:
      return Action::kDynamicDataMasking;
    case Tier::kHigh:
      return Action::kModelRollback;
    case Tier::kCritical:
      return Action::kRealTimeBlocking;
  }
  return Action::kRegularMonitoring;
}

std::string_view ToString(Scene scene) {
  switch (scene) {
    case Scene::kGeneric:
      return "generic";
    case Scene::kMedical:
      return "medical";
    case Scene::kFinancial:
      return "financial";
  }
  return "generic";
}

Scene ParseScene(std::string_view name) {
  if (name == "generic") return Scene::kGeneric;
  if (name == "medical") return Scene::kMedical;
  if (name == "financial") return Scene::kFinancial;
  throw std::invalid_argument("unknown scene: " + std::string(name));
}

void ThreatInputs::Validate() const {
  if (!InUnit(freq) || !InUnit(stealth) || !InUnit(data_leak) ||
      !InUnit(model_bias) || !InUnit(availability_impact)) {
    throw std::invalid_argument("threat inputs must lie in [0, 1]");
  }
}

double NormalizedFrequency(double events_per_window) {
  return std::clamp(events_per_window / 10.0, 0.0, 1.0);
}

double ThreatLevel(const ThreatInputs& in) {
  in.Validate();
  return 0.6 * in.freq + 0.4 * in.stealth;
}

double ImpactScope(const ThreatInputs& in) {
  in.Validate();
  return 0.5 * in.data_leak + 0.3 * in.model_bias +
         0.2 * in.availability_impact;
}

RiskAssessment RiskScore(double threat, double impact) {
  if (!InUnit(threat) || !InUnit(impact)) {
    throw std::invalid_argument("threat and impact must lie in [0, 1]");
  }
  RiskAssessment r;
  r.threat = threat;
  r.impact = impact;
  r.raw_score = std::hypot(threat, impact);
  r.score = std::min(1.0, r.raw_score / std::sqrt(2.0));
  r.tier = ScoreTier(r.score);
  r.action = ActionFor(r.tier);
  return r;
}

void TierBands::Validate() const {
  for (const auto* edges : {&score, &rate}) {
    const auto& e = *edges;
    if (!(0.0 < e[0] && e[0] < e[1] && e[1] < e[2] && e[2] <= 1.0)) {
      throw std::invalid_argument(
          "tier band edges must be strictly increasing within (0, 1]");
    }
  }
}

Tier ScoreTier(double score, const TierBands& bands) {
  return BandTier(score, bands.score);
}

Tier RateTier(double abnormal_rate, const TierBands& bands) {
  return BandTier(abnormal_rate, bands.rate);
}

Classification Classify(double score, double abnormal_rate,
                        const TierBands& bands) {
  if (!InUnit(score) || !InUnit(abnormal_rate)) {
    throw std::invalid_argument("score and abnormal rate must lie in [0, 1]");
  }
  Classification c;
  c.score_tier = ScoreTier(score, bands);
  c.rate_tier = RateTier(abnormal_rate, bands);
  c.tier = std::max(c.score_tier, c.rate_tier);
  c.action = ActionFor(c.tier);
  return c;
}

double SceneThreshold::AlphaFor(Scene scene) const {
  switch (scene) {
    case Scene::kMedical:
      return medical_alpha;
    case Scene::kFinancial:
      return financial_alpha;
    case Scene::kGeneric:
      return 0.0;
  }
  return 0.0;
}

double SceneThresholdValue(double theta_base, double scene_alpha,
                           double risk_scene) {
  if (!InUnit(risk_scene)) {
    throw std::invalid_argument("scene risk must lie in [0, 1]");
  }
  return theta_base * (1.0 + scene_alpha * risk_scene);
}

double SceneThresholdValue(const SceneThreshold& cfg, Scene scene,
                           double risk_scene) {
  return SceneThresholdValue(cfg.theta_base, cfg.AlphaFor(scene), risk_scene);
}

FeedbackResult FeedbackStep(const FeedbackState& state,
                            const FeedbackObservation& observed) {
  if (!InUnit(observed.watermark_id_rate) || !InUnit(observed.abnormal_rate)) {
    throw std::invalid_argument("feedback rates must lie in [0, 1]");
  }
  FeedbackResult result{state, {}};
  if (observed.watermark_id_rate < kWatermarkRateFloor &&
      state.review_tau < kTightenedReviewTau) {
    result.state.review_tau = kTightenedReviewTau;
    result.updates.push_back({"review.tau", state.review_tau,
                              kTightenedReviewTau,
                              "watermark identification rate below 0.85"});
  }
  if (observed.scene == Scene::kFinancial &&
      observed.abnormal_rate > kFinancialLevel3Rate && !state.level3_active) {
    result.state.level3_active = true;
    result.updates.push_back({"response.level3", 0.0, 1.0,
                              "financial abnormal call rate above 18%"});
  }
  return result;
}

}  // namespace riskgate::risk
