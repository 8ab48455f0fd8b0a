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

#ifndef RISKGATE_RISK_MATRIX_H_
#define RISKGATE_RISK_MATRIX_H_

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace riskgate::risk {

enum class Tier { kLow = 0, kMedium = 1, kHigh = 2, kCritical = 3 };

enum class Action {
  kRegularMonitoring,
  kDynamicDataMasking,
  kModelRollback,
  kRealTimeBlocking,
};

std::string_view ToString(Tier tier);
std::string_view ToString(Action action);
Action ActionFor(Tier tier);

enum class Scene { kGeneric, kMedical, kFinancial };
std::string_view ToString(Scene scene);
Scene ParseScene(std::string_view name);

// All components in [0, 1].
struct ThreatInputs {
  double freq = 0.0;
  double stealth = 0.0;
  double data_leak = 0.0;
  double model_bias = 0.0;
  double availability_impact = 0.0;

  void Validate() const;
};

// Maps a raw escape-event count in the temporal window to [0, 1].
double NormalizedFrequency(double events_per_window);

double ThreatLevel(const ThreatInputs& in);   // 0.6 freq + 0.4 stealth
double ImpactScope(const ThreatInputs& in);   // 0.5 D + 0.3 M + 0.2 S

struct RiskAssessment {
  double threat = 0.0;
  double impact = 0.0;
  double raw_score = 0.0;  // sqrt(T^2 + I^2), in [0, sqrt 2]
  double score = 0.0;      // raw_score / sqrt 2, in [0, 1]
  Tier tier = Tier::kLow;
  Action action = Action::kRegularMonitoring;
};

RiskAssessment RiskScore(double threat, double impact);

// Lower edges of Medium, High and Critical, for the score and for the
// abnormal-call rate. Low starts at 0 in both dimensions.
struct TierBands {
  std::array<double, 3> score = {0.35, 0.60, 0.75};
  std::array<double, 3> rate = {0.10, 0.15, 0.20};

  void Validate() const;
};

Tier ScoreTier(double score, const TierBands& bands = {});
Tier RateTier(double abnormal_rate, const TierBands& bands = {});

struct Classification {
  Tier tier = Tier::kLow;
  Action action = Action::kRegularMonitoring;
  Tier score_tier = Tier::kLow;
  Tier rate_tier = Tier::kLow;
};

// Final tier is the more severe of the two dimensions.
Classification Classify(double score, double abnormal_rate,
                        const TierBands& bands = {});

struct SceneThreshold {
  double theta_base = 0.15;
  double medical_alpha = 0.2;
  double financial_alpha = 0.3;

  double AlphaFor(Scene scene) const;
};

// theta_base * (1 + alpha * risk_scene)
double SceneThresholdValue(double theta_base, double scene_alpha,
                           double risk_scene);
double SceneThresholdValue(const SceneThreshold& cfg, Scene scene,
                           double risk_scene);

// Closed-loop parameters driven by observed output and traffic health.
struct FeedbackState {
  double review_tau = 0.85;
  bool level3_active = false;

  bool operator==(const FeedbackState&) const = default;
};

struct FeedbackObservation {
  double watermark_id_rate = 1.0;
  double abnormal_rate = 0.0;
  Scene scene = Scene::kGeneric;
};

struct ParameterUpdate {
  std::string parameter;  // "review.tau" or "response.level3"
  double old_value = 0.0;
  double new_value = 0.0;
  std::string reason;
};

inline constexpr double kWatermarkRateFloor = 0.85;
inline constexpr double kTightenedReviewTau = 0.92;
inline constexpr double kFinancialLevel3Rate = 0.18;

struct FeedbackResult {
  FeedbackState state;
  std::vector<ParameterUpdate> updates;  // empty when nothing changed
};

// Pure step: never loosens tau and never clears level 3, so repeating the
// same observation is a no-op.
FeedbackResult FeedbackStep(const FeedbackState& state,
                            const FeedbackObservation& observed);

}  // namespace riskgate::risk

#endif  // RISKGATE_RISK_MATRIX_H_
