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

// Output review. A rule stage and a classifier stage each score the
// generated text; the current risk score R decides how much the rules are
// trusted:
//
//   alpha   = 1 / (1 + exp(-k (R - 0.5)))
//   blended = alpha * rule_score + (1 - alpha) * classifier_score
//
// Output is blocked at blended >= tau and redacted when it carries privacy
// hits or reaches the privacy-budget-coupled threshold theta_dp.

#ifndef RISKGATE_COMPLIANCE_H_
#define RISKGATE_COMPLIANCE_H_

#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "riskgate/blocklist.h"
#include "riskgate/classifier.h"

namespace riskgate::compliance {

struct ReviewConfig {
  double k = 6.07;
  double tau = 0.85;
  double theta_dp_base = 0.7;
  double dp_coupling = 0.1;
  double epsilon_base = 0.5;
  // Above this rule weight the classifier stage is not consulted.
  double classifier_skip_alpha = 0.95;

  void Validate() const;
};

enum class ReviewDecision { kPass, kRedact, kBlock };
std::string_view ToString(ReviewDecision d);

struct RuleEvidence {
  ScanResult scan;
  double rule_score = 0.0;
  std::set<ReviewLabel> labels;
  bool privacy_hit = false;
};

// Abuse hits weigh 1.0 and privacy or bias hits 0.5 per distinct start
// offset; the sum is capped at 1.
RuleEvidence RuleStage(std::string_view text, const BlocklistDb& db);

double BlendWeight(double risk_score, double k = 6.07);

// clamp(theta_dp_base - dp_coupling * (epsilon_current - epsilon_base), 0, 1)
double DpThreshold(double epsilon_current, const ReviewConfig& cfg = {});

struct ReviewVerdict {
  ReviewDecision decision = ReviewDecision::kPass;
  std::set<ReviewLabel> labels;
  double blended_score = 0.0;
  double alpha_used = 0.0;
  double rule_score = 0.0;
  double classifier_score = 0.0;
  double theta_dp = 1.0;
  bool classifier_skipped = false;
  bool degraded = false;
  std::string redacted;  // set when decision is kRedact
};

// `epsilon_current` couples the redact threshold to the privacy budget;
// without it only privacy rule hits trigger redaction. `classifier` may be
// null, which is handled like an outage.
ReviewVerdict Review(std::string_view text, double risk_score,
                     const BlocklistDb& db, const Classifier* classifier,
                     const ReviewConfig& cfg,
                     std::optional<double> epsilon_current = std::nullopt);

// Replaces the byte spans of matches carrying `label` (or every match when
// `label` is empty) with "[REDACTED]". Operates on scan.normalized.
std::string Redact(const ScanResult& scan,
                   std::optional<ReviewLabel> label = std::nullopt);

// Live review configuration; the feedback loop swaps in new snapshots.
class ReviewConfigStore {
 public:
  explicit ReviewConfigStore(ReviewConfig initial);

  std::shared_ptr<const ReviewConfig> Snapshot() const;
  // Validates, then replaces the snapshot.
  void Update(const ReviewConfig& next);

 private:
  mutable std::mutex mu_;
  std::shared_ptr<const ReviewConfig> current_;
};

}  // namespace riskgate::compliance

#endif  // RISKGATE_COMPLIANCE_H_
