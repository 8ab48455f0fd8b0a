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

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace riskgate::compliance {

namespace {

constexpr double kAbuseRuleWeight = 1.0;
constexpr double kOtherRuleWeight = 0.5;
constexpr std::string_view kRedactionMark = "[REDACTED]";

}  // namespace

void ReviewConfig::Validate() const {
  if (!(k > 0.0)) throw std::invalid_argument("review.k must be positive");
  if (!(tau > 0.0 && tau < 1.0)) {
    throw std::invalid_argument("review.tau must lie in (0, 1)");
  }
  if (!(epsilon_base > 0.0)) {
    throw std::invalid_argument("review.epsilon_base must be positive");
  }
  if (!(classifier_skip_alpha > 0.5 && classifier_skip_alpha <= 1.0)) {
    throw std::invalid_argument("review.classifier_skip_alpha must lie in (0.5, 1]");
  }
}

std::string_view ToString(ReviewDecision d) {
  switch (d) {
    case ReviewDecision::kPass:
      return "pass";
    case ReviewDecision::kRedact:
      return "redact";
    case ReviewDecision::kBlock:
      return "block";
  }
  return "pass";
}

RuleEvidence RuleStage(std::string_view text, const BlocklistDb& db) {
  RuleEvidence ev;
  ev.scan = db.Scan(text);
  // Strongest label per start offset, so overlapping rules count once.
  std::map<std::size_t, double> weight_at;
  for (const RuleMatch& m : ev.scan.matches) {
    ev.labels.insert(m.label);
    if (m.label == ReviewLabel::kPrivacy) ev.privacy_hit = true;
    const double w =
        m.label == ReviewLabel::kAbuse ? kAbuseRuleWeight : kOtherRuleWeight;
    double& slot = weight_at[m.begin];
    slot = std::max(slot, w);
  }
  double total = 0.0;
  for (const auto& [_, w] : weight_at) total += w;
  ev.rule_score = std::min(1.0, total);
  return ev;
}

double BlendWeight(double risk_score, double k) {
  if (!(risk_score >= 0.0 && risk_score <= 1.0)) {
    throw std::invalid_argument("risk score must lie in [0, 1]");
  }
  return 1.0 / (1.0 + std::exp(-k * (risk_score - 0.5)));
}

double DpThreshold(double epsilon_current, const ReviewConfig& cfg) {
  if (!(epsilon_current > 0.0)) {
    throw std::invalid_argument("epsilon must be positive");
  }
  return std::clamp(
      cfg.theta_dp_base - cfg.dp_coupling * (epsilon_current - cfg.epsilon_base),
      0.0, 1.0);
}

std::string Redact(const ScanResult& scan, std::optional<ReviewLabel> label) {
  std::string out;
  std::size_t cursor = 0;
  for (const RuleMatch& m : scan.matches) {
    if (label && m.label != *label) continue;
    if (m.begin >= cursor) {
      out.append(scan.normalized, cursor, m.begin - cursor);
      out.append(kRedactionMark);
      cursor = m.end;
    } else {
      cursor = std::max(cursor, m.end);  // overlaps the previous mark
    }
  }
  out.append(scan.normalized, cursor, std::string::npos);
  return out;
}

ReviewVerdict Review(std::string_view text, double risk_score,
                     const BlocklistDb& db, const Classifier* classifier,
                     const ReviewConfig& cfg,
                     std::optional<double> epsilon_current) {
  cfg.Validate();
  ReviewVerdict v;
  const RuleEvidence rules = RuleStage(text, db);
  v.rule_score = rules.rule_score;

  double alpha = BlendWeight(risk_score, cfg.k);
  std::set<ReviewLabel> classifier_labels;
  if (alpha >= cfg.classifier_skip_alpha) {
    v.classifier_skipped = true;
  } else if (classifier == nullptr) {
    v.degraded = true;
  } else {
    try {
      const ClassifierVerdict cv = classifier->Classify(text);
      v.classifier_score = std::clamp(cv.confidence, 0.0, 1.0);
      classifier_labels = cv.labels;
    } catch (const ClassifierUnavailable&) {
      v.degraded = true;
    }
  }
  if (v.degraded) alpha = 1.0;
  v.alpha_used = alpha;
  v.blended_score = alpha * v.rule_score + (1.0 - alpha) * v.classifier_score;
  if (epsilon_current) v.theta_dp = DpThreshold(*epsilon_current, cfg);

  if (v.blended_score >= cfg.tau) {
    v.decision = ReviewDecision::kBlock;
    if (v.rule_score > 0.0) v.labels.insert(rules.labels.begin(), rules.labels.end());
    if (v.classifier_score > 0.0 && (1.0 - alpha) > 0.0) {
      v.labels.insert(classifier_labels.begin(), classifier_labels.end());
    }
    // A classifier that fired without naming a category is treated as abuse.
    if (v.labels.empty()) v.labels.insert(ReviewLabel::kAbuse);
    return v;
  }
  if (rules.privacy_hit || (epsilon_current && v.blended_score >= v.theta_dp)) {
    v.decision = ReviewDecision::kRedact;
    v.labels = rules.labels;
    v.redacted = rules.privacy_hit ? Redact(rules.scan, ReviewLabel::kPrivacy)
                                   : Redact(rules.scan);
  }
  return v;
}

ReviewConfigStore::ReviewConfigStore(ReviewConfig initial) {
  initial.Validate();
  current_ = std::make_shared<const ReviewConfig>(initial);
}

std::shared_ptr<const ReviewConfig> ReviewConfigStore::Snapshot() const {
  std::lock_guard<std::mutex> lock(mu_);
  return current_;
}

void ReviewConfigStore::Update(const ReviewConfig& next) {
  next.Validate();
  auto fresh = std::make_shared<const ReviewConfig>(next);
  std::lock_guard<std::mutex> lock(mu_);
  current_ = std::move(fresh);
}

}  // namespace riskgate::compliance
