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

#include "riskgate/input_filter.h"

#include <algorithm>
#include <cstdio>
#include <set>
#include <stdexcept>

#include "riskgate/indicators.h"

namespace riskgate::filter {

namespace {

std::string Fixed(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", x);
  return buf;
}

std::string Describe(const RuleMatch& m) {
  return m.category + ":" + m.rule + "@" + std::to_string(m.begin) + "-" +
         std::to_string(m.end);
}

}  // namespace

std::string_view ToString(Decision decision) {
  switch (decision) {
    case Decision::kAllow:
      return "allow";
    case Decision::kBlock:
      return "block";
    case Decision::kManualReview:
      return "manual-review";
  }
  return "allow";
}

std::string_view ToString(EvidenceSource source) {
  switch (source) {
    case EvidenceSource::kRule:
      return "rule";
    case EvidenceSource::kClassifier:
      return "classifier";
    case EvidenceSource::kTemporal:
      return "temporal";
    case EvidenceSource::kContext:
      return "context";
  }
  return "rule";
}

ScanResult RuleScan(std::string_view text, const BlocklistDb& db) {
  return db.Scan(text);
}

ClassifierVerdict ClassifyIntent(std::string_view text,
                                 const Classifier& classifier) {
  try {
    ClassifierVerdict v = classifier.Classify(text);
    v.confidence = std::clamp(v.confidence, 0.0, 1.0);
    v.stealth = std::clamp(v.stealth, 0.0, 1.0);
    return v;
  } catch (const ClassifierUnavailable&) {
    ClassifierVerdict v;
    v.degraded = true;
    return v;
  }
}

ContextDecision ContextCheck(std::span<const double> turn_scores,
                             double threshold, std::size_t rounds) {
  if (rounds == 0) return ContextDecision::kPass;
  std::size_t run = 0;
  for (double s : turn_scores) {
    run = s >= threshold ? run + 1 : 0;
    if (run >= rounds) return ContextDecision::kBlockAndReview;
  }
  return ContextDecision::kPass;
}

TemporalWindow::TemporalWindow(Millis window, std::size_t trigger_count)
    : window_(window), trigger_count_(trigger_count) {
  if (window_ <= Millis::zero()) {
    throw std::invalid_argument("temporal window must be positive");
  }
  if (trigger_count_ == 0) {
    throw std::invalid_argument("temporal trigger count must be positive");
  }
}

void TemporalWindow::Record(TimePoint t) {
  if (!events_.empty() && t < events_.back()) {
    throw std::invalid_argument("temporal events must be recorded in order");
  }
  events_.push_back(t);
}

void TemporalWindow::Evict(TimePoint now) {
  while (!events_.empty() && events_.front() < now - window_) {
    events_.pop_front();
  }
}

std::size_t TemporalWindow::Count(TimePoint now) {
  Evict(now);
  return static_cast<std::size_t>(
      std::count_if(events_.begin(), events_.end(),
                    [now](TimePoint t) { return t <= now; }));
}

TemporalStatus TemporalWindow::Check(TimePoint now) {
  return Count(now) >= trigger_count_ ? TemporalStatus::kHighRiskAlert
                                      : TemporalStatus::kNormal;
}

InputFilter::InputFilter(std::shared_ptr<const BlocklistStore> blocklist,
                         std::shared_ptr<const Classifier> classifier,
                         hmm::DialogueHmm dialogue_model, FilterConfig config)
    : blocklist_(std::move(blocklist)),
      classifier_(std::move(classifier)),
      model_(std::move(dialogue_model)),
      config_(config) {
  if (!blocklist_ || !classifier_) {
    throw std::invalid_argument("input filter needs a blocklist and classifier");
  }
  for (const char* symbol : {"normal", "sensitive", "escape"}) {
    model_.SymbolIndex(symbol, 0);  // throws if the model lacks it
  }
}

SessionState InputFilter::NewSession() const {
  return SessionState{{}, {},
                      TemporalWindow(config_.temporal_window,
                                     config_.temporal_trigger),
                      TimePoint{}};
}

FilterOutcome InputFilter::Evaluate(std::string_view text,
                                    SessionState& session, TimePoint now,
                                    risk::Tier current_tier) const {
  FilterOutcome out;
  out.scan = RuleScan(text, *blocklist_->Snapshot());
  out.intent = ClassifyIntent(text, *classifier_);
  session.last_seen = now;

  std::set<std::size_t> abuse_starts;
  bool sensitive_hit = false;
  for (const RuleMatch& m : out.scan.matches) {
    out.verdict.evidence.push_back({EvidenceSource::kRule, Describe(m)});
    if (m.label == ReviewLabel::kAbuse) {
      abuse_starts.insert(m.begin);
    } else {
      sensitive_hit = true;
    }
  }
  const bool abuse_hit = !abuse_starts.empty();
  const double density =
      indicators::SensitiveWordDensity(out.scan).density_per_thousand;
  out.rule_score = std::min(
      1.0, 0.6 * static_cast<double>(abuse_starts.size()) + density / 100.0);
  out.turn_score = std::max(out.intent.confidence, out.rule_score);
  out.verdict.risk_contribution = out.turn_score;
  out.verdict.degraded = out.intent.degraded;

  if (out.intent.degraded) {
    out.verdict.evidence.push_back(
        {EvidenceSource::kClassifier, "classifier unavailable"});
  } else if (out.intent.confidence > 0.0) {
    out.verdict.evidence.push_back(
        {EvidenceSource::kClassifier,
         "confidence=" + Fixed(out.intent.confidence) +
             (out.intent.malicious ? " malicious" : " benign")});
  }

  out.escape_detected = abuse_hit || out.intent.malicious;
  if (out.escape_detected) session.escapes.Record(now);
  out.escapes_in_window = session.escapes.Count(now);
  out.temporal_alert =
      out.escapes_in_window >= session.escapes.trigger_count();
  if (out.temporal_alert) {
    out.verdict.evidence.push_back(
        {EvidenceSource::kTemporal,
         std::to_string(out.escapes_in_window) +
             " escape detections within window"});
  }

  session.turn_scores.push_back(out.turn_score);
  const bool context_block =
      ContextCheck(session.turn_scores, config_.context_threshold,
                   config_.context_rounds) == ContextDecision::kBlockAndReview;
  if (context_block) {
    out.verdict.evidence.push_back(
        {EvidenceSource::kContext,
         std::to_string(config_.context_rounds) +
             " consecutive turns at or above " +
             Fixed(config_.context_threshold)});
  }

  session.observations.push_back(out.escape_detected ? "escape"
                                 : sensitive_hit     ? "sensitive"
                                                     : "normal");
  while (session.observations.size() > std::max<std::size_t>(1, config_.hmm_history)) {
    session.observations.pop_front();
  }
  out.context_path = hmm::ViterbiPath(
      model_, std::vector<std::string>(session.observations.begin(),
                                       session.observations.end()));
  const std::size_t attack_count = static_cast<std::size_t>(std::count(
      out.context_path.labels.begin(), out.context_path.labels.end(), "attack"));
  out.context_deviation = static_cast<double>(attack_count) /
                          static_cast<double>(out.context_path.labels.size());
  const bool hmm_attack = out.context_path.labels.back() == "attack";
  if (hmm_attack) {
    out.verdict.evidence.push_back(
        {EvidenceSource::kContext,
         "dialogue decoded as attack state, deviation=" +
             Fixed(out.context_deviation)});
  }

  bool fail_closed = false;
  if (out.intent.degraded) {
    fail_closed = config_.fail_mode == FailMode::kClosed ||
                  (config_.fail_mode == FailMode::kByTier &&
                   current_tier == risk::Tier::kCritical);
  }

  Decision decision = Decision::kAllow;
  if (out.intent.malicious || abuse_hit || hmm_attack) {
    decision = Decision::kManualReview;
  }
  if (out.intent.confidence >= config_.block_confidence ||
      (abuse_hit && (out.intent.malicious || out.intent.degraded)) ||
      out.temporal_alert || context_block || fail_closed) {
    decision = Decision::kBlock;
  }
  out.verdict.decision = decision;
  out.verdict.manual_review = context_block || decision == Decision::kManualReview;
  return out;
}

}  // namespace riskgate::filter
