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

// Input-layer defense: rule scan, intent classification, the escape-command
// sliding window, multi-turn context checks, and their combination into a
// single allow / block / manual-review verdict.

#ifndef RISKGATE_INPUT_FILTER_H_
#define RISKGATE_INPUT_FILTER_H_

#include <chrono>
#include <cstddef>
#include <deque>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "riskgate/blocklist.h"
#include "riskgate/classifier.h"
#include "riskgate/clock.h"
#include "riskgate/hmm.h"
#include "riskgate/risk_matrix.h"

namespace riskgate::filter {

enum class Decision { kAllow, kBlock, kManualReview };
enum class EvidenceSource { kRule, kClassifier, kTemporal, kContext };

std::string_view ToString(Decision decision);
std::string_view ToString(EvidenceSource source);

struct Evidence {
  EvidenceSource source = EvidenceSource::kRule;
  std::string detail;
};

struct FilterVerdict {
  Decision decision = Decision::kAllow;
  std::vector<Evidence> evidence;
  double risk_contribution = 0.0;
  bool manual_review = false;  // a human should look at this session
  bool degraded = false;       // classifier was unavailable
};

ScanResult RuleScan(std::string_view text, const BlocklistDb& db);

enum class FailMode { kOpen, kClosed, kByTier };

// Never throws for classifier outages: an unavailable classifier yields a
// benign, zero-confidence verdict with `degraded` set.
ClassifierVerdict ClassifyIntent(std::string_view text,
                                 const Classifier& classifier);

enum class ContextDecision { kPass, kBlockAndReview };

// Blocks when at least `rounds` consecutive turns score >= `threshold`.
ContextDecision ContextCheck(std::span<const double> turn_scores,
                             double threshold = 0.6, std::size_t rounds = 3);

enum class TemporalStatus { kNormal, kHighRiskAlert };

// Escape-attack detections over a sliding time window. Insertion must be
// monotone; events older than `now - window` are evicted before counting.
class TemporalWindow {
 public:
  explicit TemporalWindow(Millis window = std::chrono::minutes(10),
                          std::size_t trigger_count = 3);

  // Throws std::invalid_argument if `t` precedes the last recorded event.
  void Record(TimePoint t);
  TemporalStatus Check(TimePoint now);
  std::size_t Count(TimePoint now);

  Millis window() const { return window_; }
  std::size_t trigger_count() const { return trigger_count_; }

 private:
  void Evict(TimePoint now);

  Millis window_;
  std::size_t trigger_count_;
  std::deque<TimePoint> events_;
};

// Per-session input-filter memory.
struct SessionState {
  std::vector<double> turn_scores;
  std::deque<std::string> observations;  // HMM symbols, newest last
  TemporalWindow escapes;
  TimePoint last_seen{};
};

struct FilterConfig {
  double block_confidence = 0.8;
  double context_threshold = 0.6;
  std::size_t context_rounds = 3;
  std::size_t hmm_history = 8;
  Millis temporal_window = std::chrono::minutes(10);
  std::size_t temporal_trigger = 3;
  FailMode fail_mode = FailMode::kByTier;
};

struct FilterOutcome {
  FilterVerdict verdict;
  ScanResult scan;
  ClassifierVerdict intent;
  double rule_score = 0.0;
  double turn_score = 0.0;
  bool escape_detected = false;
  bool temporal_alert = false;
  std::size_t escapes_in_window = 0;
  hmm::ViterbiResult context_path;
  double context_deviation = 0.0;  // share of turns decoded as attack
};

class InputFilter {
 public:
  InputFilter(std::shared_ptr<const BlocklistStore> blocklist,
              std::shared_ptr<const Classifier> classifier,
              hmm::DialogueHmm dialogue_model, FilterConfig config = {});

  SessionState NewSession() const;

  // `current_tier` is the caller's latest tier for this client; it decides
  // fail-open versus fail-closed under FailMode::kByTier.
  FilterOutcome Evaluate(std::string_view text, SessionState& session,
                         TimePoint now,
                         risk::Tier current_tier = risk::Tier::kLow) const;

  const FilterConfig& config() const { return config_; }
  const BlocklistStore& blocklist() const { return *blocklist_; }

 private:
  std::shared_ptr<const BlocklistStore> blocklist_;
  std::shared_ptr<const Classifier> classifier_;
  hmm::DialogueHmm model_;
  FilterConfig config_;
};

}  // namespace riskgate::filter

#endif  // RISKGATE_INPUT_FILTER_H_
