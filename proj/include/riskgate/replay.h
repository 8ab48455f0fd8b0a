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

#ifndef RISKGATE_REPLAY_H_
#define RISKGATE_REPLAY_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "riskgate/config.h"
#include "riskgate/gateway.h"

namespace riskgate {

// One corpus line: {"text": ..., "label": "attack"|"benign", "session"?,
// "client"?, "tamper"?}. `tamper` deletes one zero-width character from the
// delivered response before its watermark is checked.
struct CorpusEntry {
  std::size_t line = 0;
  std::string text;
  bool attack = false;
  std::string session;
  std::string client;
  bool tamper = false;
};

struct CorpusError {
  std::size_t line = 0;
  std::string message;
};

struct Corpus {
  std::vector<CorpusEntry> entries;
  std::vector<CorpusError> errors;
};

Corpus ParseCorpus(std::string_view jsonl);

struct ReplayOptions {
  bool timings = false;  // latency percentiles vary run to run
};

struct ReplayResult {
  std::size_t requests = 0;
  std::size_t attacks = 0;
  std::size_t benign = 0;
  std::size_t intercepted_attacks = 0;
  std::size_t false_positives = 0;
  std::size_t template_attacks = 0;
  std::size_t template_intercepted = 0;
  std::array<std::size_t, 4> tiers{};  // indexed by risk::Tier
  std::map<std::string, std::size_t> outcomes;
  std::size_t wm_checked = 0;
  std::size_t wm_identified = 0;
  double final_review_tau = 0.0;
  bool level3_active = false;
  std::vector<std::string> feedback_events;
  std::vector<CorpusError> errors;
  std::vector<double> latencies_ms;

  double interception_rate() const;
  double false_positive_rate() const;
  double template_interception_rate() const;
  double watermark_id_rate() const;
};

// Drives a fresh gateway on a manual clock that starts at
// cfg.replay_start_ts and moves cfg.replay_step per corpus line. The same
// corpus, config and seed give the same report byte for byte unless
// latency timings are requested.
class Replayer {
 public:
  Replayer(const GatewayConfig& cfg, GatewayResources resources,
           std::uint64_t seed);

  ReplayResult Run(const Corpus& corpus);
  Gateway& gateway() { return *gateway_; }

 private:
  GatewayConfig cfg_;
  std::shared_ptr<ManualClock> clock_;
  std::unique_ptr<Gateway> gateway_;
  std::mt19937_64 rng_;
};

std::string ReplayReportJson(const ReplayResult& result,
                             const ReplayOptions& options = {});

}  // namespace riskgate

#endif  // RISKGATE_REPLAY_H_
