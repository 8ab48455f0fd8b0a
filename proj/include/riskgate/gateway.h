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

// Request pipeline: input filter -> risk scoring -> generation ->
// output review -> watermark. A stage that rejects the request stops the
// pipeline; every request, rejected or not, appends one audit record.

#ifndef RISKGATE_GATEWAY_H_
#define RISKGATE_GATEWAY_H_

#include <cstddef>
#include <cstdint>
#include <deque>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "riskgate/backflow.h"
#include "riskgate/blocklist.h"
#include "riskgate/classifier.h"
#include "riskgate/clock.h"
#include "riskgate/compliance.h"
#include "riskgate/config.h"
#include "riskgate/entropy_fusion.h"
#include "riskgate/input_filter.h"
#include "riskgate/risk_matrix.h"
#include "riskgate/telemetry.h"
#include "riskgate/watermark.h"

namespace riskgate {

class BackendError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Text generator behind the gateway. Must be safe to call concurrently.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string Generate(std::string_view prompt) = 0;
};

// Returns the prompt unchanged.
class EchoBackend : public Backend {
 public:
  std::string Generate(std::string_view prompt) override {
    return std::string(prompt);
  }
};

// Runs a shell command with the prompt on stdin and returns its stdout.
// A non-zero exit status raises BackendError.
class CommandBackend : public Backend {
 public:
  explicit CommandBackend(std::string command) : command_(std::move(command)) {}
  std::string Generate(std::string_view prompt) override;

 private:
  std::string command_;
};

std::unique_ptr<Backend> MakeBackend(const GatewayConfig& cfg);

struct GatewayRequest {
  std::string text;
  std::string session_id;
  std::string client_id;
  std::string route = "/v1/generate";
};

struct StageTiming {
  std::string stage;
  double ms = 0.0;
};

// Everything the gateway decided about one request.
struct RequestTrace {
  std::string request_id;
  double ts = 0.0;
  std::string session_id;
  std::string client_id;
  std::vector<StageTiming> stages;  // in execution order

  filter::Decision filter_decision = filter::Decision::kAllow;
  std::vector<filter::Evidence> evidence;
  bool manual_review = false;
  bool degraded = false;

  std::optional<risk::RiskAssessment> assessment;
  double fused_score = 0.0;
  double abnormal_rate = 0.0;
  double scene_threshold = 0.0;
  bool scene_threshold_exceeded = false;
  bool abnormal = false;

  std::optional<compliance::ReviewVerdict> review;
  bool masked = false;
  risk::Tier tier = risk::Tier::kLow;
  std::string fingerprint;  // hex, set when the response was watermarked
  int status = 200;
  std::string outcome;      // delivered | blocked-input | blocked-risk | ...
  std::vector<std::string> events;

  std::string ToJson() const;
};

struct GatewayResponse {
  int status = 200;
  std::string text;  // watermarked output or a refusal notice
  std::string trace_id;
  RequestTrace trace;
};

struct WatermarkCheck {
  bool valid = false;
  bool traced = false;
  double match_ratio = 0.0;
  bool identified() const { return valid && traced; }
};

// Everything the gateway reads at startup, already loaded.
struct GatewayResources {
  std::shared_ptr<BlocklistStore> blocklist;
  wm::KeyStore keys;
  std::unique_ptr<Backend> backend;
  std::shared_ptr<const Classifier> classifier;  // defaults to the stub
};

// Loads blocklist and keys from the configured paths.
GatewayResources LoadResources(const GatewayConfig& cfg);

class Gateway {
 public:
  static constexpr double kFrequencyScale = 10.0;    // escapes per window
  static constexpr double kDensityScale = 10.0;      // hits per thousand
  static constexpr double kRateScale = 0.2;          // abnormal fraction
  static constexpr std::size_t kSensitiveBurst = 5;  // per minute

  Gateway(GatewayConfig cfg, GatewayResources resources,
          std::shared_ptr<const Clock> clock);
  ~Gateway();

  GatewayResponse Handle(const GatewayRequest& request);

  // Checks delivered text: zero-width schedule intact and fingerprint of
  // the visible text known to the trace index. Feeds the watermark
  // identification rate used by the feedback loop.
  WatermarkCheck VerifyWatermark(std::string_view delivered);

  double WatermarkIdRate() const;
  risk::FeedbackState feedback_state() const;
  std::shared_ptr<const compliance::ReviewConfig> review_config() const;
  const telemetry::Registry& metrics() const { return registry_; }
  const wm::TraceIndex& trace_index() const { return *trace_index_; }
  const GatewayConfig& config() const { return cfg_; }
  std::shared_ptr<const BlocklistDb> blocklist_snapshot() const {
    return blocklist_->Snapshot();
  }
  std::size_t active_sessions() const;

 private:
  struct SessionEntry {
    std::mutex mu;
    filter::SessionState state;
  };
  struct ClientWindow {
    std::deque<std::pair<TimePoint, bool>> requests;  // (time, abnormal)
    std::deque<TimePoint> sensitive;
    risk::Tier tier = risk::Tier::kLow;
  };

  std::shared_ptr<SessionEntry> AcquireSession(const std::string& id,
                                               TimePoint now);
  // Updates the client and global windows; returns (abnormal, client rate).
  std::pair<bool, double> ObserveTraffic(const std::string& client,
                                         const filter::FilterOutcome& outcome,
                                         TimePoint now);
  void ApplyFeedback(TimePoint now, RequestTrace& trace);
  void AppendEvent(const std::string& line);
  void AppendAudit(const RequestTrace& trace);
  void RecordMetrics(const RequestTrace& trace, const filter::FilterOutcome& f,
                     double latency_ms, TimePoint now);
  std::string NextRequestId();

  GatewayConfig cfg_;
  std::shared_ptr<BlocklistStore> blocklist_;
  std::shared_ptr<const Classifier> classifier_;
  std::unique_ptr<Backend> backend_;
  wm::KeyStore keys_;
  std::shared_ptr<const Clock> clock_;
  filter::InputFilter filter_;
  compliance::ReviewConfigStore review_;
  std::unique_ptr<wm::TraceIndex> trace_index_;
  std::unique_ptr<filter::BackflowStore> backflow_;
  telemetry::Registry registry_;
  std::optional<fusion::RollingWeights> rolling_;

  mutable std::mutex sessions_mu_;
  std::map<std::string, std::shared_ptr<SessionEntry>> sessions_;

  mutable std::mutex state_mu_;
  std::map<std::string, ClientWindow> clients_;
  std::deque<std::pair<TimePoint, bool>> global_requests_;
  risk::FeedbackState feedback_;
  std::size_t wm_checked_ = 0;
  std::size_t wm_identified_ = 0;
  std::size_t reviewed_ = 0;
  std::size_t review_blocked_ = 0;
  std::size_t abusive_ = 0;
  std::size_t total_ = 0;
  std::deque<double> latencies_ms_;
  std::uint64_t next_id_ = 1;

  std::mutex log_mu_;
  std::ofstream audit_;
  std::ofstream events_;
};

}  // namespace riskgate

#endif  // RISKGATE_GATEWAY_H_
