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

#include "riskgate/gateway.h"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <set>

#include "json.hpp"
#include "riskgate/dp_mechanisms.h"
#include "riskgate/indicators.h"
#include "riskgate/text.h"

namespace riskgate {

namespace {

using nlohmann::ordered_json;
using SteadyClock = std::chrono::steady_clock;

constexpr Millis kAbnormalWindow = std::chrono::minutes(10);
constexpr Millis kSensitiveWindow = std::chrono::seconds(60);
constexpr std::size_t kLatencySamples = 1000;

double ElapsedMs(SteadyClock::time_point since) {
  return std::chrono::duration<double, std::milli>(SteadyClock::now() - since)
      .count();
}

// Percentile by nearest rank on a copy.
double Percentile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const auto rank = static_cast<std::size_t>(
      std::ceil(q * static_cast<double>(v.size())));
  return v[std::clamp<std::size_t>(rank, 1, v.size()) - 1];
}

std::string Summarize(const std::vector<filter::Evidence>& evidence) {
  std::string out;
  for (const filter::Evidence& e : evidence) {
    if (!out.empty()) out += "; ";
    out += std::string(filter::ToString(e.source)) + ": " + e.detail;
  }
  return out;
}

template <typename Deque>
void EvictBefore(Deque& d, TimePoint cutoff) {
  while (!d.empty()) {
    TimePoint t;
    if constexpr (std::is_same_v<typename Deque::value_type, TimePoint>) {
      t = d.front();
    } else {
      t = d.front().first;
    }
    if (t >= cutoff) break;
    d.pop_front();
  }
}

}  // namespace

std::string CommandBackend::Generate(std::string_view prompt) {
  char path[] = "/tmp/riskgate-prompt-XXXXXX";
  const int fd = mkstemp(path);
  if (fd < 0) throw BackendError("cannot create prompt file");
  const ssize_t written = write(fd, prompt.data(), prompt.size());
  close(fd);
  if (written != static_cast<ssize_t>(prompt.size())) {
    unlink(path);
    throw BackendError("cannot write prompt file");
  }
  const std::string cmd = command_ + " < '" + path + "'";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) {
    unlink(path);
    throw BackendError("cannot start backend command");
  }
  std::string out;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  const int status = pclose(pipe);
  unlink(path);
  if (status == -1 || !WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    throw BackendError("backend command failed");
  }
  return out;
}

std::unique_ptr<Backend> MakeBackend(const GatewayConfig& cfg) {
  if (cfg.backend == BackendKind::kExternalCommand) {
    return std::make_unique<CommandBackend>(cfg.backend_command);
  }
  return std::make_unique<EchoBackend>();
}

std::string RequestTrace::ToJson() const {
  ordered_json j;
  j["request_id"] = request_id;
  j["ts"] = ts;
  j["session_id"] = session_id;
  j["client_id"] = client_id;
  j["stages"] = ordered_json::array();
  for (const StageTiming& s : stages) {
    j["stages"].push_back({{"stage", s.stage}, {"ms", s.ms}});
  }
  ordered_json f;
  f["decision"] = std::string(filter::ToString(filter_decision));
  f["evidence"] = ordered_json::array();
  for (const filter::Evidence& e : evidence) {
    f["evidence"].push_back(
        {{"source", std::string(filter::ToString(e.source))}, {"detail", e.detail}});
  }
  f["manual_review"] = manual_review;
  f["degraded"] = degraded;
  j["filter"] = f;
  if (assessment) {
    ordered_json r;
    r["threat"] = assessment->threat;
    r["impact"] = assessment->impact;
    r["raw_score"] = assessment->raw_score;
    r["score"] = assessment->score;
    r["fused_score"] = fused_score;
    r["abnormal_rate"] = abnormal_rate;
    r["scene_threshold"] = scene_threshold;
    r["scene_threshold_exceeded"] = scene_threshold_exceeded;
    r["action"] = std::string(risk::ToString(assessment->action));
    j["risk"] = r;
  }
  if (review) {
    ordered_json r;
    r["decision"] = std::string(compliance::ToString(review->decision));
    r["labels"] = ordered_json::array();
    for (ReviewLabel l : review->labels) r["labels"].push_back(std::string(ToString(l)));
    r["blended_score"] = review->blended_score;
    r["alpha"] = review->alpha_used;
    r["classifier_skipped"] = review->classifier_skipped;
    r["degraded"] = review->degraded;
    j["review"] = r;
  }
  j["masked"] = masked;
  j["tier"] = std::string(risk::ToString(tier));
  if (!fingerprint.empty()) j["fingerprint"] = fingerprint;
  j["status"] = status;
  j["outcome"] = outcome;
  j["events"] = events;
  return j.dump();
}

GatewayResources LoadResources(const GatewayConfig& cfg) {
  if (cfg.paths.blocklist.empty()) {
    throw std::invalid_argument("paths.blocklist is required");
  }
  if (cfg.paths.keys.empty()) throw std::invalid_argument("paths.keys is required");
  GatewayResources r;
  r.blocklist = std::make_shared<BlocklistStore>(
      BlocklistDb::LoadFile(cfg.paths.blocklist.string()));
  r.keys = wm::KeyStore::LoadFile(cfg.paths.keys);
  if (r.keys.size() == 0) throw std::invalid_argument("key store has no keys");
  if (!cfg.paths.embeddings.empty()) {
    // Loaded only to prove the file is readable and well formed.
    indicators::EmbeddingTable::LoadFile(cfg.paths.embeddings.string());
  }
  r.backend = MakeBackend(cfg);
  r.classifier = std::make_shared<StubClassifier>(r.blocklist, cfg.classifier_threshold);
  return r;
}

Gateway::Gateway(GatewayConfig cfg, GatewayResources resources,
                 std::shared_ptr<const Clock> clock)
    : cfg_(std::move(cfg)),
      blocklist_(std::move(resources.blocklist)),
      classifier_(resources.classifier
                      ? std::move(resources.classifier)
                      : std::make_shared<StubClassifier>(blocklist_,
                                                         cfg_.classifier_threshold)),
      backend_(resources.backend ? std::move(resources.backend)
                                 : std::make_unique<EchoBackend>()),
      keys_(std::move(resources.keys)),
      clock_(std::move(clock)),
      filter_(blocklist_, classifier_, hmm::DialogueHmm::DefaultDialogueModel(),
              cfg_.filter),
      review_(cfg_.review) {
  cfg_.Validate();
  if (!clock_) throw std::invalid_argument("gateway needs a clock");
  keys_.Active();  // throws if there is no signing key
  trace_index_ = cfg_.paths.trace_index.empty()
                     ? std::make_unique<wm::TraceIndex>()
                     : std::make_unique<wm::TraceIndex>(cfg_.paths.trace_index);
  if (!cfg_.paths.backflow.empty()) {
    backflow_ = std::make_unique<filter::BackflowStore>(
        cfg_.paths.backflow, cfg_.backflow_max_bytes, cfg_.backflow_segment);
  }
  for (const telemetry::MetricSpec& spec : telemetry::GatewayMetricSpecs()) {
    registry_.Register(spec);
  }
  if (cfg_.weights_mode == WeightsMode::kRolling) {
    rolling_.emplace(fusion::FixedWeights(), cfg_.rolling_capacity);
  }
  feedback_.review_tau = cfg_.review.tau;
  auto open = [](const std::filesystem::path& p, std::ofstream& out) {
    if (p.empty()) return;
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    out.open(p, std::ios::app);
    if (!out) throw std::runtime_error("cannot open " + p.string());
  };
  open(cfg_.paths.audit, audit_);
  open(cfg_.paths.events, events_);
}

Gateway::~Gateway() = default;

std::string Gateway::NextRequestId() {
  std::lock_guard<std::mutex> lock(state_mu_);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "req-%08llu",
                static_cast<unsigned long long>(next_id_++));
  return buf;
}

std::size_t Gateway::active_sessions() const {
  std::lock_guard<std::mutex> lock(sessions_mu_);
  return sessions_.size();
}

std::shared_ptr<Gateway::SessionEntry> Gateway::AcquireSession(
    const std::string& id, TimePoint now) {
  std::lock_guard<std::mutex> lock(sessions_mu_);
  for (auto it = sessions_.begin(); it != sessions_.end();) {
    std::unique_lock<std::mutex> entry(it->second->mu, std::try_to_lock);
    if (entry.owns_lock() && it->second->state.last_seen + cfg_.session_idle < now) {
      entry.unlock();
      it = sessions_.erase(it);
    } else {
      ++it;
    }
  }
  auto& slot = sessions_[id];
  if (!slot) {
    slot = std::make_shared<SessionEntry>();
    slot->state = filter_.NewSession();
    slot->state.last_seen = now;
  }
  return slot;
}

std::pair<bool, double> Gateway::ObserveTraffic(
    const std::string& client, const filter::FilterOutcome& outcome,
    TimePoint now) {
  bool abuse_hit = false;
  bool sensitive_hit = false;
  for (const RuleMatch& m : outcome.scan.matches) {
    (m.label == ReviewLabel::kAbuse ? abuse_hit : sensitive_hit) = true;
  }
  std::lock_guard<std::mutex> lock(state_mu_);
  ClientWindow& cw = clients_[client];
  EvictBefore(cw.requests, now - kAbnormalWindow);
  EvictBefore(cw.sensitive, now - kSensitiveWindow);
  EvictBefore(global_requests_, now - kAbnormalWindow);
  if (sensitive_hit) cw.sensitive.push_back(now);
  const bool abnormal = abuse_hit || outcome.intent.malicious ||
                        cw.sensitive.size() > kSensitiveBurst;
  cw.requests.emplace_back(now, abnormal);
  global_requests_.emplace_back(now, abnormal);
  ++total_;
  if (abuse_hit || outcome.intent.malicious) ++abusive_;
  const auto n_abnormal = std::count_if(cw.requests.begin(), cw.requests.end(),
                                        [](const auto& r) { return r.second; });
  return {abnormal, static_cast<double>(n_abnormal) /
                        static_cast<double>(cw.requests.size())};
}

void Gateway::AppendEvent(const std::string& line) {
  std::lock_guard<std::mutex> lock(log_mu_);
  if (events_.is_open()) {
    events_ << line << '\n';
    events_.flush();
  }
}

void Gateway::AppendAudit(const RequestTrace& trace) {
  const std::string line = trace.ToJson();
  std::lock_guard<std::mutex> lock(log_mu_);
  if (audit_.is_open()) {
    audit_ << line << '\n';
    audit_.flush();
  }
}

void Gateway::ApplyFeedback(TimePoint now, RequestTrace& trace) {
  std::vector<risk::ParameterUpdate> updates;
  double new_tau = 0.0;
  {
    std::lock_guard<std::mutex> lock(state_mu_);
    risk::FeedbackObservation obs;
    obs.scene = cfg_.scene;
    if (wm_checked_ >= cfg_.min_watermark_samples && wm_checked_ > 0) {
      obs.watermark_id_rate =
          static_cast<double>(wm_identified_) / static_cast<double>(wm_checked_);
    }
    EvictBefore(global_requests_, now - kAbnormalWindow);
    if (!global_requests_.empty()) {
      const auto n = std::count_if(global_requests_.begin(), global_requests_.end(),
                                   [](const auto& r) { return r.second; });
      obs.abnormal_rate =
          static_cast<double>(n) / static_cast<double>(global_requests_.size());
    }
    risk::FeedbackResult res = risk::FeedbackStep(feedback_, obs);
    if (res.updates.empty()) return;
    feedback_ = res.state;
    new_tau = feedback_.review_tau;
    updates = std::move(res.updates);
  }
  for (const risk::ParameterUpdate& u : updates) {
    if (u.parameter == "review.tau") {
      compliance::ReviewConfig next = *review_.Snapshot();
      next.tau = new_tau;
      review_.Update(next);
    }
    ordered_json j;
    j["ts"] = ToSeconds(now);
    j["parameter"] = u.parameter;
    j["old_value"] = u.old_value;
    j["new_value"] = u.new_value;
    j["reason"] = u.reason;
    AppendEvent(j.dump());
    trace.events.push_back(u.parameter + "=" + ordered_json(u.new_value).dump());
  }
}

WatermarkCheck Gateway::VerifyWatermark(std::string_view delivered) {
  WatermarkCheck check;
  const wm::Extracted ex = wm::Extract(delivered);
  check.valid = ex.valid;
  check.match_ratio = ex.match_ratio;
  // The fingerprint may come from any key still in the store.
  for (const wm::WatermarkKey& key : keys_.keys()) {
    if (!trace_index_->Trace(wm::Fingerprint(ex.clean, key)).empty()) {
      check.traced = true;
      break;
    }
  }
  {
    std::lock_guard<std::mutex> lock(state_mu_);
    ++wm_checked_;
    if (check.identified()) ++wm_identified_;
  }
  RequestTrace scratch;
  ApplyFeedback(clock_->Now(), scratch);
  return check;
}

double Gateway::WatermarkIdRate() const {
  std::lock_guard<std::mutex> lock(state_mu_);
  return wm_checked_ == 0 ? 1.0
                          : static_cast<double>(wm_identified_) /
                                static_cast<double>(wm_checked_);
}

risk::FeedbackState Gateway::feedback_state() const {
  std::lock_guard<std::mutex> lock(state_mu_);
  return feedback_;
}

std::shared_ptr<const compliance::ReviewConfig> Gateway::review_config() const {
  return review_.Snapshot();
}

void Gateway::RecordMetrics(const RequestTrace& trace,
                            const filter::FilterOutcome& f, double latency_ms,
                            TimePoint now) {
  const double ts = ToSeconds(now);
  const auto density = indicators::SensitiveWordDensity(f.scan);
  double abusive = 0.0, wm_rate = 1.0, block_rate = 0.0, p99 = 0.0;
  {
    std::lock_guard<std::mutex> lock(state_mu_);
    latencies_ms_.push_back(latency_ms);
    while (latencies_ms_.size() > kLatencySamples) latencies_ms_.pop_front();
    p99 = Percentile({latencies_ms_.begin(), latencies_ms_.end()}, 0.99);
    if (total_ > 0) abusive = static_cast<double>(abusive_) / static_cast<double>(total_);
    if (wm_checked_ > 0) {
      wm_rate = static_cast<double>(wm_identified_) / static_cast<double>(wm_checked_);
    }
    if (reviewed_ > 0) {
      block_rate = static_cast<double>(review_blocked_) / static_cast<double>(reviewed_);
    }
  }
  registry_.Record("riskgate_sensitive_word_density", density.density_per_thousand, ts);
  registry_.Record("riskgate_intent_confidence", f.intent.confidence, ts);
  registry_.Record("riskgate_abusive_request_percentage", abusive, ts);
  registry_.Record("riskgate_abnormal_call_rate", trace.abnormal_rate, ts);
  registry_.Record("riskgate_context_deviation", f.context_deviation, ts);
  registry_.Record("riskgate_dp_noise_sigma",
                   dp::GaussianSigma(cfg_.dp.epsilon, cfg_.dp.delta, cfg_.calibration,
                                     cfg_.dp.sensitivity),
                   ts);
  registry_.Record("riskgate_watermark_id_rate", wm_rate, ts);
  registry_.Record("riskgate_compliance_block_rate", block_rate, ts);
  if (trace.assessment) {
    registry_.Record("riskgate_risk_score", trace.assessment->score, ts);
    registry_.Record("riskgate_fused_score", trace.fused_score, ts);
  }
  registry_.Record("riskgate_request_latency_p99_ms", p99, ts);
}

GatewayResponse Gateway::Handle(const GatewayRequest& request) {
  const auto started = SteadyClock::now();
  const TimePoint now = clock_->Now();
  GatewayResponse resp;
  RequestTrace& trace = resp.trace;
  trace.request_id = NextRequestId();
  trace.ts = ToSeconds(now);
  trace.session_id = request.session_id.empty() ? trace.request_id : request.session_id;
  trace.client_id = request.client_id.empty() ? "anonymous" : request.client_id;
  resp.trace_id = trace.request_id;

  auto finish = [&](int status, std::string outcome, std::string text) {
    trace.status = status;
    trace.outcome = std::move(outcome);
    resp.status = status;
    resp.text = std::move(text);
  };

  if (!text::IsValidUtf8(request.text)) {
    finish(400, "invalid-input", "request text is not valid UTF-8");
    AppendAudit(trace);
    return resp;
  }

  auto session = AcquireSession(trace.session_id, now);
  std::lock_guard<std::mutex> session_lock(session->mu);
  risk::Tier client_tier;
  bool level3;
  {
    std::lock_guard<std::mutex> lock(state_mu_);
    client_tier = clients_[trace.client_id].tier;
    level3 = feedback_.level3_active;
  }

  // Input filter.
  auto stage_start = SteadyClock::now();
  const filter::FilterOutcome f =
      filter_.Evaluate(request.text, session->state, now, client_tier);
  const auto [abnormal, theta] = ObserveTraffic(trace.client_id, f, now);
  trace.filter_decision = f.verdict.decision;
  trace.evidence = f.verdict.evidence;
  trace.manual_review = f.verdict.manual_review;
  trace.degraded = f.verdict.degraded;
  trace.abnormal = abnormal;
  trace.abnormal_rate = theta;
  trace.tier = client_tier;
  trace.stages.push_back({"input_filter", ElapsedMs(stage_start)});

  auto done = [&]() {
    ApplyFeedback(now, trace);
    RecordMetrics(trace, f, ElapsedMs(started), now);
    AppendAudit(trace);
    return resp;
  };

  if (f.verdict.decision != filter::Decision::kAllow) {
    const bool block = f.verdict.decision == filter::Decision::kBlock;
    if (block && backflow_) {
      const auto stored = backflow_->Append(request.text, f.verdict, client_tier, now);
      for (const std::string& w : stored.warnings) {
        ordered_json j;
        j["ts"] = trace.ts;
        j["warning"] = w;
        AppendEvent(j.dump());
        trace.events.push_back("backflow-rotated");
      }
    }
    finish(403, block ? "blocked-input" : "held-for-review",
           (block ? "request blocked: " : "request held for manual review: ") +
               Summarize(f.verdict.evidence));
    return done();
  }

  // Risk scoring.
  stage_start = SteadyClock::now();
  const auto density = indicators::SensitiveWordDensity(f.scan);
  std::set<std::size_t> bias_starts;
  for (const RuleMatch& m : f.scan.matches) {
    if (m.label == ReviewLabel::kBias) bias_starts.insert(m.begin);
  }
  risk::ThreatInputs in;
  in.freq = risk::NormalizedFrequency(static_cast<double>(f.escapes_in_window));
  in.stealth = std::clamp(f.intent.stealth, 0.0, 1.0);
  in.data_leak = std::min(1.0, density.density_per_thousand / kDensityScale);
  in.model_bias = std::min(1.0, 0.5 * static_cast<double>(bias_starts.size()));
  in.availability_impact = std::min(1.0, theta / kRateScale);
  risk::RiskAssessment a =
      risk::RiskScore(risk::ThreatLevel(in), risk::ImpactScope(in));

  Eigen::Vector2d indicators(in.data_leak, in.availability_impact);
  const Eigen::VectorXd weights =
      rolling_ ? rolling_->Current() : Eigen::VectorXd(fusion::FixedWeights());
  if (rolling_) rolling_->Add(indicators);
  trace.fused_score = fusion::FusedScore(indicators, weights);
  const double combined = std::max(a.score, trace.fused_score);
  const risk::Classification cls = risk::Classify(combined, theta, cfg_.tier_bands);
  a.tier = cls.tier;
  a.action = cls.action;
  trace.scene_threshold =
      risk::SceneThresholdValue(cfg_.scene_threshold, cfg_.scene, a.score);
  trace.scene_threshold_exceeded = theta > trace.scene_threshold;
  if (level3 && abnormal) {
    a.tier = risk::Tier::kCritical;
    a.action = risk::Action::kRealTimeBlocking;
    trace.events.push_back("level3-block");
  }
  trace.assessment = a;
  trace.tier = a.tier;
  {
    std::lock_guard<std::mutex> lock(state_mu_);
    clients_[trace.client_id].tier = a.tier;
  }
  trace.stages.push_back({"risk", ElapsedMs(stage_start)});

  if (a.tier == risk::Tier::kCritical) {
    finish(403, "blocked-risk", "request blocked: risk tier Critical");
    return done();
  }
  if (a.tier == risk::Tier::kHigh) {
    ordered_json j;
    j["ts"] = trace.ts;
    j["event"] = "model-rollback";
    j["request_id"] = trace.request_id;
    j["client_id"] = trace.client_id;
    AppendEvent(j.dump());
    trace.events.push_back("model-rollback");
  }

  // Generation.
  stage_start = SteadyClock::now();
  std::string output;
  try {
    output = backend_->Generate(request.text);
  } catch (const BackendError& e) {
    trace.stages.push_back({"generate", ElapsedMs(stage_start)});
    finish(502, "backend-error", std::string("backend failure: ") + e.what());
    return done();
  }
  trace.stages.push_back({"generate", ElapsedMs(stage_start)});
  if (!text::IsValidUtf8(output)) {
    finish(502, "backend-error", "backend returned malformed UTF-8");
    return done();
  }

  // Output review.
  stage_start = SteadyClock::now();
  const auto review_cfg = review_.Snapshot();
  const auto db = blocklist_->Snapshot();
  compliance::ReviewVerdict rv = compliance::Review(
      output, combined, *db, classifier_.get(), *review_cfg, cfg_.dp.epsilon);
  {
    std::lock_guard<std::mutex> lock(state_mu_);
    ++reviewed_;
    if (rv.decision == compliance::ReviewDecision::kBlock) ++review_blocked_;
  }
  if (rv.decision == compliance::ReviewDecision::kRedact) output = rv.redacted;
  if (a.tier == risk::Tier::kMedium && rv.decision != compliance::ReviewDecision::kBlock) {
    output = compliance::Redact(db->Scan(output), ReviewLabel::kPrivacy);
    trace.masked = true;
  }
  const bool output_blocked = rv.decision == compliance::ReviewDecision::kBlock;
  trace.review = std::move(rv);
  trace.stages.push_back({"review", ElapsedMs(stage_start)});
  if (output_blocked) {
    finish(403, "blocked-output", "response withheld by output review");
    return done();
  }

  // Watermark.
  stage_start = SteadyClock::now();
  const wm::WatermarkKey& key = keys_.Active();
  wm::Embedded emb = wm::Embed(output, key);
  wm::WatermarkRecord record;
  record.fingerprint = emb.fingerprint;
  record.key_id = key.key_id;
  record.request = {trace.client_id, trace.ts, request.route};
  record.text_length = text::DecodeUtf8(wm::Extract(emb.text).clean).size();
  trace_index_->Insert(record);
  trace.fingerprint = DigestHex(emb.fingerprint);
  trace.stages.push_back({"watermark", ElapsedMs(stage_start)});
  finish(200, "delivered", std::move(emb.text));
  return done();
}

}  // namespace riskgate
