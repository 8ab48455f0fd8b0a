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

#include "riskgate/config.h"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "json.hpp"

namespace riskgate {

namespace {

using nlohmann::json;

// Reads typed members of one JSON object and rejects members nobody asked
// about, naming them with their dotted path.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw std::invalid_argument(Where("") + " must be an object");
  }

  template <typename T>
  void Get(const char* key, T& out) {
    seen_.push_back(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception&) {
      throw std::invalid_argument(Where(key) + " has the wrong type");
    }
  }

  std::optional<Section> Child(const char* key) {
    seen_.push_back(key);
    auto it = j_.find(key);
    if (it == j_.end()) return std::nullopt;
    return Section(*it, Where(key));
  }

  void Finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (std::find(seen_.begin(), seen_.end(), it.key()) == seen_.end()) {
        throw std::invalid_argument("unknown config key " + Where(it.key()));
      }
    }
  }

 private:
  std::string Where(const std::string& key) const {
    if (path_.empty()) return key.empty() ? "config" : key;
    return key.empty() ? path_ : path_ + "." + key;
  }

  const json& j_;
  std::string path_;
  std::vector<std::string> seen_;
};

std::filesystem::path Resolve(const std::filesystem::path& base,
                              const std::string& p) {
  if (p.empty()) return {};
  std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace

void GatewayConfig::Validate() const {
  tier_bands.Validate();
  review.Validate();
  dp.Validate();
  if (!(scene_threshold.theta_base > 0.0 && scene_threshold.theta_base < 1.0)) {
    throw std::invalid_argument("theta_base must lie in (0, 1)");
  }
  if (scene_threshold.medical_alpha < 0.0 || scene_threshold.financial_alpha < 0.0) {
    throw std::invalid_argument("scene_alpha values must be non-negative");
  }
  if (!(classifier_threshold > 0.0 && classifier_threshold < 1.0)) {
    throw std::invalid_argument("filter.classifier_threshold must lie in (0, 1)");
  }
  if (filter.context_rounds == 0 || filter.temporal_trigger == 0 ||
      filter.hmm_history == 0 || filter.temporal_window <= Millis::zero()) {
    throw std::invalid_argument("filter windows and counts must be positive");
  }
  if (backend == BackendKind::kExternalCommand && backend_command.empty()) {
    throw std::invalid_argument("backend.command is required for external-command");
  }
  for (int port : {server_port, telemetry_port}) {
    if (port < 0 || port > 65535) throw std::invalid_argument("port out of range");
  }
  if (session_idle <= Millis::zero() || replay_step <= Millis::zero() ||
      backflow_segment <= Millis::zero()) {
    throw std::invalid_argument("durations must be positive");
  }
  if (rolling_capacity < 2) {
    throw std::invalid_argument("weights.capacity must be at least 2");
  }
}

GatewayConfig ParseConfig(std::string_view text,
                          const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
  }
  GatewayConfig cfg;
  Section top(root, "");

  std::string scene = std::string(risk::ToString(cfg.scene));
  top.Get("scene", scene);
  cfg.scene = risk::ParseScene(scene);
  top.Get("theta_base", cfg.scene_threshold.theta_base);
  if (auto s = top.Child("scene_alpha")) {
    s->Get("medical", cfg.scene_threshold.medical_alpha);
    s->Get("financial", cfg.scene_threshold.financial_alpha);
    s->Finish();
  }
  if (auto s = top.Child("tier_bands")) {
    s->Get("score", cfg.tier_bands.score);
    s->Get("rate", cfg.tier_bands.rate);
    s->Finish();
  }
  if (auto s = top.Child("weights")) {
    std::string mode = "fixed";
    s->Get("mode", mode);
    if (mode == "fixed") {
      cfg.weights_mode = WeightsMode::kFixed;
    } else if (mode == "rolling") {
      cfg.weights_mode = WeightsMode::kRolling;
    } else {
      throw std::invalid_argument("weights.mode must be fixed or rolling");
    }
    s->Get("capacity", cfg.rolling_capacity);
    s->Finish();
  }
  if (auto s = top.Child("backend")) {
    std::string kind = "echo-stub";
    s->Get("type", kind);
    if (kind == "echo-stub") {
      cfg.backend = BackendKind::kEchoStub;
    } else if (kind == "external-command") {
      cfg.backend = BackendKind::kExternalCommand;
    } else {
      throw std::invalid_argument("backend.type must be echo-stub or external-command");
    }
    s->Get("command", cfg.backend_command);
    s->Finish();
  }
  if (auto s = top.Child("paths")) {
    std::string blocklist, embeddings, keys, audit, events, trace_index, backflow;
    s->Get("blocklist", blocklist);
    s->Get("embeddings", embeddings);
    s->Get("keys", keys);
    s->Get("audit", audit);
    s->Get("events", events);
    s->Get("trace_index", trace_index);
    s->Get("backflow", backflow);
    s->Finish();
    cfg.paths = {Resolve(base_dir, blocklist),   Resolve(base_dir, embeddings),
                 Resolve(base_dir, keys),        Resolve(base_dir, audit),
                 Resolve(base_dir, events),      Resolve(base_dir, trace_index),
                 Resolve(base_dir, backflow)};
  }
  if (auto s = top.Child("filter")) {
    s->Get("block_confidence", cfg.filter.block_confidence);
    s->Get("context_threshold", cfg.filter.context_threshold);
    s->Get("context_rounds", cfg.filter.context_rounds);
    s->Get("hmm_history", cfg.filter.hmm_history);
    double window_s = static_cast<double>(cfg.filter.temporal_window.count()) / 1000.0;
    s->Get("temporal_window_s", window_s);
    cfg.filter.temporal_window = Millis(static_cast<std::int64_t>(window_s * 1000.0));
    s->Get("temporal_trigger", cfg.filter.temporal_trigger);
    std::string mode = "by-tier";
    s->Get("fail_mode", mode);
    if (mode == "open") {
      cfg.filter.fail_mode = filter::FailMode::kOpen;
    } else if (mode == "closed") {
      cfg.filter.fail_mode = filter::FailMode::kClosed;
    } else if (mode == "by-tier") {
      cfg.filter.fail_mode = filter::FailMode::kByTier;
    } else {
      throw std::invalid_argument("filter.fail_mode must be open, closed or by-tier");
    }
    s->Get("classifier_threshold", cfg.classifier_threshold);
    s->Finish();
  }
  if (auto s = top.Child("review")) {
    s->Get("k", cfg.review.k);
    s->Get("tau", cfg.review.tau);
    s->Get("theta_dp_base", cfg.review.theta_dp_base);
    s->Get("dp_coupling", cfg.review.dp_coupling);
    s->Get("epsilon_base", cfg.review.epsilon_base);
    s->Get("classifier_skip_alpha", cfg.review.classifier_skip_alpha);
    s->Finish();
  }
  if (auto s = top.Child("dp")) {
    s->Get("epsilon", cfg.dp.epsilon);
    s->Get("delta", cfg.dp.delta);
    s->Get("sensitivity", cfg.dp.sensitivity);
    s->Get("alpha", cfg.dp.alpha);
    std::string calibration = "unscaled";
    s->Get("calibration", calibration);
    cfg.calibration = dp::ParseCalibration(calibration);
    s->Finish();
  }
  if (auto s = top.Child("telemetry")) {
    s->Get("port", cfg.telemetry_port);
    s->Finish();
  }
  if (auto s = top.Child("server")) {
    s->Get("host", cfg.server_host);
    s->Get("port", cfg.server_port);
    s->Get("api_key", cfg.api_key);
    s->Finish();
  }
  if (auto s = top.Child("session")) {
    double idle_s = 1800.0;
    s->Get("idle_timeout_s", idle_s);
    cfg.session_idle = Millis(static_cast<std::int64_t>(idle_s * 1000.0));
    s->Finish();
  }
  if (auto s = top.Child("feedback")) {
    s->Get("min_watermark_samples", cfg.min_watermark_samples);
    s->Finish();
  }
  if (auto s = top.Child("backflow")) {
    s->Get("max_bytes", cfg.backflow_max_bytes);
    double hours = 24.0;
    s->Get("segment_hours", hours);
    cfg.backflow_segment = Millis(static_cast<std::int64_t>(hours * 3600000.0));
    s->Finish();
  }
  if (auto s = top.Child("replay")) {
    s->Get("seed", cfg.replay_seed);
    double step_ms = 1000.0;
    s->Get("step_ms", step_ms);
    cfg.replay_step = Millis(static_cast<std::int64_t>(step_ms));
    s->Get("start_ts", cfg.replay_start_ts);
    s->Finish();
  }
  top.Finish();
  cfg.Validate();
  return cfg;
}

GatewayConfig LoadConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseConfig(buf.str(), path.parent_path());
}

}  // namespace riskgate
