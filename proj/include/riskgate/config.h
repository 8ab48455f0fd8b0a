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

#ifndef RISKGATE_CONFIG_H_
#define RISKGATE_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "riskgate/compliance.h"
#include "riskgate/dp_mechanisms.h"
#include "riskgate/input_filter.h"
#include "riskgate/risk_matrix.h"

namespace riskgate {

enum class WeightsMode { kFixed, kRolling };
enum class BackendKind { kEchoStub, kExternalCommand };

struct GatewayPaths {
  std::filesystem::path blocklist;
  std::filesystem::path embeddings;   // optional
  std::filesystem::path keys;
  std::filesystem::path audit;        // RequestTrace JSONL
  std::filesystem::path events;       // parameter-update JSONL
  std::filesystem::path trace_index;  // WatermarkRecord JSONL; empty = memory
  std::filesystem::path backflow;     // directory
};

struct GatewayConfig {
  risk::Scene scene = risk::Scene::kGeneric;
  risk::SceneThreshold scene_threshold;
  risk::TierBands tier_bands;

  WeightsMode weights_mode = WeightsMode::kFixed;
  std::size_t rolling_capacity = 256;

  BackendKind backend = BackendKind::kEchoStub;
  std::string backend_command;

  GatewayPaths paths;

  filter::FilterConfig filter;
  double classifier_threshold = 0.5;
  compliance::ReviewConfig review;
  dp::PrivacyParams dp;
  dp::Calibration calibration = dp::Calibration::kUnscaled;

  std::string server_host = "127.0.0.1";
  int server_port = 8080;
  int telemetry_port = 8000;
  std::string api_key;  // empty disables the check

  Millis session_idle = std::chrono::minutes(30);
  std::size_t min_watermark_samples = 20;
  std::uintmax_t backflow_max_bytes = 64u << 20;
  Millis backflow_segment = std::chrono::hours(24);

  std::uint64_t replay_seed = 42;
  Millis replay_step = std::chrono::seconds(1);
  double replay_start_ts = 1700000000.0;

  // Throws std::invalid_argument on inconsistent values.
  void Validate() const;
};

// JSON object with nested sections ("review": {"k": ...}, "telemetry":
// {"port": ...}, ...). Unknown keys are rejected so typos surface. Relative
// paths resolve against `base_dir`.
GatewayConfig ParseConfig(std::string_view json,
                          const std::filesystem::path& base_dir = {});
GatewayConfig LoadConfig(const std::filesystem::path& path);

}  // namespace riskgate

#endif  // RISKGATE_CONFIG_H_
