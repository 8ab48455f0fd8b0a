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

#ifndef RISKGATE_BACKFLOW_H_
#define RISKGATE_BACKFLOW_H_

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "riskgate/clock.h"
#include "riskgate/input_filter.h"
#include "riskgate/risk_matrix.h"

namespace riskgate::filter {

struct BackflowResult {
  bool written = false;
  std::string record;  // the JSONL line, without newline
  std::filesystem::path segment;
  std::vector<std::string> warnings;
};

// Append-only store of blocked inputs for later adversarial retraining.
// Raw text never reaches disk; records carry its SHA-256. Segments roll
// over every `segment_period`, and the oldest are dropped once the store
// exceeds `max_bytes`.
class BackflowStore {
 public:
  BackflowStore(std::filesystem::path directory,
                std::uintmax_t max_bytes = 64u << 20,
                Millis segment_period = std::chrono::hours(24));

  // No-op unless the verdict blocked the input.
  BackflowResult Append(std::string_view text, const FilterVerdict& verdict,
                        risk::Tier tier, TimePoint now);

  std::vector<std::filesystem::path> Segments() const;
  const std::filesystem::path& directory() const { return directory_; }

 private:
  std::filesystem::path SegmentFor(TimePoint now) const;

  std::filesystem::path directory_;
  std::uintmax_t max_bytes_;
  Millis segment_period_;
  mutable std::mutex mu_;
};

}  // namespace riskgate::filter

#endif  // RISKGATE_BACKFLOW_H_
