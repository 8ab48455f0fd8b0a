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

#include "riskgate/backflow.h"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "json.hpp"
#include "riskgate/sha256.h"

namespace riskgate::filter {

namespace fs = std::filesystem;

BackflowStore::BackflowStore(fs::path directory, std::uintmax_t max_bytes,
                             Millis segment_period)
    : directory_(std::move(directory)),
      max_bytes_(max_bytes),
      segment_period_(segment_period) {
  if (segment_period_ <= Millis::zero()) {
    throw std::invalid_argument("backflow segment period must be positive");
  }
  fs::create_directories(directory_);
}

fs::path BackflowStore::SegmentFor(TimePoint now) const {
  const auto start = now.time_since_epoch().count() /
                     segment_period_.count() * segment_period_.count();
  // Zero-padded so lexical order is chronological.
  char name[48];
  std::snprintf(name, sizeof(name), "backflow-%015lld.jsonl",
                static_cast<long long>(start / 1000));
  return directory_ / name;
}

std::vector<fs::path> BackflowStore::Segments() const {
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(directory_)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("backflow-", 0) == 0 && entry.path().extension() == ".jsonl") {
      out.push_back(entry.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

BackflowResult BackflowStore::Append(std::string_view text,
                                     const FilterVerdict& verdict,
                                     risk::Tier tier, TimePoint now) {
  BackflowResult result;
  if (verdict.decision != Decision::kBlock) return result;

  nlohmann::json record;
  record["ts"] = ToSeconds(now);
  record["text_sha256"] = DigestHex(Sha256(text));
  record["evidence"] = nlohmann::json::array();
  for (const Evidence& e : verdict.evidence) {
    record["evidence"].push_back(
        {{"source", std::string(ToString(e.source))}, {"detail", e.detail}});
  }
  record["tier"] = std::string(risk::ToString(tier));
  result.record = record.dump();

  std::lock_guard<std::mutex> lock(mu_);
  result.segment = SegmentFor(now);
  {
    std::ofstream out(result.segment, std::ios::app);
    if (!out) {
      throw std::runtime_error("cannot append to " + result.segment.string());
    }
    out << result.record << '\n';
  }
  result.written = true;

  std::vector<fs::path> segments = Segments();
  std::uintmax_t total = 0;
  for (const fs::path& p : segments) total += fs::file_size(p);
  for (const fs::path& p : segments) {
    if (total <= max_bytes_ || p == result.segment) break;
    total -= fs::file_size(p);
    fs::remove(p);
    result.warnings.push_back("backflow store full; rotated out " +
                              p.filename().string());
  }
  return result;
}

}  // namespace riskgate::filter
