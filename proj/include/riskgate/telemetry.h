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

#ifndef RISKGATE_TELEMETRY_H_
#define RISKGATE_TELEMETRY_H_

#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <shared_mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace riskgate::telemetry {

enum class Family { kInput, kModel, kOutput, kSystem };
enum class Criticality { kCritical, kNonCritical };

std::string_view ToString(Family f);

inline constexpr std::int64_t kCriticalPeriodSeconds = 1;
inline constexpr std::int64_t kNonCriticalPeriodSeconds = 5;

struct MetricSpec {
  std::string name;
  std::string help;
  Family family = Family::kSystem;
  Criticality criticality = Criticality::kNonCritical;
  std::int64_t sample_period_s = kNonCriticalPeriodSeconds;
  std::uint64_t sample_size_bytes = 16;
  std::uint64_t retention_s = 3600;

  // Name must be a valid exposition metric name; the period must match the
  // criticality (1 s critical, 5 s otherwise); size and retention positive.
  void Validate() const;
};

// Fills in the period implied by `criticality`.
MetricSpec MakeSpec(std::string name, Family family, Criticality criticality,
                    std::string help = {}, std::uint64_t sample_size_bytes = 16,
                    std::uint64_t retention_s = 3600);

// Bytes needed to retain every spec: sum of size * retention / period.
// Accumulated in integers and divided once, so the result is the correctly
// rounded value of the exact sum.
double StorageEstimate(std::span<const MetricSpec> specs);

class UnknownMetricError : public std::out_of_range {
 public:
  explicit UnknownMetricError(const std::string& name)
      : std::out_of_range("unknown metric: " + name) {}
};

struct Sample {
  double ts = 0.0;  // seconds
  double value = 0.0;
};

enum class RecordOutcome { kStored, kCoalesced, kDroppedLate };

struct MetricSnapshot {
  MetricSpec spec;
  std::optional<Sample> latest;
};

// Gauge registry with per-metric sampling. A value landing in the same
// floor(ts / period) bucket as the newest stored sample replaces it; a value
// for an older bucket is dropped. Each metric keeps retention / period
// samples. Recorders and scrapers may run concurrently.
class Registry {
 public:
  // Throws std::invalid_argument on invalid or duplicate specs.
  void Register(const MetricSpec& spec);
  RecordOutcome Record(std::string_view name, double value, double ts);

  std::vector<MetricSnapshot> Snapshot() const;
  std::vector<Sample> History(std::string_view name) const;
  std::vector<MetricSpec> Specs() const;
  bool empty() const;

 private:
  struct Series {
    MetricSpec spec;
    std::deque<Sample> samples;
    std::int64_t last_bucket = 0;
  };
  mutable std::shared_mutex mu_;
  std::map<std::string, Series, std::less<>> series_;
};

// Text exposition format 0.0.4: HELP and TYPE lines per metric followed by
// its latest value; metrics without samples contribute only metadata.
std::string Expose(const Registry& registry);

inline constexpr std::string_view kExpositionContentType =
    "text/plain; version=0.0.4; charset=utf-8";

// The twelve gateway gauges, all prefixed "riskgate_".
std::vector<MetricSpec> GatewayMetricSpecs();

}  // namespace riskgate::telemetry

#endif  // RISKGATE_TELEMETRY_H_
