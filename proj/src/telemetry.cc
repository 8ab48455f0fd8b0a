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

#include "riskgate/telemetry.h"

#include <charconv>
#include <cmath>
#include <mutex>

namespace riskgate::telemetry {

namespace {

bool IsNameStart(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c == ':';
}

bool IsNameChar(char c) { return IsNameStart(c) || (c >= '0' && c <= '9'); }

std::string FormatValue(double v) {
  if (std::isnan(v)) return "NaN";
  if (std::isinf(v)) return v > 0 ? "+Inf" : "-Inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

std::string EscapeHelp(std::string_view help) {
  std::string out;
  for (char c : help) {
    if (c == '\\') {
      out += "\\\\";
    } else if (c == '\n') {
      out += "\\n";
    } else {
      out += c;
    }
  }
  return out;
}

}  // namespace

std::string_view ToString(Family f) {
  switch (f) {
    case Family::kInput:
      return "input";
    case Family::kModel:
      return "model";
    case Family::kOutput:
      return "output";
    case Family::kSystem:
      return "system";
  }
  return "system";
}

void MetricSpec::Validate() const {
  if (name.empty() || !IsNameStart(name.front())) {
    throw std::invalid_argument("invalid metric name: '" + name + "'");
  }
  for (char c : name) {
    if (!IsNameChar(c)) throw std::invalid_argument("invalid metric name: '" + name + "'");
  }
  const std::int64_t want = criticality == Criticality::kCritical
                                ? kCriticalPeriodSeconds
                                : kNonCriticalPeriodSeconds;
  if (sample_period_s != want) {
    throw std::invalid_argument("metric " + name +
                                ": sample period does not match criticality");
  }
  if (sample_size_bytes == 0 || retention_s == 0) {
    throw std::invalid_argument("metric " + name +
                                ": sample size and retention must be positive");
  }
}

MetricSpec MakeSpec(std::string name, Family family, Criticality criticality,
                    std::string help, std::uint64_t sample_size_bytes,
                    std::uint64_t retention_s) {
  MetricSpec spec;
  spec.name = std::move(name);
  spec.help = std::move(help);
  spec.family = family;
  spec.criticality = criticality;
  spec.sample_period_s = criticality == Criticality::kCritical
                             ? kCriticalPeriodSeconds
                             : kNonCriticalPeriodSeconds;
  spec.sample_size_bytes = sample_size_bytes;
  spec.retention_s = retention_s;
  return spec;
}

double StorageEstimate(std::span<const MetricSpec> specs) {
  // Periods are 1 or 5 s, so scaling every term by 5 keeps it integral.
  unsigned __int128 scaled = 0;
  for (const MetricSpec& s : specs) {
    s.Validate();
    const auto factor = static_cast<unsigned __int128>(
        kNonCriticalPeriodSeconds / s.sample_period_s);
    scaled += static_cast<unsigned __int128>(s.sample_size_bytes) * s.retention_s *
              factor;
  }
  // Exact below 2^53, and IEEE division then rounds correctly.
  return static_cast<double>(scaled) / static_cast<double>(kNonCriticalPeriodSeconds);
}

void Registry::Register(const MetricSpec& spec) {
  spec.Validate();
  std::unique_lock<std::shared_mutex> lock(mu_);
  if (series_.count(spec.name) != 0) {
    throw std::invalid_argument("metric already registered: " + spec.name);
  }
  series_.emplace(spec.name, Series{spec, {}, 0});
}

RecordOutcome Registry::Record(std::string_view name, double value, double ts) {
  std::unique_lock<std::shared_mutex> lock(mu_);
  auto it = series_.find(name);
  if (it == series_.end()) throw UnknownMetricError(std::string(name));
  Series& s = it->second;
  const auto bucket = static_cast<std::int64_t>(
      std::floor(ts / static_cast<double>(s.spec.sample_period_s)));
  if (!s.samples.empty()) {
    if (bucket == s.last_bucket) {
      s.samples.back() = {ts, value};
      return RecordOutcome::kCoalesced;
    }
    if (bucket < s.last_bucket) return RecordOutcome::kDroppedLate;
  }
  s.samples.push_back({ts, value});
  s.last_bucket = bucket;
  const std::uint64_t capacity =
      std::max<std::uint64_t>(1, s.spec.retention_s /
                                     static_cast<std::uint64_t>(s.spec.sample_period_s));
  while (s.samples.size() > capacity) s.samples.pop_front();
  return RecordOutcome::kStored;
}

std::vector<MetricSnapshot> Registry::Snapshot() const {
  std::shared_lock<std::shared_mutex> lock(mu_);
  std::vector<MetricSnapshot> out;
  out.reserve(series_.size());
  for (const auto& [_, s] : series_) {
    MetricSnapshot snap{s.spec, std::nullopt};
    if (!s.samples.empty()) snap.latest = s.samples.back();
    out.push_back(std::move(snap));
  }
  return out;
}

std::vector<Sample> Registry::History(std::string_view name) const {
  std::shared_lock<std::shared_mutex> lock(mu_);
  auto it = series_.find(name);
  if (it == series_.end()) throw UnknownMetricError(std::string(name));
  return {it->second.samples.begin(), it->second.samples.end()};
}

std::vector<MetricSpec> Registry::Specs() const {
  std::shared_lock<std::shared_mutex> lock(mu_);
  std::vector<MetricSpec> out;
  for (const auto& [_, s] : series_) out.push_back(s.spec);
  return out;
}

bool Registry::empty() const {
  std::shared_lock<std::shared_mutex> lock(mu_);
  return series_.empty();
}

std::string Expose(const Registry& registry) {
  std::string out;
  for (const MetricSnapshot& m : registry.Snapshot()) {
    if (!m.spec.help.empty()) {
      out += "# HELP " + m.spec.name + " " + EscapeHelp(m.spec.help) + "\n";
    }
    out += "# TYPE " + m.spec.name + " gauge\n";
    if (m.latest) out += m.spec.name + " " + FormatValue(m.latest->value) + "\n";
  }
  return out;
}

std::vector<MetricSpec> GatewayMetricSpecs() {
  using C = Criticality;
  using F = Family;
  return {
      MakeSpec("riskgate_sensitive_word_density", F::kInput, C::kCritical,
               "Blocklist hits per thousand tokens of the latest request."),
      MakeSpec("riskgate_intent_confidence", F::kInput, C::kCritical,
               "Malicious-intent confidence of the latest request."),
      MakeSpec("riskgate_abusive_request_percentage", F::kInput, C::kCritical,
               "Weighted injection and jailbreak share of recent requests."),
      MakeSpec("riskgate_abnormal_call_rate", F::kInput, C::kCritical,
               "Abnormal-request fraction for the latest client window."),
      MakeSpec("riskgate_context_deviation", F::kInput, C::kNonCritical,
               "Share of dialogue turns decoded as attack state."),
      MakeSpec("riskgate_dp_noise_sigma", F::kModel, C::kNonCritical,
               "Configured Gaussian noise scale."),
      MakeSpec("riskgate_clip_threshold", F::kModel, C::kNonCritical,
               "Most recent gradient clipping threshold."),
      MakeSpec("riskgate_watermark_id_rate", F::kOutput, C::kCritical,
               "Share of checked outputs whose watermark validated."),
      MakeSpec("riskgate_compliance_block_rate", F::kOutput, C::kNonCritical,
               "Share of reviewed outputs that were blocked."),
      MakeSpec("riskgate_risk_score", F::kSystem, C::kCritical,
               "Normalized risk score of the latest request."),
      MakeSpec("riskgate_fused_score", F::kSystem, C::kCritical,
               "Entropy-weighted fused indicator score of the latest request."),
      MakeSpec("riskgate_request_latency_p99_ms", F::kSystem, C::kNonCritical,
               "99th percentile request latency in milliseconds."),
  };
}

}  // namespace riskgate::telemetry
