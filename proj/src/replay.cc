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

#include "riskgate/replay.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "riskgate/text.h"
#include "riskgate/watermark.h"

namespace riskgate {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

double Ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

// Fixed six-decimal rendering keeps the report stable across platforms.
ordered_json Fixed(double x) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(6);
  os << x;
  return ordered_json::parse(os.str());
}

double Percentile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const auto rank =
      static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size())));
  return v[std::clamp<std::size_t>(rank, 1, v.size()) - 1];
}

// Removes one zero-width character chosen by `rng`; returns the input when
// there is none.
std::string DeleteOneZeroWidth(const std::string& s, std::mt19937_64& rng) {
  std::vector<text::CodeUnit> marks;
  for (const text::CodeUnit& u : text::DecodeUtf8(s)) {
    if (u.valid && wm::IsZeroWidth(u.scalar)) marks.push_back(u);
  }
  if (marks.empty()) return s;
  std::uniform_int_distribution<std::size_t> pick(0, marks.size() - 1);
  const text::CodeUnit& victim = marks[pick(rng)];
  return s.substr(0, victim.begin) + s.substr(victim.begin + victim.length);
}

}  // namespace

Corpus ParseCorpus(std::string_view jsonl) {
  Corpus corpus;
  std::istringstream in{std::string(jsonl)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      if (!j.is_object()) throw std::invalid_argument("line is not a JSON object");
      CorpusEntry e;
      e.line = line_no;
      e.text = j.at("text").get<std::string>();
      const std::string label = j.at("label").get<std::string>();
      if (label == "attack") {
        e.attack = true;
      } else if (label != "benign") {
        throw std::invalid_argument("label must be attack or benign");
      }
      e.session = j.value("session", std::string());
      e.client = j.value("client", std::string());
      e.tamper = j.value("tamper", false);
      corpus.entries.push_back(std::move(e));
    } catch (const std::exception& ex) {
      corpus.errors.push_back({line_no, ex.what()});
    }
  }
  return corpus;
}

double ReplayResult::interception_rate() const {
  return Ratio(intercepted_attacks, attacks);
}
double ReplayResult::false_positive_rate() const {
  return Ratio(false_positives, benign);
}
double ReplayResult::template_interception_rate() const {
  return template_attacks == 0 ? 1.0 : Ratio(template_intercepted, template_attacks);
}
double ReplayResult::watermark_id_rate() const {
  return wm_checked == 0 ? 1.0 : Ratio(wm_identified, wm_checked);
}

Replayer::Replayer(const GatewayConfig& cfg, GatewayResources resources,
                   std::uint64_t seed)
    : cfg_(cfg),
      clock_(std::make_shared<ManualClock>(FromSeconds(cfg.replay_start_ts))),
      rng_(seed) {
  // Lookups must see only this run's records.
  cfg_.paths.trace_index.clear();
  gateway_ = std::make_unique<Gateway>(cfg_, std::move(resources), clock_);
}

ReplayResult Replayer::Run(const Corpus& corpus) {
  ReplayResult r;
  r.errors = corpus.errors;
  const auto db = gateway_->blocklist_snapshot();
  for (const CorpusEntry& e : corpus.entries) {
    GatewayRequest req;
    req.text = e.text;
    req.session_id = e.session.empty() ? "replay-" + std::to_string(e.line) : e.session;
    req.client_id = e.client.empty() ? "client-" + std::to_string(e.line) : e.client;

    const auto started = std::chrono::steady_clock::now();
    const GatewayResponse resp = gateway_->Handle(req);
    r.latencies_ms.push_back(std::chrono::duration<double, std::milli>(
                                 std::chrono::steady_clock::now() - started)
                                 .count());
    ++r.requests;
    ++r.tiers[static_cast<std::size_t>(resp.trace.tier)];
    ++r.outcomes[resp.trace.outcome];
    for (const std::string& ev : resp.trace.events) {
      r.feedback_events.push_back(resp.trace_id + " " + ev);
    }

    const bool intercepted = resp.status == 403;
    if (e.attack) {
      ++r.attacks;
      if (intercepted) ++r.intercepted_attacks;
      // Template attacks are the ones that fire an abuse rule.
      const ScanResult scan = db->Scan(e.text);
      const bool is_template =
          std::any_of(scan.matches.begin(), scan.matches.end(), [](const RuleMatch& m) {
            return m.label == ReviewLabel::kAbuse;
          });
      if (is_template) {
        ++r.template_attacks;
        if (intercepted) ++r.template_intercepted;
      }
    } else {
      ++r.benign;
      if (intercepted) ++r.false_positives;
    }

    if (resp.status == 200) {
      const std::string delivered =
          e.tamper ? DeleteOneZeroWidth(resp.text, rng_) : resp.text;
      const WatermarkCheck check = gateway_->VerifyWatermark(delivered);
      ++r.wm_checked;
      if (check.identified()) ++r.wm_identified;
    }
    clock_->Advance(cfg_.replay_step);
  }
  r.final_review_tau = gateway_->review_config()->tau;
  r.level3_active = gateway_->feedback_state().level3_active;
  return r;
}

std::string ReplayReportJson(const ReplayResult& r, const ReplayOptions& options) {
  ordered_json j;
  j["requests"] = r.requests;
  j["attacks"] = r.attacks;
  j["benign"] = r.benign;
  j["intercepted_attacks"] = r.intercepted_attacks;
  j["interception_rate"] = Fixed(r.interception_rate());
  j["false_positives"] = r.false_positives;
  j["false_positive_rate"] = Fixed(r.false_positive_rate());
  const std::size_t tp = r.intercepted_attacks;
  const double precision = Ratio(tp, tp + r.false_positives);
  const double recall = r.interception_rate();
  j["precision"] = Fixed(precision);
  j["recall"] = Fixed(recall);
  j["f1"] = Fixed(precision + recall == 0.0
                      ? 0.0
                      : 2.0 * precision * recall / (precision + recall));
  j["template_attacks"] = r.template_attacks;
  j["template_intercepted"] = r.template_intercepted;
  j["template_interception_rate"] = Fixed(r.template_interception_rate());
  ordered_json tiers;
  for (std::size_t t = 0; t < r.tiers.size(); ++t) {
    tiers[std::string(risk::ToString(static_cast<risk::Tier>(t)))] = r.tiers[t];
  }
  j["tiers"] = tiers;
  ordered_json outcomes = ordered_json::object();
  for (const auto& [k, v] : r.outcomes) outcomes[k] = v;
  j["outcomes"] = outcomes;
  j["watermark"] = {{"checked", r.wm_checked},
                    {"identified", r.wm_identified},
                    {"id_rate", Fixed(r.watermark_id_rate())}};
  j["feedback"] = {{"review_tau", Fixed(r.final_review_tau)},
                   {"level3_active", r.level3_active},
                   {"events", r.feedback_events}};
  ordered_json errors = ordered_json::array();
  for (const CorpusError& e : r.errors) {
    errors.push_back({{"line", e.line}, {"message", e.message}});
  }
  j["errors"] = errors;
  if (options.timings) {
    j["latency_ms"] = {{"p50", Fixed(Percentile(r.latencies_ms, 0.50))},
                       {"p95", Fixed(Percentile(r.latencies_ms, 0.95))},
                       {"p99", Fixed(Percentile(r.latencies_ms, 0.99))}};
  }
  return j.dump(2) + "\n";
}

}  // namespace riskgate
