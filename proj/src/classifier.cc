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

#include "riskgate/classifier.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "riskgate/indicators.h"

namespace riskgate {

namespace {

// Abuse hits are counted per distinct start offset, so a template caught by
// both a term and a pattern counts once and adding a match never lowers the
// count. `pattern_only` receives how many starts have no plain-term match.
std::size_t AbuseHits(const std::vector<RuleMatch>& matches,
                      std::size_t* pattern_only) {
  std::map<std::size_t, bool> starts;  // begin -> has term match
  for (const RuleMatch& m : matches) {
    if (m.label != ReviewLabel::kAbuse) continue;
    starts[m.begin] |= m.kind == MatchKind::kTerm;
  }
  *pattern_only = 0;
  for (const auto& [begin, has_term] : starts) {
    if (!has_term) ++*pattern_only;
  }
  return starts.size();
}

}  // namespace

StubClassifier::StubClassifier(std::shared_ptr<const BlocklistStore> store,
                               double threshold)
    : store_(std::move(store)), threshold_(threshold) {
  if (!store_) throw std::invalid_argument("stub classifier needs a blocklist");
  if (!(threshold_ > 0.0 && threshold_ < 1.0)) {
    throw std::invalid_argument("classifier threshold must lie in (0, 1)");
  }
}

ClassifierVerdict StubClassifier::Classify(std::string_view text) const {
  return Classify(store_->Snapshot()->Scan(text));
}

ClassifierVerdict StubClassifier::Classify(const ScanResult& scan) const {
  ClassifierVerdict verdict;
  if (scan.tokens.empty() && scan.matches.empty()) return verdict;

  std::size_t pattern_only = 0;
  const std::size_t abuse = AbuseHits(scan.matches, &pattern_only);

  ScanResult sensitive;
  sensitive.tokens = scan.tokens;
  for (const RuleMatch& m : scan.matches) {
    if (m.label != ReviewLabel::kAbuse) sensitive.matches.push_back(m);
  }
  const double density =
      indicators::SensitiveWordDensity(sensitive).density_per_thousand;

  const double z = kAbuseHitWeight * static_cast<double>(abuse) +
                   std::min(1.0, kDensityWeight * density);
  verdict.confidence = std::tanh(z / 2.0);  // == 2 * logistic(z) - 1
  verdict.malicious = verdict.confidence >= threshold_;
  if (abuse > 0) {
    // Templates caught only by obfuscation-tolerant patterns read as stealthy.
    verdict.stealth = verdict.confidence * static_cast<double>(pattern_only) /
                      static_cast<double>(abuse);
  }

  // Label of the category with the most hits; ties go to the more severe
  // label (abuse, then privacy, then bias).
  std::map<std::string, std::pair<std::size_t, ReviewLabel>> per_category;
  for (const RuleMatch& m : scan.matches) {
    auto& entry = per_category[m.category];
    ++entry.first;
    entry.second = m.label;
  }
  auto severity = [](ReviewLabel l) {
    switch (l) {
      case ReviewLabel::kAbuse:
        return 2;
      case ReviewLabel::kPrivacy:
        return 1;
      case ReviewLabel::kBias:
        return 0;
    }
    return 0;
  };
  const std::pair<std::size_t, ReviewLabel>* best = nullptr;
  for (const auto& [name, entry] : per_category) {
    if (best == nullptr || entry.first > best->first ||
        (entry.first == best->first &&
         severity(entry.second) > severity(best->second))) {
      best = &entry;
    }
  }
  if (best != nullptr) verdict.labels.insert(best->second);
  return verdict;
}

}  // namespace riskgate
