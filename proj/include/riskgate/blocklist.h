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

#ifndef RISKGATE_BLOCKLIST_H_
#define RISKGATE_BLOCKLIST_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "riskgate/text.h"

namespace riskgate {

// Review label a category feeds into. Abuse categories hold jailbreak and
// injection templates; their hits count as escape-attack detections.
enum class ReviewLabel { kPrivacy, kBias, kAbuse };

std::string_view ToString(ReviewLabel label);
ReviewLabel ParseReviewLabel(std::string_view name);

struct BlocklistCategory {
  ReviewLabel label = ReviewLabel::kPrivacy;
  std::vector<std::string> terms;
  std::vector<std::string> patterns;
};

enum class MatchKind { kTerm, kPattern };

struct RuleMatch {
  std::string category;
  ReviewLabel label = ReviewLabel::kPrivacy;
  MatchKind kind = MatchKind::kTerm;
  std::string rule;  // the term or pattern source that fired
  std::size_t begin = 0;  // byte offsets into ScanResult::normalized
  std::size_t end = 0;
  // Half-open token index range covered by the match; empty when a pattern
  // matched only inter-token characters.
  std::size_t first_token = 0;
  std::size_t last_token = 0;
};

struct ScanResult {
  std::string normalized;  // NFC form of the scanned text
  std::vector<text::Token> tokens;
  std::vector<RuleMatch> matches;  // sorted by (begin, end, category, rule)
};

// Immutable, validated sensitive-term database. Categories are keyed by
// name, so scans do not depend on the order categories were declared in.
class BlocklistDb {
 public:
  BlocklistDb();
  // Throws std::invalid_argument on empty or duplicate terms and on patterns
  // that fail to compile.
  BlocklistDb(std::map<std::string, BlocklistCategory> categories,
              std::int64_t version);

  // File format: JSON object of category -> {"terms": [...],
  // "patterns": [...], "label": "privacy|bias|abuse"}; an optional integer
  // "version" member sits beside the categories.
  static BlocklistDb FromJson(std::string_view json);
  static BlocklistDb LoadFile(const std::string& path);

  ScanResult Scan(std::string_view text) const;

  std::int64_t version() const { return version_; }
  const std::map<std::string, BlocklistCategory>& categories() const {
    return categories_;
  }
  bool empty() const;

 private:
  struct Compiled;
  std::map<std::string, BlocklistCategory> categories_;
  std::int64_t version_ = 0;
  std::shared_ptr<const Compiled> compiled_;
};

// Holds the live blocklist snapshot. Readers get a shared_ptr that stays
// valid while they use it; updates swap the whole database.
class BlocklistStore {
 public:
  explicit BlocklistStore(BlocklistDb initial);

  std::shared_ptr<const BlocklistDb> Snapshot() const;
  // Throws std::invalid_argument unless `next.version()` is strictly greater.
  void Update(BlocklistDb next);

 private:
  mutable std::mutex mu_;
  std::shared_ptr<const BlocklistDb> current_;
};

}  // namespace riskgate

#endif  // RISKGATE_BLOCKLIST_H_
