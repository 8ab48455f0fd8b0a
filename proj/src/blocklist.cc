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

#include "riskgate/blocklist.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>
#include <unordered_map>

#include <boost/regex.hpp>

#include "json.hpp"

namespace riskgate {

std::string_view ToString(ReviewLabel label) {
  switch (label) {
    case ReviewLabel::kPrivacy:
      return "privacy";
    case ReviewLabel::kBias:
      return "bias";
    case ReviewLabel::kAbuse:
      return "abuse";
  }
  return "privacy";
}

ReviewLabel ParseReviewLabel(std::string_view name) {
  if (name == "privacy") return ReviewLabel::kPrivacy;
  if (name == "bias") return ReviewLabel::kBias;
  if (name == "abuse") return ReviewLabel::kAbuse;
  throw std::invalid_argument("unknown review label: " + std::string(name));
}

struct BlocklistDb::Compiled {
  struct Term {
    std::string category;
    ReviewLabel label;
    std::string source;
    std::vector<std::string> tokens;
  };
  struct Pattern {
    std::string category;
    ReviewLabel label;
    std::string source;
    boost::regex regex;
  };
  // Keyed by the folded first token of each term.
  std::unordered_map<std::string, std::vector<Term>> terms_by_head;
  std::vector<Pattern> patterns;
};

BlocklistDb::BlocklistDb() : compiled_(std::make_shared<const Compiled>()) {}

BlocklistDb::BlocklistDb(std::map<std::string, BlocklistCategory> categories,
                         std::int64_t version)
    : categories_(std::move(categories)), version_(version) {
  auto compiled = std::make_shared<Compiled>();
  for (const auto& [name, category] : categories_) {
    std::set<std::string> seen;
    for (const std::string& term : category.terms) {
      std::vector<std::string> tokens;
      for (text::Token& t : text::Tokenize(text::ToNfc(term))) {
        tokens.push_back(std::move(t.folded));
      }
      if (tokens.empty()) {
        throw std::invalid_argument("blocklist category '" + name +
                                    "' has an empty term");
      }
      std::string key;
      for (const std::string& t : tokens) key += t + " ";
      if (!seen.insert(key).second) {
        throw std::invalid_argument("blocklist category '" + name +
                                    "' has duplicate term '" + term + "'");
      }
      compiled->terms_by_head[tokens.front()].push_back(
          {name, category.label, term, std::move(tokens)});
    }
    for (const std::string& pattern : category.patterns) {
      if (pattern.empty()) {
        throw std::invalid_argument("blocklist category '" + name +
                                    "' has an empty pattern");
      }
      try {
        compiled->patterns.push_back(
            {name, category.label, pattern,
             boost::regex(pattern, boost::regex::perl | boost::regex::icase |
                                       boost::regex::optimize)});
      } catch (const boost::regex_error& e) {
        throw std::invalid_argument("blocklist category '" + name +
                                    "' has malformed pattern '" + pattern +
                                    "': " + e.what());
      }
    }
  }
  compiled_ = std::move(compiled);
}

BlocklistDb BlocklistDb::FromJson(std::string_view json) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("blocklist is not valid JSON: ") +
                                e.what());
  }
  if (!doc.is_object()) {
    throw std::invalid_argument("blocklist must be a JSON object");
  }
  std::int64_t version = 0;
  std::map<std::string, BlocklistCategory> categories;
  for (const auto& [key, value] : doc.items()) {
    if (key == "version") {
      version = value.get<std::int64_t>();
      continue;
    }
    if (!value.is_object()) {
      throw std::invalid_argument("blocklist category '" + key +
                                  "' must be an object");
    }
    BlocklistCategory category;
    category.label = ParseReviewLabel(value.value("label", "privacy"));
    category.terms =
        value.value("terms", std::vector<std::string>{});
    category.patterns =
        value.value("patterns", std::vector<std::string>{});
    categories.emplace(key, std::move(category));
  }
  return BlocklistDb(std::move(categories), version);
}

BlocklistDb BlocklistDb::LoadFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open blocklist file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return FromJson(buffer.str());
}

bool BlocklistDb::empty() const {
  return compiled_->terms_by_head.empty() && compiled_->patterns.empty();
}

ScanResult BlocklistDb::Scan(std::string_view text) const {
  ScanResult result;
  result.normalized = text::ToNfc(text);
  result.tokens = text::Tokenize(result.normalized);
  const auto& tokens = result.tokens;

  for (std::size_t i = 0; i < tokens.size(); ++i) {
    auto it = compiled_->terms_by_head.find(tokens[i].folded);
    if (it == compiled_->terms_by_head.end()) continue;
    for (const Compiled::Term& term : it->second) {
      const std::size_t n = term.tokens.size();
      if (i + n > tokens.size()) continue;
      bool match = true;
      for (std::size_t k = 1; k < n && match; ++k) {
        match = tokens[i + k].folded == term.tokens[k];
      }
      if (!match) continue;
      result.matches.push_back({term.category, term.label, MatchKind::kTerm,
                                term.source, tokens[i].begin,
                                tokens[i + n - 1].end, i, i + n});
    }
  }

  const std::string& s = result.normalized;
  for (const Compiled::Pattern& pattern : compiled_->patterns) {
    boost::sregex_iterator it(s.begin(), s.end(), pattern.regex);
    for (; it != boost::sregex_iterator(); ++it) {
      const auto& m = *it;
      const auto begin = static_cast<std::size_t>(m[0].first - s.begin());
      const auto end = static_cast<std::size_t>(m[0].second - s.begin());
      if (begin == end) continue;
      // Tokens overlapping [begin, end).
      auto first = std::lower_bound(
          tokens.begin(), tokens.end(), begin,
          [](const text::Token& t, std::size_t b) { return t.end <= b; });
      auto last = std::lower_bound(
          first, tokens.end(), end,
          [](const text::Token& t, std::size_t e) { return t.begin < e; });
      const auto first_index =
          static_cast<std::size_t>(first - tokens.begin());
      const auto last_index = static_cast<std::size_t>(last - tokens.begin());
      result.matches.push_back({pattern.category, pattern.label,
                                MatchKind::kPattern, pattern.source, begin, end,
                                first_index,
                                std::max(first_index, last_index)});
    }
  }

  std::sort(result.matches.begin(), result.matches.end(),
            [](const RuleMatch& a, const RuleMatch& b) {
              return std::tie(a.begin, a.end, a.category, a.rule) <
                     std::tie(b.begin, b.end, b.category, b.rule);
            });
  return result;
}

BlocklistStore::BlocklistStore(BlocklistDb initial)
    : current_(std::make_shared<const BlocklistDb>(std::move(initial))) {}

std::shared_ptr<const BlocklistDb> BlocklistStore::Snapshot() const {
  std::lock_guard<std::mutex> lock(mu_);
  return current_;
}

void BlocklistStore::Update(BlocklistDb next) {
  auto replacement = std::make_shared<const BlocklistDb>(std::move(next));
  std::lock_guard<std::mutex> lock(mu_);
  if (replacement->version() <= current_->version()) {
    throw std::invalid_argument("blocklist version must strictly increase");
  }
  current_ = std::move(replacement);
}

}  // namespace riskgate
