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

#include "riskgate/indicators.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>
#include <vector>

namespace riskgate::indicators {

DensityResult SensitiveWordDensity(const ScanResult& scan) {
  DensityResult result;
  result.total_words = scan.tokens.size();
  if (result.total_words == 0) {
    result.degenerate = true;
    return result;
  }

  // One hit per token position at which some term or pattern match starts.
  std::set<std::size_t> starts;
  for (const RuleMatch& m : scan.matches) {
    if (m.last_token > m.first_token) starts.insert(m.first_token);
  }
  result.hits = starts.size();

  result.density_per_thousand = static_cast<double>(result.hits) /
                                static_cast<double>(result.total_words) *
                                1000.0;
  result.elevated_leak_risk =
      result.density_per_thousand >= kElevatedDensityPerThousand;
  result.leak_probability = result.elevated_leak_risk
                                ? kElevatedLeakProbability
                                : kBaselineLeakProbability;
  return result;
}

DensityResult SensitiveWordDensity(std::string_view text,
                                   const BlocklistDb& db) {
  return SensitiveWordDensity(db.Scan(text));
}

EmbeddingTable::EmbeddingTable(Eigen::Index dimension) : dimension_(dimension) {
  if (dimension <= 0) {
    throw std::invalid_argument("embedding dimension must be positive");
  }
}

void EmbeddingTable::Add(const std::string& word, Eigen::VectorXd vector) {
  if (vector.size() != dimension_) {
    throw std::invalid_argument("embedding for '" + word + "' has length " +
                                std::to_string(vector.size()) + ", expected " +
                                std::to_string(dimension_));
  }
  if (!(vector.norm() > 0.0) || !vector.allFinite()) {
    throw std::invalid_argument("embedding for '" + word +
                                "' has zero or non-finite norm");
  }
  entries_.insert_or_assign(word, std::move(vector));
}

const Eigen::VectorXd& EmbeddingTable::Lookup(const std::string& word) const {
  auto it = entries_.find(word);
  if (it == entries_.end()) throw MissingWordError(word);
  return it->second;
}

bool EmbeddingTable::Contains(const std::string& word) const {
  return entries_.count(word) != 0;
}

EmbeddingTable EmbeddingTable::Parse(std::string_view contents) {
  std::istringstream in{std::string(contents)};
  std::string header;
  if (!std::getline(in, header) || header.rfind("d=", 0) != 0) {
    throw std::invalid_argument("embedding file must start with 'd=<dimension>'");
  }
  Eigen::Index dimension = 0;
  try {
    dimension = std::stol(header.substr(2));
  } catch (const std::exception&) {
    throw std::invalid_argument("bad embedding header: " + header);
  }
  EmbeddingTable table(dimension);
  std::string line;
  int line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    std::istringstream fields(line);
    std::string word;
    if (!(fields >> word)) continue;
    std::vector<double> values;
    double v;
    while (fields >> v) values.push_back(v);
    if (!fields.eof()) {
      throw std::invalid_argument("non-numeric embedding value on line " +
                                  std::to_string(line_number));
    }
    table.Add(word, Eigen::Map<const Eigen::VectorXd>(
                        values.data(), static_cast<Eigen::Index>(values.size())));
  }
  return table;
}

EmbeddingTable EmbeddingTable::LoadFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open embedding file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return Parse(buffer.str());
}

double BiasSimilarity(const std::string& w1, const std::string& w2,
                      const EmbeddingTable& table) {
  const double c = CosineSimilarity(table.Lookup(w1), table.Lookup(w2));
  return std::clamp(c, -1.0, 1.0);
}

void AbuseRates::Validate() const {
  auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!in_unit(prompt_injection_rate) || !in_unit(jailbreak_rate)) {
    throw std::invalid_argument("abuse rates must lie in [0, 1]");
  }
  if (alpha < 0.0 || beta < 0.0 || std::abs(alpha + beta - 1.0) > 1e-12) {
    throw std::invalid_argument("abuse weights must be non-negative and sum to 1");
  }
}

double AbusiveRequestPercentage(const AbuseRates& rates) {
  rates.Validate();
  return rates.alpha * rates.prompt_injection_rate +
         rates.beta * rates.jailbreak_rate;
}

}  // namespace riskgate::indicators
