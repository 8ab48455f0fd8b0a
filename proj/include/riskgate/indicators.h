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

// Static risk indicators: sensitive-word density, embedding similarity for
// bias probes, and the weighted abusive-request percentage.

#ifndef RISKGATE_INDICATORS_H_
#define RISKGATE_INDICATORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>

#include <Eigen/Dense>

#include "riskgate/blocklist.h"

namespace riskgate::indicators {

// Density at or above this many hits per thousand words marks the text as an
// elevated privacy-leak risk.
inline constexpr double kElevatedDensityPerThousand = 5.0;
inline constexpr double kBaselineLeakProbability = 0.20;
inline constexpr double kElevatedLeakProbability = 0.35;

struct DensityResult {
  std::size_t hits = 0;
  std::size_t total_words = 0;
  double density_per_thousand = 0.0;
  bool degenerate = false;  // no words at all
  bool elevated_leak_risk = false;
  double leak_probability = kBaselineLeakProbability;
};

// Hits are deduplicated per token position: a term and a pattern that both
// start on the same token count once; a multi-word term counts once.
DensityResult SensitiveWordDensity(const ScanResult& scan);
DensityResult SensitiveWordDensity(std::string_view text,
                                   const BlocklistDb& db);

class MissingWordError : public std::out_of_range {
 public:
  explicit MissingWordError(const std::string& word)
      : std::out_of_range("word not in embedding table: " + word),
        word_(word) {}
  const std::string& word() const { return word_; }

 private:
  std::string word_;
};

class EmbeddingTable {
 public:
  explicit EmbeddingTable(Eigen::Index dimension);

  // Rejects vectors of the wrong length and zero-norm vectors.
  void Add(const std::string& word, Eigen::VectorXd vector);
  const Eigen::VectorXd& Lookup(const std::string& word) const;
  bool Contains(const std::string& word) const;

  Eigen::Index dimension() const { return dimension_; }
  std::size_t size() const { return entries_.size(); }

  // Header line "d=<dimension>", then "word v1 ... vd" per line.
  static EmbeddingTable Parse(std::string_view contents);
  static EmbeddingTable LoadFile(const std::string& path);

 private:
  Eigen::Index dimension_;
  std::unordered_map<std::string, Eigen::VectorXd> entries_;
};

template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar CosineSimilarity(
    const Eigen::MatrixBase<DerivedA>& a,
    const Eigen::MatrixBase<DerivedB>& b) {
  return a.dot(b) / (a.norm() * b.norm());
}

// Cosine of the two word vectors, clamped to [-1, 1] against rounding.
double BiasSimilarity(const std::string& w1, const std::string& w2,
                      const EmbeddingTable& table);

struct AbuseRates {
  double prompt_injection_rate = 0.0;
  double jailbreak_rate = 0.0;
  double alpha = 0.6;
  double beta = 0.4;

  void Validate() const;
};

double AbusiveRequestPercentage(const AbuseRates& rates);

}  // namespace riskgate::indicators

#endif  // RISKGATE_INDICATORS_H_
