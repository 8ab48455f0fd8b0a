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

#ifndef RISKGATE_CLASSIFIER_H_
#define RISKGATE_CLASSIFIER_H_

#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>

#include "riskgate/blocklist.h"

namespace riskgate {

struct ClassifierVerdict {
  double confidence = 0.0;  // probability of malicious intent
  bool malicious = false;   // confidence >= threshold
  double stealth = 0.0;
  std::set<ReviewLabel> labels;
  bool degraded = false;    // produced without a working classifier
};

// Thrown by classifiers that cannot answer (timeout, backend down).
class ClassifierUnavailable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Pluggable intent / compliance classifier. Implementations must be safe to
// call concurrently.
class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual ClassifierVerdict Classify(std::string_view text) const = 0;
  virtual std::string version() const = 0;
};

// Deterministic reference classifier driven by blocklist hits:
//
//   z = 1.5 * abuse_hits + min(1, 0.01 * sensitive_density_per_thousand)
//   confidence = 2 * logistic(z) - 1
//
// so empty or clean text scores exactly 0 and sensitive data alone can never
// cross the default 0.5 threshold.
class StubClassifier : public Classifier {
 public:
  static constexpr double kAbuseHitWeight = 1.5;
  static constexpr double kDensityWeight = 0.01;

  StubClassifier(std::shared_ptr<const BlocklistStore> store,
                 double threshold = 0.5);

  ClassifierVerdict Classify(std::string_view text) const override;
  ClassifierVerdict Classify(const ScanResult& scan) const;
  std::string version() const override { return "stub-v1"; }
  double threshold() const { return threshold_; }

 private:
  std::shared_ptr<const BlocklistStore> store_;
  double threshold_;
};

}  // namespace riskgate

#endif  // RISKGATE_CLASSIFIER_H_
