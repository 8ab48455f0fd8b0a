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

#include "riskgate/dp_mechanisms.h"

#include <numeric>
#include <sstream>

namespace riskgate::dp {

std::string_view ToString(Calibration c) {
  return c == Calibration::kCanonical ? "canonical" : "unscaled";
}

Calibration ParseCalibration(std::string_view s) {
  if (s == "unscaled") return Calibration::kUnscaled;
  if (s == "canonical") return Calibration::kCanonical;
  throw std::invalid_argument("unknown calibration: " + std::string(s));
}

void PrivacyParams::Validate() const {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("delta must lie in (0, 1)");
  }
  if (!(sensitivity > 0.0)) {
    throw std::invalid_argument("sensitivity must be positive");
  }
  if (!(alpha >= kMinAlpha && alpha <= kMaxAlpha)) {
    throw std::invalid_argument("alpha must lie in [0.1, 0.3]");
  }
}

void GradientBatch::Validate() const {
  if (clean_losses.empty() || clean_losses.size() != adv_losses.size()) {
    throw std::invalid_argument(
        "clean and adversarial losses must be non-empty and equal length");
  }
  for (double l : clean_losses) {
    if (!(l >= 0.0)) throw std::invalid_argument("losses must be non-negative");
  }
  for (double l : adv_losses) {
    if (!(l >= 0.0)) throw std::invalid_argument("losses must be non-negative");
  }
}

double ClipThreshold(const GradientBatch& batch, double alpha) {
  batch.Validate();
  if (!(alpha >= kMinAlpha && alpha <= kMaxAlpha)) {
    throw std::invalid_argument("alpha must lie in [0.1, 0.3]");
  }
  const double clean =
      std::accumulate(batch.clean_losses.begin(), batch.clean_losses.end(), 0.0);
  const double adv =
      std::accumulate(batch.adv_losses.begin(), batch.adv_losses.end(), 0.0);
  if (!(clean > 0.0)) {
    throw std::domain_error("clean loss sum is zero; clip threshold undefined");
  }
  return alpha * adv / clean;
}

double GaussianSigma(double epsilon, double delta, Calibration calibration,
                     double sensitivity) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("delta must lie in (0, 1)");
  }
  const double log_term = 2.0 * std::log(1.25 / delta);
  if (calibration == Calibration::kUnscaled) return std::sqrt(log_term / epsilon);
  if (!(sensitivity > 0.0)) {
    throw std::invalid_argument("sensitivity must be positive");
  }
  return sensitivity * std::sqrt(log_term) / epsilon;
}

double LaplaceScale(double sensitivity, double epsilon) {
  if (!(sensitivity > 0.0) || !(epsilon > 0.0)) {
    throw std::invalid_argument("sensitivity and epsilon must be positive");
  }
  return sensitivity / epsilon;
}

void PrivacyBudgetLedger::Spend(int epoch, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  std::lock_guard<std::mutex> lock(mu_);
  if (cap_ > 0.0 && total_ + epsilon > cap_ + 1e-12) {
    throw std::runtime_error("privacy budget exhausted");
  }
  by_epoch_[epoch] += epsilon;
  total_ += epsilon;
}

double PrivacyBudgetLedger::Total() const {
  std::lock_guard<std::mutex> lock(mu_);
  return total_;
}

double PrivacyBudgetLedger::EpochTotal(int epoch) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = by_epoch_.find(epoch);
  return it == by_epoch_.end() ? 0.0 : it->second;
}

Eigen::VectorXd ParseVector(std::string_view text) {
  std::vector<double> values;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(line.substr(first), &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("vector line " + std::to_string(line_no) +
                                  ": not a number");
    }
    if (line.find_first_not_of(" \t\r", first + used) != std::string::npos) {
      throw std::invalid_argument("vector line " + std::to_string(line_no) +
                                  ": trailing characters");
    }
    values.push_back(v);
  }
  return Eigen::Map<Eigen::VectorXd>(values.data(),
                                     static_cast<Eigen::Index>(values.size()));
}

}  // namespace riskgate::dp
