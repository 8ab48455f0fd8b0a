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

#include "riskgate/entropy_fusion.h"

#include <fstream>
#include <sstream>

namespace riskgate::fusion {

void IndicatorMatrix::Validate() const {
  if (rows.rows() < 2) {
    throw std::invalid_argument("indicator matrix needs at least 2 samples");
  }
  if (rows.cols() < 1) {
    throw std::invalid_argument("indicator matrix needs at least 1 indicator");
  }
  if (static_cast<Eigen::Index>(indicator_names.size()) != rows.cols()) {
    throw std::invalid_argument("indicator names do not match column count");
  }
  if (rows.hasNaN()) throw std::invalid_argument("indicator matrix has NaN");
}

WeightVector<double> ComputeWeights(const IndicatorMatrix& matrix) {
  matrix.Validate();
  const Normalized<double> xn = Normalize(matrix.rows);
  return Weights(Entropy(xn.values));
}

double FusedScore(const Eigen::Ref<const Eigen::VectorXd>& indicators,
                  const Eigen::Ref<const Eigen::VectorXd>& weights) {
  if (indicators.size() != weights.size()) {
    throw std::invalid_argument("fused score: " +
                                std::to_string(indicators.size()) +
                                " indicators for " +
                                std::to_string(weights.size()) + " weights");
  }
  if ((indicators.array() < 0.0).any() || (indicators.array() > 1.0).any()) {
    throw std::invalid_argument("fused score: indicators must lie in [0, 1]");
  }
  return indicators.dot(weights);
}

Eigen::Vector2d FixedWeights() {
  return {kSensitiveWordWeight, kAbnormalCallWeight};
}

namespace {

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    fields.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

IndicatorMatrix ParseIndicatorCsv(std::string_view csv) {
  std::istringstream in{std::string(csv)};
  std::string line;
  IndicatorMatrix out;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) break;
  }
  out.indicator_names = SplitCsvLine(line);
  if (out.indicator_names.empty()) {
    throw std::invalid_argument("indicator CSV has no header");
  }
  const std::size_t m = out.indicator_names.size();
  std::vector<double> values;
  std::size_t n = 0;
  int line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::vector<std::string> fields = SplitCsvLine(line);
    if (fields.size() != m) {
      throw std::invalid_argument("indicator CSV line " +
                                  std::to_string(line_number) + " has " +
                                  std::to_string(fields.size()) +
                                  " fields, expected " + std::to_string(m));
    }
    for (const std::string& f : fields) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(f, &used));
        if (used != f.size()) throw std::invalid_argument(f);
      } catch (const std::exception&) {
        throw std::invalid_argument("indicator CSV line " +
                                    std::to_string(line_number) +
                                    ": not a number: '" + f + "'");
      }
    }
    ++n;
  }
  out.rows = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic,
                                            Eigen::Dynamic, Eigen::RowMajor>>(
      values.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  out.Validate();
  return out;
}

IndicatorMatrix LoadIndicatorCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open indicator CSV: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseIndicatorCsv(buffer.str());
}

RollingWeights::RollingWeights(Eigen::VectorXd fallback, std::size_t capacity)
    : fallback_(std::move(fallback)), current_(fallback_), capacity_(capacity) {
  if (capacity_ < 2) throw std::invalid_argument("rolling window needs >= 2 rows");
}

void RollingWeights::Add(const Eigen::Ref<const Eigen::VectorXd>& sample) {
  if (sample.size() != fallback_.size()) {
    throw std::invalid_argument("rolling sample has wrong dimension");
  }
  std::lock_guard<std::mutex> lock(mu_);
  if (ring_.size() < capacity_) {
    ring_.emplace_back(sample);
  } else {
    ring_[next_] = sample;
    next_ = (next_ + 1) % capacity_;
  }
  if (ring_.size() < 2) return;
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(ring_.size()), fallback_.size());
  for (std::size_t i = 0; i < ring_.size(); ++i) {
    rows.row(static_cast<Eigen::Index>(i)) = ring_[i].transpose();
  }
  try {
    current_ = Weights(Entropy(Normalize(rows).values)).weights;
  } catch (const NoDiscriminatingIndicatorError&) {
    current_ = fallback_;
  }
}

Eigen::VectorXd RollingWeights::Current() const {
  std::lock_guard<std::mutex> lock(mu_);
  return current_;
}

std::size_t RollingWeights::samples() const {
  std::lock_guard<std::mutex> lock(mu_);
  return ring_.size();
}

}  // namespace riskgate::fusion
