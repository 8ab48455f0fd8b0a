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

#include "riskgate/hmm.h"

#include <cmath>
#include <limits>

namespace riskgate::hmm {

namespace {

constexpr double kRowTolerance = 1e-9;

void CheckDistribution(const Eigen::Ref<const Eigen::RowVectorXd>& row,
                       const std::string& what) {
  if ((row.array() < 0.0).any() || !row.allFinite()) {
    throw std::invalid_argument(what + " has a negative or non-finite entry");
  }
  if (std::abs(row.sum() - 1.0) > kRowTolerance) {
    throw std::invalid_argument(what + " does not sum to 1");
  }
}

double SafeLog(double p) {
  return p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
}

}  // namespace

DialogueHmm::DialogueHmm(std::vector<std::string> states,
                         std::vector<std::string> symbols,
                         Eigen::VectorXd start, Eigen::MatrixXd transitions,
                         Eigen::MatrixXd emissions)
    : states_(std::move(states)),
      symbols_(std::move(symbols)),
      start_(std::move(start)),
      transitions_(std::move(transitions)),
      emissions_(std::move(emissions)) {
  const auto n = static_cast<Eigen::Index>(states_.size());
  const auto m = static_cast<Eigen::Index>(symbols_.size());
  if (n < 1) throw std::invalid_argument("HMM needs at least one state");
  if (m < 1) throw std::invalid_argument("HMM needs at least one symbol");
  if (start_.size() != n || transitions_.rows() != n ||
      transitions_.cols() != n || emissions_.rows() != n ||
      emissions_.cols() != m) {
    throw std::invalid_argument("HMM parameter shapes do not match");
  }
  CheckDistribution(start_.transpose(), "start distribution");
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::string& s = states_[static_cast<std::size_t>(i)];
    CheckDistribution(transitions_.row(i), "transition row '" + s + "'");
    CheckDistribution(emissions_.row(i), "emission row '" + s + "'");
  }
}

DialogueHmm DialogueHmm::DefaultDialogueModel() {
  Eigen::Vector2d start(0.9, 0.1);
  Eigen::Matrix2d transitions;
  transitions << 0.9, 0.1,
                 0.2, 0.8;
  Eigen::Matrix<double, 2, 3> emissions;
  emissions << 0.80, 0.18, 0.02,
               0.20, 0.40, 0.40;
  return DialogueHmm({"benign", "attack"}, {"normal", "sensitive", "escape"},
                     start, transitions, emissions);
}

std::size_t DialogueHmm::SymbolIndex(const std::string& symbol,
                                     std::size_t position) const {
  for (std::size_t k = 0; k < symbols_.size(); ++k) {
    if (symbols_[k] == symbol) return k;
  }
  throw UnknownSymbolError(symbol, position);
}

std::size_t DialogueHmm::StateIndex(const std::string& state) const {
  for (std::size_t k = 0; k < states_.size(); ++k) {
    if (states_[k] == state) return k;
  }
  throw std::invalid_argument("unknown HMM state '" + state + "'");
}

ViterbiResult ViterbiPath(const DialogueHmm& model,
                          const std::vector<std::string>& observations) {
  std::vector<std::size_t> indices;
  indices.reserve(observations.size());
  for (std::size_t t = 0; t < observations.size(); ++t) {
    indices.push_back(model.SymbolIndex(observations[t], t));
  }
  return ViterbiPath(model, indices);
}

ViterbiResult ViterbiPath(const DialogueHmm& model,
                          const std::vector<std::size_t>& observations) {
  if (observations.empty()) {
    throw std::invalid_argument("Viterbi needs at least one observation");
  }
  const Eigen::Index n = model.start().size();
  const auto num_symbols = model.symbols().size();
  for (std::size_t t = 0; t < observations.size(); ++t) {
    if (observations[t] >= num_symbols) {
      throw UnknownSymbolError("#" + std::to_string(observations[t]), t);
    }
  }
  const Eigen::MatrixXd log_a = model.transitions().unaryExpr(&SafeLog);
  const Eigen::MatrixXd log_b = model.emissions().unaryExpr(&SafeLog);
  const auto steps = static_cast<Eigen::Index>(observations.size());

  Eigen::MatrixXd delta(steps, n);
  Eigen::MatrixXi back = Eigen::MatrixXi::Zero(steps, n);
  const auto o0 = static_cast<Eigen::Index>(observations[0]);
  delta.row(0) = model.start().unaryExpr(&SafeLog).transpose() +
                 log_b.col(o0).transpose();

  for (Eigen::Index t = 1; t < steps; ++t) {
    const auto o = static_cast<Eigen::Index>(observations[static_cast<std::size_t>(t)]);
    for (Eigen::Index j = 0; j < n; ++j) {
      Eigen::Index best = 0;
      const double score =
          (delta.row(t - 1).transpose() + log_a.col(j)).maxCoeff(&best);
      delta(t, j) = score + log_b(j, o);
      back(t, j) = static_cast<int>(best);
    }
  }

  ViterbiResult result;
  Eigen::Index state = 0;
  result.log_probability = delta.row(steps - 1).maxCoeff(&state);
  result.probability = std::exp(result.log_probability);
  result.path.resize(observations.size());
  for (Eigen::Index t = steps - 1; t >= 0; --t) {
    result.path[static_cast<std::size_t>(t)] = static_cast<std::size_t>(state);
    if (t > 0) state = back(t, state);
  }
  for (std::size_t s : result.path) result.labels.push_back(model.states()[s]);
  return result;
}

}  // namespace riskgate::hmm
