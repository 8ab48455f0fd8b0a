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

// Discrete HMM over dialogue turns and its most-likely state path.
//
// The first state is drawn from `start` (a virtual state s_0 feeding the
// first turn), so the path probability is
//
//   P(path | O) = start(s_1) b_{s_1}(o_1) prod_{t>1} a_{s_{t-1} s_t} b_{s_t}(o_t)
//
// and Viterbi maximizes it in log space.

#ifndef RISKGATE_HMM_H_
#define RISKGATE_HMM_H_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace riskgate::hmm {

class UnknownSymbolError : public std::invalid_argument {
 public:
  UnknownSymbolError(const std::string& symbol, std::size_t position)
      : std::invalid_argument("unknown observation symbol '" + symbol +
                              "' at position " + std::to_string(position)),
        symbol_(symbol),
        position_(position) {}
  const std::string& symbol() const { return symbol_; }
  std::size_t position() const { return position_; }

 private:
  std::string symbol_;
  std::size_t position_;
};

class DialogueHmm {
 public:
  // Throws std::invalid_argument unless every distribution is non-negative
  // and sums to 1 within 1e-9 and the shapes agree.
  DialogueHmm(std::vector<std::string> states, std::vector<std::string> symbols,
              Eigen::VectorXd start, Eigen::MatrixXd transitions,
              Eigen::MatrixXd emissions);

  // Two-state benign/attack model over {normal, sensitive, escape}.
  static DialogueHmm DefaultDialogueModel();

  std::size_t SymbolIndex(const std::string& symbol, std::size_t position) const;
  std::size_t StateIndex(const std::string& state) const;

  const std::vector<std::string>& states() const { return states_; }
  const std::vector<std::string>& symbols() const { return symbols_; }
  const Eigen::VectorXd& start() const { return start_; }
  const Eigen::MatrixXd& transitions() const { return transitions_; }
  const Eigen::MatrixXd& emissions() const { return emissions_; }

 private:
  std::vector<std::string> states_;
  std::vector<std::string> symbols_;
  Eigen::VectorXd start_;
  Eigen::MatrixXd transitions_;  // states x states, row = from
  Eigen::MatrixXd emissions_;    // states x symbols
};

struct ViterbiResult {
  std::vector<std::size_t> path;
  std::vector<std::string> labels;
  double log_probability = 0.0;
  double probability = 0.0;
};

// Throws std::invalid_argument on an empty sequence and UnknownSymbolError
// on symbols the model does not know.
ViterbiResult ViterbiPath(const DialogueHmm& model,
                          const std::vector<std::string>& observations);
ViterbiResult ViterbiPath(const DialogueHmm& model,
                          const std::vector<std::size_t>& observations);

}  // namespace riskgate::hmm

#endif  // RISKGATE_HMM_H_
