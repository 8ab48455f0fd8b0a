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

// Entropy-weight method. Columns of an n x m sample matrix are indicators;
// each is min-max normalized, its Shannon entropy over the n samples is
// taken, and indicators that are more dispersed (lower entropy) receive
// more weight:
//
//   x'_ij = (x_ij - min_j) / (max_j - min_j)
//   p_ij  = x'_ij / sum_i x'_ij
//   E_j   = -(1 / ln n) sum_i p_ij ln p_ij        (0 ln 0 = 0)
//   W_j   = (1 - E_j) / sum_k (1 - E_k)
//
// Constant columns normalize to zeros, are flagged degenerate, and get
// E_j = 1, hence zero weight.

#ifndef RISKGATE_ENTROPY_FUSION_H_
#define RISKGATE_ENTROPY_FUSION_H_

#include <cmath>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace riskgate::fusion {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

struct IndicatorMatrix {
  Eigen::MatrixXd rows;  // n samples x m indicators
  std::vector<std::string> indicator_names;

  // n >= 2, m >= 1, names match columns, no NaN.
  void Validate() const;
};

template <typename Scalar>
struct Normalized {
  Matrix<Scalar> values;
  std::vector<bool> degenerate;
};

template <typename Scalar>
struct WeightVector {
  Vector<Scalar> weights;
  Vector<Scalar> entropies;
};

class NoDiscriminatingIndicatorError : public std::domain_error {
 public:
  NoDiscriminatingIndicatorError()
      : std::domain_error("no discriminating indicator: every entropy is 1") {}
};

template <typename Derived>
Normalized<typename Derived::Scalar> Normalize(
    const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  Normalized<Scalar> out;
  out.values.resize(x.rows(), x.cols());
  out.degenerate.assign(static_cast<std::size_t>(x.cols()), false);
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const Scalar lo = x.col(j).minCoeff();
    const Scalar hi = x.col(j).maxCoeff();
    if (!(hi > lo)) {
      out.values.col(j).setZero();
      out.degenerate[static_cast<std::size_t>(j)] = true;
      continue;
    }
    out.values.col(j) = (x.col(j).array() - lo) / (hi - lo);
  }
  return out;
}

template <typename Derived>
Vector<typename Derived::Scalar> Entropy(const Eigen::MatrixBase<Derived>& xn) {
  using Scalar = typename Derived::Scalar;
  using std::log;
  const Eigen::Index n = xn.rows();
  if (n < 2) throw std::invalid_argument("entropy needs at least two samples");
  const Scalar inv_log_n = Scalar(1) / log(static_cast<Scalar>(n));
  Vector<Scalar> e(xn.cols());
  for (Eigen::Index j = 0; j < xn.cols(); ++j) {
    const Scalar total = xn.col(j).sum();
    if (!(total > Scalar(0))) {
      e(j) = Scalar(1);
      continue;
    }
    Scalar acc(0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Scalar p = xn(i, j) / total;
      if (p > Scalar(0)) acc += p * log(p);
    }
    e(j) = -inv_log_n * acc;
  }
  return e;
}

template <typename Derived>
WeightVector<typename Derived::Scalar> Weights(
    const Eigen::MatrixBase<Derived>& entropies) {
  using Scalar = typename Derived::Scalar;
  for (Eigen::Index j = 0; j < entropies.size(); ++j) {
    if (!(entropies(j) >= Scalar(0) && entropies(j) <= Scalar(1) + Scalar(1e-12))) {
      throw std::invalid_argument("entropy outside [0, 1]");
    }
  }
  Vector<Scalar> slack = (Scalar(1) - entropies.array()).max(Scalar(0)).matrix();
  const Scalar total = slack.sum();
  if (!(total > Scalar(0))) throw NoDiscriminatingIndicatorError();
  return {slack / total, entropies};
}

// Full pipeline from raw samples to weights.
WeightVector<double> ComputeWeights(const IndicatorMatrix& matrix);

// Weighted sum of normalized indicator values. Throws on dimension mismatch
// or values outside [0, 1].
double FusedScore(const Eigen::Ref<const Eigen::VectorXd>& indicators,
                  const Eigen::Ref<const Eigen::VectorXd>& weights);

// Default weighting of (sensitive-word frequency, abnormal API call rate).
inline constexpr double kSensitiveWordWeight = 0.409;
inline constexpr double kAbnormalCallWeight = 0.591;
Eigen::Vector2d FixedWeights();

// CSV with a header of indicator names and one sample per row.
IndicatorMatrix ParseIndicatorCsv(std::string_view csv);
IndicatorMatrix LoadIndicatorCsv(const std::string& path);

// Single-writer accumulator of indicator samples. Weights are recomputed
// from the most recent `capacity` rows; readers get the last good result.
class RollingWeights {
 public:
  RollingWeights(Eigen::VectorXd fallback, std::size_t capacity);

  void Add(const Eigen::Ref<const Eigen::VectorXd>& sample);
  Eigen::VectorXd Current() const;
  std::size_t samples() const;

 private:
  mutable std::mutex mu_;
  Eigen::VectorXd fallback_;
  Eigen::VectorXd current_;
  std::size_t capacity_;
  std::vector<Eigen::VectorXd> ring_;
  std::size_t next_ = 0;
};

}  // namespace riskgate::fusion

#endif  // RISKGATE_ENTROPY_FUSION_H_
