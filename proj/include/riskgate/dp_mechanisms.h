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

// Differential-privacy primitives over dense gradient vectors: a
// loss-ratio clipping threshold, L2 clipping, Gaussian and Laplace scale
// calibration, and two-stage noise injection.
//
// The Gaussian scale has two calibrations. `kUnscaled` is
//
//   sigma = sqrt(2 ln(1.25 / delta) / epsilon)
//
// and `kCanonical` is the textbook mechanism
//
//   sigma = sensitivity * sqrt(2 ln(1.25 / delta)) / epsilon.

#ifndef RISKGATE_DP_MECHANISMS_H_
#define RISKGATE_DP_MECHANISMS_H_

#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace riskgate::dp {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

enum class Calibration { kUnscaled, kCanonical };

std::string_view ToString(Calibration c);
Calibration ParseCalibration(std::string_view s);

// Stable band for the clipping smoothing factor.
inline constexpr double kMinAlpha = 0.1;
inline constexpr double kMaxAlpha = 0.3;

struct PrivacyParams {
  double epsilon = 0.5;
  double delta = 1e-5;
  double sensitivity = 0.05;
  double alpha = 0.2;

  // Throws std::invalid_argument when any field is out of range.
  void Validate() const;
};

struct GradientBatch {
  std::vector<double> clean_losses;
  std::vector<double> adv_losses;
  Eigen::VectorXd gradient;

  void Validate() const;
};

// tau = alpha * sum(adv) / sum(clean). Throws std::domain_error when the
// clean losses sum to zero.
double ClipThreshold(const GradientBatch& batch, double alpha);

// Scales g onto the L2 ball of radius tau if it lies outside. The rounded
// product can land an ulp past tau, so the factor is nudged down until the
// norm is within the ball.
template <typename Derived>
Vector<typename Derived::Scalar> Clip(const Eigen::MatrixBase<Derived>& g,
                                      typename Derived::Scalar tau) {
  using Scalar = typename Derived::Scalar;
  if (!(tau > Scalar(0))) throw std::invalid_argument("clip threshold must be positive");
  const Scalar norm = g.norm();
  if (!(norm > tau)) return g;
  Scalar factor = tau / norm;
  Vector<Scalar> out = g * factor;
  while (out.norm() > tau) {
    factor = std::nextafter(factor, Scalar(0));
    out = g * factor;
  }
  return out;
}

double GaussianSigma(double epsilon, double delta,
                     Calibration calibration = Calibration::kUnscaled,
                     double sensitivity = 1.0);

// b = sensitivity / epsilon.
double LaplaceScale(double sensitivity, double epsilon);

// Largest coordinate difference within a gradient.
template <typename Derived>
typename Derived::Scalar Sensitivity(const Eigen::MatrixBase<Derived>& g) {
  if (g.size() == 0) return typename Derived::Scalar(0);
  return g.maxCoeff() - g.minCoeff();
}

// Zero-mean Laplace(0, b) draw by inverse CDF.
template <typename Scalar, typename Rng>
Scalar SampleLaplace(Scalar b, Rng& rng) {
  if (b == Scalar(0)) return Scalar(0);
  std::uniform_real_distribution<Scalar> uniform(Scalar(-0.5), Scalar(0.5));
  Scalar u = uniform(rng);
  while (u == Scalar(-0.5)) u = uniform(rng);
  using std::abs;
  using std::log1p;
  const Scalar magnitude = -b * log1p(Scalar(-2) * abs(u));
  return u < Scalar(0) ? -magnitude : magnitude;
}

// g + N(0, sigma^2) + Laplace(0, b), independently per coordinate. The
// Gaussian stage draws every coordinate before the Laplace stage starts, so
// the two streams do not interleave.
template <typename Derived, typename Rng>
Vector<typename Derived::Scalar> InjectMixed(const Eigen::MatrixBase<Derived>& g,
                                             typename Derived::Scalar sigma,
                                             typename Derived::Scalar b,
                                             Rng& rng) {
  using Scalar = typename Derived::Scalar;
  if (!(sigma >= Scalar(0)) || !(b >= Scalar(0))) {
    throw std::invalid_argument("noise scales must be non-negative");
  }
  Vector<Scalar> out = g;
  if (sigma > Scalar(0)) {
    std::normal_distribution<Scalar> normal(Scalar(0), sigma);
    for (Eigen::Index i = 0; i < out.size(); ++i) out(i) += normal(rng);
  }
  if (b > Scalar(0)) {
    for (Eigen::Index i = 0; i < out.size(); ++i) out(i) += SampleLaplace(b, rng);
  }
  return out;
}

template <typename Derived>
Vector<typename Derived::Scalar> InjectMixed(const Eigen::MatrixBase<Derived>& g,
                                             typename Derived::Scalar sigma,
                                             typename Derived::Scalar b,
                                             std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return InjectMixed(g, sigma, b, rng);
}

// Additive composition of epsilon spent per epoch. Thread-safe.
class PrivacyBudgetLedger {
 public:
  // A non-positive cap disables the limit.
  explicit PrivacyBudgetLedger(double cap = 0.0) : cap_(cap) {}

  // Throws std::invalid_argument for non-positive epsilon and
  // std::runtime_error if the spend would exceed the cap.
  void Spend(int epoch, double epsilon);
  double Total() const;
  double EpochTotal(int epoch) const;

 private:
  mutable std::mutex mu_;
  double cap_;
  std::map<int, double> by_epoch_;
  double total_ = 0.0;
};

// One real per line; blank lines are skipped.
Eigen::VectorXd ParseVector(std::string_view text);

}  // namespace riskgate::dp

#endif  // RISKGATE_DP_MECHANISMS_H_
