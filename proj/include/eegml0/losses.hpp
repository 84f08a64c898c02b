#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>

#include "eegml0/dataset.hpp"
#include "eegml0/regularizers.hpp"

namespace eegml0 {

// 1 / (1 + e^-x), evaluated on the non-overflowing branch so |x| up to ~700
// is safe and g(-x) = 1 - g(x) holds to machine precision.
inline double sigmoid(double x) {
  if (!std::isfinite(x)) throw std::domain_error("sigmoid: non-finite input");
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// g(w . features); the network output for one sample.
double predict(std::span<const double> w, std::span<const double> features);
inline double predict(const WeightVector& w, const Sample& s) {
  return predict(std::span<const double>(w), std::span<const double>(s.features));
}

enum class BaseLoss { entropy, squared_error };

// A training objective: base loss, optionally one of the smoothing l0
// penalties or an L2 penalty (never both).
struct LossKind {
  BaseLoss base = BaseLoss::entropy;
  std::optional<RegularizerSpec> regularizer;
  std::optional<double> l2_lambda;

  void validate() const;

  static LossKind plain_entropy() { return {}; }
  static LossKind entropy_smoothed_l0(RegularizerSpec spec) {
    return {BaseLoss::entropy, spec, std::nullopt};
  }
  static LossKind plain_squared() { return {BaseLoss::squared_error, std::nullopt, std::nullopt}; }
  static LossKind squared_l2(double lambda) {
    return {BaseLoss::squared_error, std::nullopt, lambda};
  }
};

// Entropy error -sum_j [y_j ln yhat_j + (1 - y_j) ln(1 - yhat_j)] with the
// sigmoid output clamped to [1e-12, 1 - 1e-12] inside the logs. The gradient
// sum_j (yhat_j - y_j) x_j uses the exact algebraic form (finite without
// clamping).
double entropy_error(std::span<const double> w, const Dataset& data);
WeightVector entropy_error_grad(std::span<const double> w, const Dataset& data);

// Squared-error baseline: (1/2) sum_j (yhat_j - y_j)^2 on sigmoid outputs.
double squared_error(std::span<const double> w, const Dataset& data);
WeightVector squared_error_grad(std::span<const double> w, const Dataset& data);

// Base loss plus lambda * H_sigma(W), or plus l2_lambda * ||W||^2 (gradient
// 2 l2_lambda W), or plain. A zero penalty weight short-circuits to the plain
// path, so a lambda = 0 run is bit-identical to the unregularized one.
double total_loss(const LossKind& kind, std::span<const double> w, const Dataset& data);
WeightVector total_loss_grad(const LossKind& kind, std::span<const double> w,
                             const Dataset& data);

}  // namespace eegml0
