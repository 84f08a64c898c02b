#include "eegml0/losses.hpp"

#include <cmath>

#include "eegml0/kernels.hpp"

namespace eegml0 {

double predict(std::span<const double> w, std::span<const double> features) {
  if (w.size() != features.size())
    throw std::invalid_argument("predict: weight dimension " + std::to_string(w.size()) +
                                " vs feature dimension " + std::to_string(features.size()));
  double z = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) z += w[i] * features[i];
  return sigmoid(z);
}

void LossKind::validate() const {
  if (regularizer.has_value() && l2_lambda.has_value())
    throw std::invalid_argument("LossKind: smoothing l0 and L2 penalties are exclusive");
  if (regularizer.has_value()) regularizer->validate();
  if (l2_lambda.has_value() && (!(*l2_lambda >= 0.0) || !std::isfinite(*l2_lambda)))
    throw std::invalid_argument("LossKind: l2 coefficient must be nonnegative");
}

namespace {

void check_eval(const Dataset& data, std::span<const double> w) {
  if (data.empty()) throw std::invalid_argument("loss: empty dataset");
  if (w.size() != data.dim())
    throw std::invalid_argument("loss: weight dimension " + std::to_string(w.size()) +
                                " vs dataset dimension " + std::to_string(data.dim()));
}

}  // namespace

double entropy_error(std::span<const double> w, const Dataset& data) {
  check_eval(data, w);
  return kernels::entropy_loss(kernels::view_of(data), w).loss;
}

WeightVector entropy_error_grad(std::span<const double> w, const Dataset& data) {
  check_eval(data, w);
  WeightVector g(w.size());
  kernels::entropy_loss_grad(kernels::view_of(data), w, g);
  return g;
}

double squared_error(std::span<const double> w, const Dataset& data) {
  check_eval(data, w);
  return kernels::squared_loss(kernels::view_of(data), w).loss;
}

WeightVector squared_error_grad(std::span<const double> w, const Dataset& data) {
  check_eval(data, w);
  WeightVector g(w.size());
  kernels::squared_loss_grad(kernels::view_of(data), w, g);
  return g;
}

double total_loss(const LossKind& kind, std::span<const double> w, const Dataset& data) {
  kind.validate();
  double value =
      kind.base == BaseLoss::entropy ? entropy_error(w, data) : squared_error(w, data);
  if (kind.regularizer.has_value() && kind.regularizer->lambda != 0.0)
    value += kind.regularizer->lambda * penalty(*kind.regularizer, w);
  if (kind.l2_lambda.has_value() && *kind.l2_lambda != 0.0) {
    double sq = 0.0;
    for (double wi : w) sq += wi * wi;
    value += *kind.l2_lambda * sq;
  }
  return value;
}

WeightVector total_loss_grad(const LossKind& kind, std::span<const double> w,
                             const Dataset& data) {
  kind.validate();
  WeightVector g = kind.base == BaseLoss::entropy ? entropy_error_grad(w, data)
                                                  : squared_error_grad(w, data);
  if (kind.regularizer.has_value() && kind.regularizer->lambda != 0.0)
    add_penalty_grad(*kind.regularizer, w, kind.regularizer->lambda, g);
  if (kind.l2_lambda.has_value() && *kind.l2_lambda != 0.0)
    for (std::size_t i = 0; i < w.size(); ++i) g[i] += 2.0 * *kind.l2_lambda * w[i];
  return g;
}

}  // namespace eegml0
