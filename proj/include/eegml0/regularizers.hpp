#pragma once

#include <span>
#include <vector>

namespace eegml0 {

using WeightVector = std::vector<double>;

// The four smooth approximations of the l0 indicator. Each h_sigma is even,
// vanishes at 0, and tends to 1 for fixed t != 0 as sigma -> 0 (reg3 only in
// an oscillatory sense; its sinc tail decays like sigma/t).
//
//   reg1: 1 - exp(-t^2 / (2 sigma^2))
//   reg2: 1 - sigma^2 / (t^2 + sigma^2)
//   reg3: 1 - sin(t/sigma) / (t/sigma)
//   reg4: tanh(t^2 / (2 sigma))
enum class RegVariant { reg1, reg2, reg3, reg4 };

const char* to_string(RegVariant v);

struct RegularizerSpec {
  RegVariant variant = RegVariant::reg1;
  double sigma = 1.0;   // smoothing scale, > 0
  double lambda = 0.0;  // penalty weight, >= 0

  // Throws std::invalid_argument when sigma <= 0 or lambda < 0.
  void validate() const;
};

// Scalar penalty h_sigma(t) and its first two derivatives. Non-finite t is a
// domain error. reg3 switches to a truncated power series for |t/sigma| below
// 1e-4 so that h(0) = 0, h'(0) = 0 hold exactly.
double h_value(const RegularizerSpec& spec, double t);
double h_grad(const RegularizerSpec& spec, double t);
double h_second(const RegularizerSpec& spec, double t);

// Certified upper bound on sup_t |h_sigma''(t)|. Exact for reg1 (1/sigma^2)
// and reg2 (2/sigma^2); reg3 and reg4 use a dense-grid supremum of the
// dimensionless profile, computed once and rescaled. Over-approximation is
// well below the 5% contract.
double h_curvature_bound(const RegularizerSpec& spec);

// Vector penalty H_sigma(W) = sum_i h_sigma(w_i) and its gradient.
double penalty(const RegularizerSpec& spec, std::span<const double> w);
WeightVector penalty_grad(const RegularizerSpec& spec, std::span<const double> w);

// grad[i] += scale * h'(w[i]); the optimizer's fused accumulation path.
void add_penalty_grad(const RegularizerSpec& spec, std::span<const double> w,
                      double scale, std::span<double> grad);

}  // namespace eegml0
