#pragma once

#include <cstdint>
#include <span>

#include "eegml0/dataset.hpp"

namespace eegml0::kernels {

// Row-major view of a sample matrix plus labels; what the hot loops consume.
struct MatrixView {
  const double* x = nullptr;  // rows * cols, row-major
  const double* y = nullptr;  // rows labels
  std::size_t rows = 0;
  std::size_t cols = 0;
};

inline MatrixView view_of(const Dataset& d) {
  return {d.feature_data(), d.labels().data(), d.size(), d.dim()};
}

// Loss plus the number of thresholded predictions (>= 0.5) matching the
// label; `correct` is only meaningful when the labels are exactly 0/1.
struct BatchEval {
  double loss = 0.0;
  std::size_t correct = 0;
};

// Fixed block size of the deterministic reduction. Per-block partial sums are
// combined in block order, so results are identical bit-for-bit whether the
// blocks run serially or on an OpenMP team, and for any thread count.
inline constexpr std::size_t kBlockRows = 256;

// Minimum per-call work (rows * cols) before a kernel spreads blocks across
// threads; below it the fork-join overhead dominates.
inline constexpr std::size_t kParallelMinWork = 1u << 15;

// sum_j ||row_j||^2 (the data term of the gradient-Lipschitz bound).
double row_sqnorm_sum(MatrixView m);

// Entropy (cross-entropy over sigmoid outputs) kernels. `idx` selects a row
// subset (mini-batches); empty means all rows. Gradient output is
// sum_j (g(w.x_j) - y_j) x_j, overwriting `grad`. Loss clamps the sigmoid
// output to [1e-12, 1 - 1e-12] before the logs; the gradient uses the exact
// algebraic form, which needs no clamp.
BatchEval entropy_loss_grad(MatrixView m, std::span<const double> w,
                            std::span<double> grad,
                            std::span<const std::int32_t> idx = {});
BatchEval entropy_loss(MatrixView m, std::span<const double> w,
                       std::span<const std::int32_t> idx = {});

// Squared-error kernels: loss (1/2) sum_j (g(w.x_j) - y_j)^2, gradient
// sum_j (y_hat - y) y_hat (1 - y_hat) x_j.
BatchEval squared_loss_grad(MatrixView m, std::span<const double> w,
                            std::span<double> grad,
                            std::span<const std::int32_t> idx = {});
BatchEval squared_loss(MatrixView m, std::span<const double> w,
                       std::span<const std::int32_t> idx = {});

struct Confusion {
  long tp = 0, tn = 0, fp = 0, fn = 0;
};

// Thresholded confusion counts; prediction is positive when the sigmoid
// output is >= threshold (ties count as positive).
Confusion confusion_counts(MatrixView m, std::span<const double> w, double threshold);

}  // namespace eegml0::kernels

// Serial reference implementations: straight left-to-right loops, no
// blocking, no OpenMP. Kept as the comparison baseline for the parallel
// kernels in tests and in the kernel benchmark.
namespace eegml0::ref {

kernels::BatchEval entropy_loss_grad(kernels::MatrixView m, std::span<const double> w,
                                     std::span<double> grad);
kernels::BatchEval entropy_loss(kernels::MatrixView m, std::span<const double> w);
kernels::BatchEval squared_loss_grad(kernels::MatrixView m, std::span<const double> w,
                                     std::span<double> grad);
kernels::BatchEval squared_loss(kernels::MatrixView m, std::span<const double> w);
double row_sqnorm_sum(kernels::MatrixView m);
kernels::Confusion confusion_counts(kernels::MatrixView m, std::span<const double> w,
                                    double threshold);

}  // namespace eegml0::ref
