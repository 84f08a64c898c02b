#include "eegml0/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "eegml0/losses.hpp"

namespace eegml0::kernels {

namespace {

constexpr double kClamp = 1e-12;

inline double entropy_term(double yhat, double label) {
  const double yc = std::min(std::max(yhat, kClamp), 1.0 - kClamp);
  if (label == 1.0) return -std::log(yc);
  if (label == 0.0) return -std::log(1.0 - yc);
  return -(label * std::log(yc) + (1.0 - label) * std::log(1.0 - yc));
}

inline double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
#pragma omp simd reduction(+ : s)
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

inline void axpy(double alpha, const double* x, double* out, std::size_t n) {
#pragma omp simd
  for (std::size_t i = 0; i < n; ++i) out[i] += alpha * x[i];
}

// One block of rows. kEntropy selects the loss; kGrad accumulates the
// gradient into gacc (not cleared here); kUseIdx reads rows through idx.
template <bool kEntropy, bool kGrad, bool kUseIdx>
BatchEval run_rows(MatrixView m, const double* w, const std::int32_t* idx,
                   std::size_t begin, std::size_t end, double* gacc) {
  BatchEval acc;
  for (std::size_t i = begin; i < end; ++i) {
    const std::size_t r = kUseIdx ? static_cast<std::size_t>(idx[i]) : i;
    const double* row = m.x + r * m.cols;
    const double label = m.y[r];
    const double yhat = sigmoid(dot(w, row, m.cols));
    if constexpr (kEntropy) {
      acc.loss += entropy_term(yhat, label);
      if constexpr (kGrad) axpy(yhat - label, row, gacc, m.cols);
    } else {
      const double r0 = yhat - label;
      acc.loss += 0.5 * r0 * r0;
      if constexpr (kGrad) axpy(r0 * yhat * (1.0 - yhat), row, gacc, m.cols);
    }
    acc.correct += ((yhat >= 0.5 ? 1.0 : 0.0) == label) ? 1u : 0u;
  }
  return acc;
}

template <bool kEntropy, bool kGrad, bool kUseIdx>
BatchEval run_blocked(MatrixView m, std::span<const double> w, std::span<double> grad,
                      std::span<const std::int32_t> idx) {
  if (w.size() != m.cols) throw std::invalid_argument("kernel: weight/feature dimension mismatch");
  if (kGrad && grad.size() != m.cols)
    throw std::invalid_argument("kernel: gradient buffer dimension mismatch");

  const std::size_t n = kUseIdx ? idx.size() : m.rows;
  if constexpr (kGrad) std::fill(grad.begin(), grad.end(), 0.0);
  if (n == 0) return {};

  const std::int32_t* ip = idx.data();
  double* gp = grad.data();

  const std::size_t nblocks = (n + kBlockRows - 1) / kBlockRows;
  if (nblocks == 1)
    return run_rows<kEntropy, kGrad, kUseIdx>(m, w.data(), ip, 0, n, gp);

  // Per-block partials, folded in block order afterwards: the result does not
  // depend on how many threads computed the blocks. The scratch vectors are
  // thread_local so concurrent callers (parallel trials) each reuse their
  // own; inside the block loop only the captured raw pointers are touched.
  static thread_local std::vector<BatchEval> partials;
  static thread_local std::vector<double> gscratch;
  partials.assign(nblocks, BatchEval{});
  if constexpr (kGrad) gscratch.assign(nblocks * m.cols, 0.0);
  BatchEval* const pp = partials.data();
  double* const gs = kGrad ? gscratch.data() : nullptr;

  bool parallel = n * m.cols >= kParallelMinWork;
#ifdef _OPENMP
  if (omp_in_parallel()) parallel = false;
#endif

  if (parallel) {
#pragma omp parallel for schedule(static)
    for (std::size_t b = 0; b < nblocks; ++b) {
      const std::size_t lo = b * kBlockRows;
      const std::size_t hi = std::min(lo + kBlockRows, n);
      pp[b] = run_rows<kEntropy, kGrad, kUseIdx>(m, w.data(), ip, lo, hi,
                                                 kGrad ? gs + b * m.cols : nullptr);
    }
  } else {
    for (std::size_t b = 0; b < nblocks; ++b) {
      const std::size_t lo = b * kBlockRows;
      const std::size_t hi = std::min(lo + kBlockRows, n);
      pp[b] = run_rows<kEntropy, kGrad, kUseIdx>(m, w.data(), ip, lo, hi,
                                                 kGrad ? gs + b * m.cols : nullptr);
    }
  }

  BatchEval total;
  for (std::size_t b = 0; b < nblocks; ++b) {
    total.loss += pp[b].loss;
    total.correct += pp[b].correct;
    if constexpr (kGrad) axpy(1.0, gs + b * m.cols, gp, m.cols);
  }
  return total;
}

template <bool kEntropy, bool kGrad>
BatchEval dispatch(MatrixView m, std::span<const double> w, std::span<double> grad,
                   std::span<const std::int32_t> idx) {
  if (idx.empty()) return run_blocked<kEntropy, kGrad, false>(m, w, grad, idx);
  return run_blocked<kEntropy, kGrad, true>(m, w, grad, idx);
}

}  // namespace

double row_sqnorm_sum(MatrixView m) {
  const std::size_t n = m.rows;
  const std::size_t nblocks = (n + kBlockRows - 1) / kBlockRows;
  std::vector<double> partials(nblocks, 0.0);

  bool parallel = n * m.cols >= kParallelMinWork && nblocks > 1;
#ifdef _OPENMP
  if (omp_in_parallel()) parallel = false;
#endif

#pragma omp parallel for schedule(static) if (parallel)
  for (std::size_t b = 0; b < nblocks; ++b) {
    const std::size_t lo = b * kBlockRows;
    const std::size_t hi = std::min(lo + kBlockRows, n);
    double s = 0.0;
    for (std::size_t j = lo; j < hi; ++j) {
      const double* row = m.x + j * m.cols;
      s += dot(row, row, m.cols);
    }
    partials[b] = s;
  }

  double total = 0.0;
  for (double v : partials) total += v;
  return total;
}

BatchEval entropy_loss_grad(MatrixView m, std::span<const double> w, std::span<double> grad,
                            std::span<const std::int32_t> idx) {
  return dispatch<true, true>(m, w, grad, idx);
}

BatchEval entropy_loss(MatrixView m, std::span<const double> w,
                       std::span<const std::int32_t> idx) {
  return dispatch<true, false>(m, w, {}, idx);
}

BatchEval squared_loss_grad(MatrixView m, std::span<const double> w, std::span<double> grad,
                            std::span<const std::int32_t> idx) {
  return dispatch<false, true>(m, w, grad, idx);
}

BatchEval squared_loss(MatrixView m, std::span<const double> w,
                       std::span<const std::int32_t> idx) {
  return dispatch<false, false>(m, w, {}, idx);
}

Confusion confusion_counts(MatrixView m, std::span<const double> w, double threshold) {
  if (w.size() != m.cols) throw std::invalid_argument("kernel: weight/feature dimension mismatch");
  Confusion c;
  long tp = 0, tn = 0, fp = 0, fn = 0;

  bool parallel = m.rows * m.cols >= kParallelMinWork;
#ifdef _OPENMP
  if (omp_in_parallel()) parallel = false;
#endif

#pragma omp parallel for schedule(static) reduction(+ : tp, tn, fp, fn) if (parallel)
  for (std::size_t j = 0; j < m.rows; ++j) {
    const bool pred = sigmoid(dot(w.data(), m.x + j * m.cols, m.cols)) >= threshold;
    const bool truth = m.y[j] == 1.0;
    tp += pred && truth;
    tn += !pred && !truth;
    fp += pred && !truth;
    fn += !pred && truth;
  }
  c.tp = tp;
  c.tn = tn;
  c.fp = fp;
  c.fn = fn;
  return c;
}

}  // namespace eegml0::kernels

namespace eegml0::ref {

using kernels::BatchEval;
using kernels::Confusion;
using kernels::MatrixView;

namespace {

inline double plain_dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

inline double plain_entropy_term(double yhat, double label) {
  const double yc = std::min(std::max(yhat, 1e-12), 1.0 - 1e-12);
  return -(label * std::log(yc) + (1.0 - label) * std::log(1.0 - yc));
}

}  // namespace

BatchEval entropy_loss_grad(MatrixView m, std::span<const double> w, std::span<double> grad) {
  std::fill(grad.begin(), grad.end(), 0.0);
  BatchEval acc;
  for (std::size_t j = 0; j < m.rows; ++j) {
    const double* row = m.x + j * m.cols;
    const double yhat = sigmoid(plain_dot(w.data(), row, m.cols));
    acc.loss += plain_entropy_term(yhat, m.y[j]);
    for (std::size_t i = 0; i < m.cols; ++i) grad[i] += (yhat - m.y[j]) * row[i];
    acc.correct += ((yhat >= 0.5 ? 1.0 : 0.0) == m.y[j]) ? 1u : 0u;
  }
  return acc;
}

BatchEval entropy_loss(MatrixView m, std::span<const double> w) {
  BatchEval acc;
  for (std::size_t j = 0; j < m.rows; ++j) {
    const double yhat = sigmoid(plain_dot(w.data(), m.x + j * m.cols, m.cols));
    acc.loss += plain_entropy_term(yhat, m.y[j]);
    acc.correct += ((yhat >= 0.5 ? 1.0 : 0.0) == m.y[j]) ? 1u : 0u;
  }
  return acc;
}

BatchEval squared_loss_grad(MatrixView m, std::span<const double> w, std::span<double> grad) {
  std::fill(grad.begin(), grad.end(), 0.0);
  BatchEval acc;
  for (std::size_t j = 0; j < m.rows; ++j) {
    const double* row = m.x + j * m.cols;
    const double yhat = sigmoid(plain_dot(w.data(), row, m.cols));
    const double r = yhat - m.y[j];
    acc.loss += 0.5 * r * r;
    for (std::size_t i = 0; i < m.cols; ++i) grad[i] += r * yhat * (1.0 - yhat) * row[i];
    acc.correct += ((yhat >= 0.5 ? 1.0 : 0.0) == m.y[j]) ? 1u : 0u;
  }
  return acc;
}

BatchEval squared_loss(MatrixView m, std::span<const double> w) {
  BatchEval acc;
  for (std::size_t j = 0; j < m.rows; ++j) {
    const double yhat = sigmoid(plain_dot(w.data(), m.x + j * m.cols, m.cols));
    const double r = yhat - m.y[j];
    acc.loss += 0.5 * r * r;
    acc.correct += ((yhat >= 0.5 ? 1.0 : 0.0) == m.y[j]) ? 1u : 0u;
  }
  return acc;
}

double row_sqnorm_sum(MatrixView m) {
  double s = 0.0;
  for (std::size_t j = 0; j < m.rows; ++j) {
    const double* row = m.x + j * m.cols;
    s += plain_dot(row, row, m.cols);
  }
  return s;
}

Confusion confusion_counts(MatrixView m, std::span<const double> w, double threshold) {
  Confusion c;
  for (std::size_t j = 0; j < m.rows; ++j) {
    const bool pred = sigmoid(plain_dot(w.data(), m.x + j * m.cols, m.cols)) >= threshold;
    const bool truth = m.y[j] == 1.0;
    c.tp += pred && truth;
    c.tn += !pred && !truth;
    c.fp += pred && !truth;
    c.fn += !pred && truth;
  }
  return c;
}

}  // namespace eegml0::ref
