#include "eegml0/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "eegml0/rng.hpp"

namespace eegml0 {

WeightVector fd_gradient(const std::function<double(std::span<const double>)>& f,
                         const WeightVector& w, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("fd_gradient: step must be positive");
  WeightVector probe = w;
  WeightVector g(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double orig = probe[i];
    probe[i] = orig + step;
    const double hi = f(probe);
    probe[i] = orig - step;
    const double lo = f(probe);
    probe[i] = orig;
    if (!std::isfinite(hi) || !std::isfinite(lo))
      throw std::domain_error("fd_gradient: non-finite loss at probe point");
    g[i] = (hi - lo) / (2.0 * step);
  }
  return g;
}

WeightVector fd_gradient(const LossKind& kind, const WeightVector& w, const Dataset& data,
                         double step) {
  return fd_gradient(
      [&](std::span<const double> probe) { return total_loss(kind, probe, data); }, w, step);
}

DescentReport check_descent(std::span<const double> losses, std::span<const double> grad_norms,
                            double beta, double tolerance) {
  if (losses.size() < 2 || grad_norms.size() + 1 < losses.size())
    throw std::invalid_argument("check_descent: malformed trace");
  DescentReport report;
  report.beta_used = beta;
  report.total_steps = static_cast<long>(losses.size()) - 1;
  for (std::size_t m = 0; m + 1 < losses.size(); ++m) {
    const double rhs = losses[m] - beta * grad_norms[m] * grad_norms[m];
    const double lhs = losses[m + 1];
    const double scaled = (lhs - rhs) / std::max(1.0, std::abs(losses[m]));
    report.max_violation_magnitude = std::max(report.max_violation_magnitude, scaled);
    if (scaled > tolerance)
      report.violating_steps.push_back({static_cast<long>(m), lhs, rhs});
  }
  return report;
}

std::vector<double> loss_sequence(const TrainTrace& trace) {
  std::vector<double> seq;
  seq.reserve(trace.records.size() + 1);
  for (const IterationRecord& r : trace.records) seq.push_back(r.loss);
  if (!trace.epochs.empty() && std::isfinite(trace.epochs.back().train_loss))
    seq.push_back(trace.epochs.back().train_loss);
  return seq;
}

DescentReport check_descent(const TrainTrace& trace, double beta, double tolerance) {
  std::vector<double> grads;
  grads.reserve(trace.records.size());
  for (const IterationRecord& r : trace.records) grads.push_back(r.grad_norm);
  return check_descent(loss_sequence(trace), grads, beta, tolerance);
}

long check_summability(std::span<const double> losses, std::span<const double> grad_norms,
                       double beta, double tolerance) {
  if (losses.size() < 2 || grad_norms.size() + 1 < losses.size())
    throw std::invalid_argument("check_summability: malformed trace");
  double partial = 0.0;
  for (std::size_t m = 0; m + 1 < losses.size(); ++m) {
    partial += grad_norms[m] * grad_norms[m];
    const double slack = beta * partial - (losses[0] - losses[m + 1]);
    if (slack > tolerance * std::max(1.0, std::abs(losses[0])))
      return static_cast<long>(m);
  }
  return -1;
}

long check_summability(const TrainTrace& trace, double beta, double tolerance) {
  std::vector<double> grads;
  grads.reserve(trace.records.size());
  for (const IterationRecord& r : trace.records) grads.push_back(r.grad_norm);
  return check_summability(loss_sequence(trace), grads, beta, tolerance);
}

double empirical_lipschitz(const LossKind& kind, const Dataset& data,
                           const EmpiricalLipschitzOptions& options) {
  if (options.trials < 1) throw std::invalid_argument("empirical_lipschitz: trials must be >= 1");
  kind.validate();
  const std::size_t p = data.dim();

  // Pairs are drawn up front so the estimate is independent of any
  // parallel evaluation order.
  Rng rng(options.seed);
  std::vector<double> pool(static_cast<std::size_t>(options.trials) * 2 * p);
  for (double& v : pool) v = rng.uniform(-options.box, options.box);

  double worst = 0.0;
#pragma omp parallel for schedule(static) reduction(max : worst)
  for (long t = 0; t < options.trials; ++t) {
    const double* w1 = pool.data() + static_cast<std::size_t>(t) * 2 * p;
    const double* w2 = w1 + p;
    double dist_sq = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
      const double d = w1[i] - w2[i];
      dist_sq += d * d;
    }
    if (dist_sq == 0.0) continue;  // degenerate pair
    const WeightVector g1 =
        total_loss_grad(kind, std::span<const double>(w1, p), data);
    const WeightVector g2 =
        total_loss_grad(kind, std::span<const double>(w2, p), data);
    double diff_sq = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
      const double d = g1[i] - g2[i];
      diff_sq += d * d;
    }
    const double ratio = std::sqrt(diff_sq / dist_sq);
    worst = std::max(worst, ratio);
  }
  return worst;
}

ConvergenceSummary convergence_summary(const TrainTrace& trace,
                                       std::span<const double> thresholds) {
  static constexpr double kDefaults[] = {1e-1, 1e-2, 1e-3, 1e-4, 1e-6};
  if (thresholds.empty()) thresholds = kDefaults;
  if (trace.records.empty()) throw std::invalid_argument("convergence_summary: empty trace");

  ConvergenceSummary s;
  s.final_grad_norm = trace.records.back().grad_norm;
  s.final_step_norm = trace.records.back().step_norm;

  const std::vector<double> seq = loss_sequence(trace);
  s.loss_monotone = true;
  for (std::size_t m = 0; m + 1 < seq.size(); ++m)
    if (seq[m + 1] > seq[m] + 1e-10 * std::max(1.0, std::abs(seq[m]))) {
      s.loss_monotone = false;
      break;
    }

  for (double th : thresholds) {
    long hit = -1;
    for (std::size_t m = 0; m < trace.records.size(); ++m)
      if (trace.records[m].grad_norm < th) {
        hit = static_cast<long>(m);
        break;
      }
    s.iterations_to_grad_below[th] = hit;
  }
  return s;
}

void write_report(const std::filesystem::path& path,
                  const std::vector<std::pair<std::string, std::string>>& fields) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write report " + path.string());
  for (const auto& [key, value] : fields) out << key << " = " << value << "\n";
}

}  // namespace eegml0
