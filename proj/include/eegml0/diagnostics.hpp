#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "eegml0/losses.hpp"
#include "eegml0/optimizer.hpp"

namespace eegml0 {

// Central finite differences of the total loss, coordinate by coordinate.
// The independent check for every analytic gradient in the library.
WeightVector fd_gradient(const LossKind& kind, const WeightVector& w, const Dataset& data,
                         double step = 1e-6);

// Same oracle over an arbitrary scalar function (used to validate the oracle
// itself against functions with known gradients).
WeightVector fd_gradient(const std::function<double(std::span<const double>)>& f,
                         const WeightVector& w, double step = 1e-6);

struct DescentViolation {
  long iteration;
  double lhs;  // L(W^{m+1})
  double rhs;  // L(W^m) - beta ||grad_m||^2
};

struct DescentReport {
  long total_steps = 0;
  std::vector<DescentViolation> violating_steps;
  double beta_used = 0.0;
  // max over m of (lhs - rhs) / max(1, |L(W^m)|); <= tolerance iff no violations.
  double max_violation_magnitude = 0.0;

  bool ok() const { return violating_steps.empty(); }
};

// Checks L(W^{m+1}) <= L(W^m) - beta ||grad_m||^2 step by step, flagging m
// whenever the slack exceeds tolerance * max(1, |L(W^m)|). `losses` must hold
// one more entry than `grad_norms` covers steps; with a TrainTrace the final
// epoch evaluation supplies the last loss.
DescentReport check_descent(std::span<const double> losses, std::span<const double> grad_norms,
                            double beta, double tolerance = 1e-10);
DescentReport check_descent(const TrainTrace& trace, double beta, double tolerance = 1e-10);

// Telescoped form of the descent chain: beta * sum_{i<=m} ||grad_i||^2 <=
// L(W^0) - L(W^{m+1}) + tolerance-scale, for every m. Returns the first
// failing m, or -1 when the inequality holds throughout.
long check_summability(std::span<const double> losses, std::span<const double> grad_norms,
                       double beta, double tolerance = 1e-10);
long check_summability(const TrainTrace& trace, double beta, double tolerance = 1e-10);

// Extracts the full loss sequence L(W^0..W^M) from a trace (records plus the
// final epoch evaluation).
std::vector<double> loss_sequence(const TrainTrace& trace);

struct EmpiricalLipschitzOptions {
  long trials = 10000;
  std::uint64_t seed = 0;
  double box = 5.0;  // pairs drawn uniformly from [-box, box]^p
};

// max over random weight pairs of ||grad(W1) - grad(W2)|| / ||W1 - W2||;
// bounded above by lipschitz_bound when the theory holds.
double empirical_lipschitz(const LossKind& kind, const Dataset& data,
                           const EmpiricalLipschitzOptions& options = {});

struct ConvergenceSummary {
  double final_grad_norm = 0.0;
  double final_step_norm = 0.0;
  bool loss_monotone = false;  // non-increasing within 1e-10 * max(1, |loss|)
  // threshold -> first iteration with ||grad|| below it (-1: never)
  std::map<double, long> iterations_to_grad_below;
};

ConvergenceSummary convergence_summary(
    const TrainTrace& trace,
    std::span<const double> thresholds = std::span<const double>());

// Key-value report text, written alongside trace files.
void write_report(const std::filesystem::path& path,
                  const std::vector<std::pair<std::string, std::string>>& fields);

}  // namespace eegml0
