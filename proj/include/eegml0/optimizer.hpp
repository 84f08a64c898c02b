#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "eegml0/dataset.hpp"
#include "eegml0/losses.hpp"

namespace eegml0 {

struct StepPolicy {
  enum class Kind { fixed, variable, manual };
  Kind kind = Kind::manual;
  double eta = 1e-3;        // fixed / manual
  double eta_min = 0.0;     // variable
  double eta_max = 0.0;     // variable
  std::uint64_t schedule_seed = 0;

  // Fixed rate, eligible for certified runs (eta < 2/L is then enforced).
  static StepPolicy fixed(double eta);
  // Per-step eta drawn uniformly from [lo, hi], deterministic in the seed.
  static StepPolicy variable(double lo, double hi, std::uint64_t seed);
  // User-chosen rate with no certification claim.
  static StepPolicy manual(double eta);

  void validate() const;
};

struct BatchPolicy {
  enum class Mode { full_batch, mini_batch, single_sample };
  Mode mode = Mode::full_batch;
  std::size_t size = 0;  // mini_batch only
  bool shuffle = true;   // reshuffle sample order each epoch (mini-batch modes)

  static BatchPolicy full() { return {}; }
  static BatchPolicy mini(std::size_t size, bool shuffle = true) {
    return {Mode::mini_batch, size, shuffle};
  }
  static BatchPolicy single() { return {Mode::single_sample, 1, true}; }
};

struct TrainConfig {
  StepPolicy policy;
  long epochs = 1;
  BatchPolicy batch;
  std::uint64_t seed = 0;
  double init_scale = 0.5;
  LossKind loss;
  bool certified = false;  // enforce the step bound and record beta
  long eval_every = 1;     // validation metrics cadence (final epoch always)

  void validate(std::size_t dataset_size) const;
};

struct IterationRecord {
  double loss = 0.0;       // objective at the pre-update iterate (batch scope)
  double grad_norm = 0.0;  // ||gradient|| driving the update
  double step_norm = 0.0;  // ||W_next - W|| actually realized
  long epoch = 0;
};

struct EpochMetrics {
  double train_loss = std::numeric_limits<double>::quiet_NaN();
  double train_accuracy = std::numeric_limits<double>::quiet_NaN();
  double val_loss = std::numeric_limits<double>::quiet_NaN();
  double val_accuracy = std::numeric_limits<double>::quiet_NaN();
};

struct TrainTrace {
  std::vector<IterationRecord> records;  // one per update step
  std::vector<EpochMetrics> epochs;      // one per epoch, at post-epoch weights
  WeightVector final_weights;
  // Run metadata; NaN when not applicable.
  double eta = std::numeric_limits<double>::quiet_NaN();
  double eta_min = std::numeric_limits<double>::quiet_NaN();
  double eta_max = std::numeric_limits<double>::quiet_NaN();
  double beta = std::numeric_limits<double>::quiet_NaN();
  double lipschitz = std::numeric_limits<double>::quiet_NaN();
};

// Training aborted on a non-finite objective; carries the offending step.
struct DivergenceError : std::runtime_error {
  DivergenceError(long iteration, const std::string& what)
      : std::runtime_error(what), iteration(iteration) {}
  long iteration;
};

// Seeded uniform init on [-init_scale, init_scale]; scale 0 gives the zero
// vector.
WeightVector init_weights(std::size_t p, std::uint64_t seed, double init_scale);

// Gradient-Lipschitz bound (1/4) sum_j ||x_j||^2 + lambda sup|h_sigma''|.
double lipschitz_bound(const Dataset& data,
                       const std::optional<RegularizerSpec>& spec = std::nullopt);
// Same bound extended to a full objective; entropy base only (the l2 penalty
// contributes 2 lambda).
double lipschitz_bound(const LossKind& kind, const Dataset& data);

struct SafeStep {
  double eta;   // fraction * (2/L)
  double beta;  // eta * (1 - L eta / 2), positive inside (0, 2/L)
};
SafeStep safe_step(double lipschitz, double fraction);

// Full-batch iteration W <- W - eta * grad. Certified mode requires a fixed
// policy with eta < 2/L and guarantees the per-step descent inequality.
TrainTrace train_batch(const TrainConfig& config, const Dataset& train,
                       const Dataset* validation = nullptr);

// Variable-step variant: eta_m drawn per step from [eta_min, eta_max];
// certified mode requires eta_max < 2/L and yields beta* = eta_min (1 - L eta_max / 2).
TrainTrace train_variable(const TrainConfig& config, const Dataset& train,
                          const Dataset* validation = nullptr);

// Mini-batch / single-sample descent with a seeded reshuffle per epoch.
// Per-epoch metrics are always evaluated on the full training set.
TrainTrace train_sgd(const TrainConfig& config, const Dataset& train,
                     const Dataset* validation = nullptr);

// Dispatch on config.batch / config.policy; the single engine behind the
// three entry points above.
TrainTrace train(const TrainConfig& config, const Dataset& train,
                 const Dataset* validation = nullptr);

}  // namespace eegml0
