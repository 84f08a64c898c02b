#include "eegml0/optimizer.hpp"

#include <algorithm>
#include <cmath>

#include "eegml0/kernels.hpp"
#include "eegml0/rng.hpp"

namespace eegml0 {

StepPolicy StepPolicy::fixed(double eta) {
  StepPolicy p;
  p.kind = Kind::fixed;
  p.eta = eta;
  p.validate();
  return p;
}

StepPolicy StepPolicy::variable(double lo, double hi, std::uint64_t seed) {
  StepPolicy p;
  p.kind = Kind::variable;
  p.eta_min = lo;
  p.eta_max = hi;
  p.schedule_seed = seed;
  p.validate();
  return p;
}

StepPolicy StepPolicy::manual(double eta) {
  StepPolicy p;
  p.kind = Kind::manual;
  p.eta = eta;
  p.validate();
  return p;
}

void StepPolicy::validate() const {
  if (kind == Kind::variable) {
    if (!(eta_min > 0.0) || !(eta_max >= eta_min) || !std::isfinite(eta_max))
      throw std::invalid_argument("StepPolicy: need 0 < eta_min <= eta_max");
  } else if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw std::invalid_argument("StepPolicy: learning rate must be positive");
  }
}

void TrainConfig::validate(std::size_t dataset_size) const {
  policy.validate();
  loss.validate();
  if (epochs < 1) throw std::invalid_argument("TrainConfig: epochs must be >= 1");
  if (!(init_scale >= 0.0)) throw std::invalid_argument("TrainConfig: init_scale must be >= 0");
  if (eval_every < 1) throw std::invalid_argument("TrainConfig: eval_every must be >= 1");
  if (batch.mode == BatchPolicy::Mode::mini_batch &&
      (batch.size < 1 || batch.size > dataset_size))
    throw std::invalid_argument("TrainConfig: mini-batch size must be in [1, dataset size]");
}

WeightVector init_weights(std::size_t p, std::uint64_t seed, double init_scale) {
  if (p < 1) throw std::invalid_argument("init_weights: dimension must be >= 1");
  if (!(init_scale >= 0.0)) throw std::invalid_argument("init_weights: negative scale");
  WeightVector w(p, 0.0);
  if (init_scale == 0.0) return w;
  Rng rng(seed);
  for (double& wi : w) wi = rng.uniform(-init_scale, init_scale);
  return w;
}

double lipschitz_bound(const Dataset& data, const std::optional<RegularizerSpec>& spec) {
  if (data.empty()) throw std::invalid_argument("lipschitz_bound: empty dataset");
  double bound = 0.25 * kernels::row_sqnorm_sum(kernels::view_of(data));
  if (spec.has_value() && spec->lambda != 0.0)
    bound += spec->lambda * h_curvature_bound(*spec);
  return bound;
}

double lipschitz_bound(const LossKind& kind, const Dataset& data) {
  kind.validate();
  if (kind.base != BaseLoss::entropy)
    throw std::invalid_argument(
        "lipschitz_bound: step certificates are derived for the entropy objective");
  double bound = lipschitz_bound(data, kind.regularizer);
  if (kind.l2_lambda.has_value()) bound += 2.0 * *kind.l2_lambda;
  return bound;
}

SafeStep safe_step(double lipschitz, double fraction) {
  if (!(lipschitz > 0.0) || !std::isfinite(lipschitz))
    throw std::invalid_argument("safe_step: L must be positive");
  if (!(fraction > 0.0 && fraction < 1.0))
    throw std::invalid_argument("safe_step: fraction must be in (0, 1)");
  const double eta = fraction * 2.0 / lipschitz;
  return {eta, eta * (1.0 - lipschitz * eta / 2.0)};
}

namespace {

double penalty_value(const LossKind& kind, std::span<const double> w) {
  if (kind.regularizer.has_value() && kind.regularizer->lambda != 0.0)
    return kind.regularizer->lambda * penalty(*kind.regularizer, w);
  if (kind.l2_lambda.has_value() && *kind.l2_lambda != 0.0) {
    double sq = 0.0;
    for (double wi : w) sq += wi * wi;
    return *kind.l2_lambda * sq;
  }
  return 0.0;
}

void add_penalty_gradient(const LossKind& kind, std::span<const double> w,
                          std::span<double> grad) {
  if (kind.regularizer.has_value() && kind.regularizer->lambda != 0.0)
    add_penalty_grad(*kind.regularizer, w, kind.regularizer->lambda, grad);
  if (kind.l2_lambda.has_value() && *kind.l2_lambda != 0.0)
    for (std::size_t i = 0; i < w.size(); ++i) grad[i] += 2.0 * *kind.l2_lambda * w[i];
}

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

kernels::BatchEval base_loss_grad(const LossKind& kind, kernels::MatrixView m,
                                  std::span<const double> w, std::span<double> grad,
                                  std::span<const std::int32_t> idx = {}) {
  return kind.base == BaseLoss::entropy ? kernels::entropy_loss_grad(m, w, grad, idx)
                                        : kernels::squared_loss_grad(m, w, grad, idx);
}

kernels::BatchEval base_loss(const LossKind& kind, kernels::MatrixView m,
                             std::span<const double> w) {
  return kind.base == BaseLoss::entropy ? kernels::entropy_loss(m, w)
                                        : kernels::squared_loss(m, w);
}

struct Engine {
  const TrainConfig& config;
  const Dataset& train_set;
  const Dataset* val_set;
  kernels::MatrixView train_view;
  bool train_binary;
  bool val_binary;
  TrainTrace trace;

  Engine(const TrainConfig& cfg, const Dataset& tr, const Dataset* va)
      : config(cfg), train_set(tr), val_set(va) {
    cfg.validate(tr.size());
    if (tr.empty()) throw std::invalid_argument("train: empty dataset");
    if (va != nullptr && va->dim() != tr.dim())
      throw std::invalid_argument("train: validation dimension mismatch");
    train_view = kernels::view_of(tr);
    train_binary = tr.labels_binary();
    val_binary = va != nullptr && va->labels_binary();
  }

  void prepare_step_bounds() {
    const StepPolicy& p = config.policy;
    if (p.kind == StepPolicy::Kind::fixed || p.kind == StepPolicy::Kind::manual) {
      trace.eta = p.eta;
    } else {
      trace.eta_min = p.eta_min;
      trace.eta_max = p.eta_max;
    }
    if (!config.certified) return;

    const double L = lipschitz_bound(config.loss, train_set);
    trace.lipschitz = L;
    switch (p.kind) {
      case StepPolicy::Kind::fixed:
        if (!(p.eta < 2.0 / L))
          throw std::invalid_argument("certified run needs eta < 2/L = " +
                                      std::to_string(2.0 / L));
        trace.beta = p.eta * (1.0 - L * p.eta / 2.0);
        break;
      case StepPolicy::Kind::variable:
        if (!(p.eta_max < 2.0 / L))
          throw std::invalid_argument("certified run needs eta_max < 2/L = " +
                                      std::to_string(2.0 / L));
        trace.beta = p.eta_min * (1.0 - L * p.eta_max / 2.0);
        break;
      case StepPolicy::Kind::manual:
        throw std::invalid_argument("certified mode requires a fixed or variable step policy");
    }
  }

  // Full objective and accuracy on the training set at the given weights.
  EpochMetrics epoch_eval(std::span<const double> w, bool want_val) {
    EpochMetrics m;
    const auto be = base_loss(config.loss, train_view, w);
    m.train_loss = be.loss + penalty_value(config.loss, w);
    if (train_binary)
      m.train_accuracy = static_cast<double>(be.correct) / static_cast<double>(train_set.size());
    if (want_val && val_set != nullptr && !val_set->empty()) {
      const auto ve = base_loss(config.loss, kernels::view_of(*val_set), w);
      m.val_loss = ve.loss;  // data term only; the penalty depends on W alone
      if (val_binary)
        m.val_accuracy = static_cast<double>(ve.correct) / static_cast<double>(val_set->size());
    }
    return m;
  }

  bool val_due(long epoch) const {
    return (epoch + 1) % config.eval_every == 0 || epoch == config.epochs - 1;
  }

  double draw_eta(Rng& schedule) const {
    const StepPolicy& p = config.policy;
    if (p.kind == StepPolicy::Kind::variable) return schedule.uniform(p.eta_min, p.eta_max);
    return p.eta;
  }

  // W <- W - eta * grad; returns the realized ||delta W||.
  static double apply_step(WeightVector& w, std::span<const double> grad, double eta) {
    double step_sq = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double next = w[i] - eta * grad[i];
      const double d = next - w[i];
      step_sq += d * d;
      w[i] = next;
    }
    return std::sqrt(step_sq);
  }

  TrainTrace run_full_batch() {
    WeightVector w = init_weights(train_set.dim(), config.seed, config.init_scale);
    WeightVector grad(w.size());
    Rng schedule(config.policy.schedule_seed);

    trace.records.reserve(static_cast<std::size_t>(config.epochs));
    trace.epochs.resize(static_cast<std::size_t>(config.epochs));

    for (long m = 0; m < config.epochs; ++m) {
      double loss = 0.0, gnorm = 0.0;
      kernels::BatchEval be;
      try {
        be = base_loss_grad(config.loss, train_view, w, grad);
        loss = be.loss + penalty_value(config.loss, w);
        add_penalty_gradient(config.loss, w, grad);
        gnorm = norm2(grad);
      } catch (const std::domain_error&) {
        throw DivergenceError(m, "non-finite iterate at iteration " + std::to_string(m));
      }
      if (!std::isfinite(loss) || !std::isfinite(gnorm))
        throw DivergenceError(m, "non-finite objective at iteration " + std::to_string(m));

      if (m > 0) {
        // The fused pass just evaluated the post-update weights of epoch m-1.
        EpochMetrics& em = trace.epochs[static_cast<std::size_t>(m - 1)];
        em.train_loss = loss;
        if (train_binary)
          em.train_accuracy =
              static_cast<double>(be.correct) / static_cast<double>(train_set.size());
        if (val_due(m - 1) && val_set != nullptr && !val_set->empty()) {
          const auto ve = base_loss(config.loss, kernels::view_of(*val_set), w);
          em.val_loss = ve.loss;
          if (val_binary)
            em.val_accuracy =
                static_cast<double>(ve.correct) / static_cast<double>(val_set->size());
        }
      }

      const double eta = draw_eta(schedule);
      const double step = apply_step(w, grad, eta);
      trace.records.push_back({loss, gnorm, step, m});
    }

    try {
      trace.epochs.back() = epoch_eval(w, true);
    } catch (const std::domain_error&) {
      throw DivergenceError(config.epochs, "non-finite iterate after final iteration");
    }
    if (!std::isfinite(trace.epochs.back().train_loss))
      throw DivergenceError(config.epochs, "non-finite objective after final iteration");
    trace.final_weights = std::move(w);
    return std::move(trace);
  }

  TrainTrace run_sgd() {
    const std::size_t batch_size =
        config.batch.mode == BatchPolicy::Mode::single_sample ? 1 : config.batch.size;
    const std::size_t n = train_set.size();
    std::vector<std::int32_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<std::int32_t>(i);

    WeightVector w = init_weights(train_set.dim(), config.seed, config.init_scale);
    WeightVector grad(w.size());
    Rng schedule(config.policy.schedule_seed);
    Rng shuffler(mix_seed(config.seed, 1));

    const std::size_t batches = (n + batch_size - 1) / batch_size;
    trace.records.reserve(static_cast<std::size_t>(config.epochs) * batches);
    trace.epochs.resize(static_cast<std::size_t>(config.epochs));

    long iteration = 0;
    for (long e = 0; e < config.epochs; ++e) {
      if (config.batch.shuffle) shuffler.shuffle(order);
      for (std::size_t pos = 0; pos < n; pos += batch_size) {
        const std::size_t count = std::min(batch_size, n - pos);
        const std::span<const std::int32_t> idx(order.data() + pos, count);
        double loss = 0.0, gnorm = 0.0;
        try {
          const auto be = base_loss_grad(config.loss, train_view, w, grad, idx);
          loss = be.loss + penalty_value(config.loss, w);
          add_penalty_gradient(config.loss, w, grad);
          gnorm = norm2(grad);
        } catch (const std::domain_error&) {
          throw DivergenceError(iteration,
                                "non-finite iterate at iteration " + std::to_string(iteration));
        }
        if (!std::isfinite(loss) || !std::isfinite(gnorm))
          throw DivergenceError(iteration,
                                "non-finite objective at iteration " + std::to_string(iteration));
        const double eta = draw_eta(schedule);
        const double step = apply_step(w, grad, eta);
        trace.records.push_back({loss, gnorm, step, e});
        ++iteration;
      }
      try {
        trace.epochs[static_cast<std::size_t>(e)] = epoch_eval(w, val_due(e));
      } catch (const std::domain_error&) {
        throw DivergenceError(iteration, "non-finite iterate after epoch " + std::to_string(e));
      }
      if (!std::isfinite(trace.epochs[static_cast<std::size_t>(e)].train_loss))
        throw DivergenceError(iteration, "non-finite objective after epoch " + std::to_string(e));
    }

    trace.final_weights = std::move(w);
    return std::move(trace);
  }
};

}  // namespace

TrainTrace train(const TrainConfig& config, const Dataset& train_set, const Dataset* validation) {
  Engine engine(config, train_set, validation);
  engine.prepare_step_bounds();
  if (config.batch.mode == BatchPolicy::Mode::full_batch) return engine.run_full_batch();
  return engine.run_sgd();
}

TrainTrace train_batch(const TrainConfig& config, const Dataset& train_set,
                       const Dataset* validation) {
  if (config.batch.mode != BatchPolicy::Mode::full_batch)
    throw std::invalid_argument("train_batch: config.batch must be full_batch");
  return train(config, train_set, validation);
}

TrainTrace train_variable(const TrainConfig& config, const Dataset& train_set,
                          const Dataset* validation) {
  if (config.policy.kind != StepPolicy::Kind::variable)
    throw std::invalid_argument("train_variable: config.policy must be variable");
  return train(config, train_set, validation);
}

TrainTrace train_sgd(const TrainConfig& config, const Dataset& train_set,
                     const Dataset* validation) {
  if (config.batch.mode == BatchPolicy::Mode::full_batch)
    throw std::invalid_argument("train_sgd: config.batch must be mini_batch or single_sample");
  return train(config, train_set, validation);
}

}  // namespace eegml0
