#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "eegml0/diagnostics.hpp"
#include "eegml0/rng.hpp"
#include "eegml0/synth.hpp"
#include "eegml0/trace_io.hpp"

using namespace eegml0;

TEST_CASE("fd oracle is exact on linear and quadratic functions") {
  const WeightVector c{1.5, -2.0, 0.25};
  auto linear = [&](std::span<const double> w) {
    double s = 7.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += c[i] * w[i];
    return s;
  };
  // central differences are algebraically exact on affine and quadratic
  // functions; a power-of-two step keeps the probe arithmetic exact too
  const double step = 0.03125;
  const WeightVector at{0.3, 0.4, -1.0};
  const WeightVector g = fd_gradient(linear, at, step);
  for (std::size_t i = 0; i < c.size(); ++i) CHECK(std::abs(g[i] - c[i]) <= 1e-10);

  auto quadratic = [](std::span<const double> w) {
    double s = 0.0;
    for (double v : w) s += v * v;
    return s;
  };
  const WeightVector gq = fd_gradient(quadratic, at, step);
  for (std::size_t i = 0; i < at.size(); ++i) CHECK(std::abs(gq[i] - 2.0 * at[i]) <= 1e-10);

  auto constant = [](std::span<const double>) { return 3.25; };
  for (double v : fd_gradient(constant, at)) CHECK(v == 0.0);

  CHECK_THROWS_AS(fd_gradient(linear, at, 0.0), std::invalid_argument);
}

TEST_CASE("fd oracle agrees with the analytic entropy gradient") {
  Rng rng(61);
  Dataset d("fd", 4);
  std::vector<double> x(4);
  for (int j = 0; j < 8; ++j) {
    for (double& v : x) v = rng.uniform(-2.0, 2.0);
    d.add(x, rng.uniform() < 0.5 ? 0.0 : 1.0);
  }
  WeightVector w(4);
  for (double& v : w) v = rng.uniform(-1.0, 1.0);
  const WeightVector analytic = total_loss_grad(LossKind::plain_entropy(), w, d);
  const WeightVector numeric = fd_gradient(LossKind::plain_entropy(), w, d);
  for (std::size_t i = 0; i < w.size(); ++i)
    CHECK(std::abs(analytic[i] - numeric[i]) <= 1e-6 * std::max(1.0, std::abs(analytic[i])));
}

TEST_CASE("descent checker on hand-built sequences") {
  // flat loss, zero gradients: nothing to flag
  const std::vector<double> flat(10, 1.25);
  const std::vector<double> zeros(9, 0.0);
  const DescentReport clean = check_descent(flat, zeros, 0.5);
  CHECK(clean.ok());
  CHECK(clean.total_steps == 9);

  // injected violation is always found
  std::vector<double> losses{10.0, 8.0, 6.5, 6.9, 5.0};
  std::vector<double> grads{2.0, 1.5, 0.2, 1.0};
  const DescentReport bad = check_descent(losses, grads, 0.1);
  REQUIRE(bad.violating_steps.size() == 1);
  CHECK(bad.violating_steps[0].iteration == 2);
  CHECK(bad.max_violation_magnitude > 0.0);

  CHECK_THROWS_AS(check_descent(std::vector<double>{1.0}, std::vector<double>{}, 0.1),
                  std::invalid_argument);
}

TEST_CASE("an injected violation in a real certified trace is always found") {
  const Dataset d = synth::make_classification({"inj", 40, 4, 2, 1.2, 0.5, false, 19});
  TrainConfig c;
  c.policy = StepPolicy::fixed(safe_step(lipschitz_bound(d), 0.9).eta);
  c.epochs = 200;
  c.seed = 4;
  c.init_scale = 0.5;
  c.certified = true;
  TrainTrace t = train_batch(c, d);
  REQUIRE(check_descent(t, t.beta).ok());

  Rng rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    TrainTrace mutated = t;
    const std::size_t at = 1 + rng.below(mutated.records.size() - 1);
    // raise the loss past its predecessor so step at-1 cannot descend
    mutated.records[at].loss = mutated.records[at - 1].loss + 1.0;
    const DescentReport rep_out = check_descent(mutated, mutated.beta);
    REQUIRE(!rep_out.violating_steps.empty());
    CHECK(rep_out.violating_steps.front().iteration == static_cast<long>(at) - 1);
  }
}

TEST_CASE("summability check follows the telescoped chain") {
  // exact chain: L_{m+1} = L_m - beta g_m^2 satisfies both checks
  const double beta = 0.25;
  std::vector<double> losses{8.0};
  std::vector<double> grads{2.0, 1.0, 0.5, 0.25};
  for (double g : grads) losses.push_back(losses.back() - beta * g * g);
  CHECK(check_summability(losses, grads, beta) == -1);
  CHECK(check_descent(losses, grads, beta).ok());

  // bump an early gradient: the partial sums overshoot from there on
  grads[0] = 10.0;
  CHECK(check_summability(losses, grads, beta) == 0);
}

TEST_CASE("empirical Lipschitz estimate stays under the bound") {
  Rng rng(67);
  for (int rep = 0; rep < 8; ++rep) {
    Dataset d("el", 3);
    std::vector<double> x(3);
    const std::size_t rows = 2 + rng.below(10);
    for (std::size_t j = 0; j < rows; ++j) {
      for (double& v : x) v = rng.uniform(-2.0, 2.0);
      d.add(x, rng.uniform() < 0.5 ? 0.0 : 1.0);
    }
    LossKind kind;
    if (rep % 2 == 0)
      kind = LossKind::entropy_smoothed_l0(
          {RegVariant(rep % 4), rng.uniform(0.2, 3.0), rng.uniform(0.0, 0.3)});
    const double bound = lipschitz_bound(kind, d);
    EmpiricalLipschitzOptions opt;
    opt.trials = 400;
    opt.seed = rng.next_u64();
    const double estimate = empirical_lipschitz(kind, d, opt);
    CHECK(estimate <= bound + 1e-9);
    CHECK(estimate > 0.0);
  }
}

TEST_CASE("the Lipschitz bound is monotone in lambda") {
  Dataset d("mono", 2);
  d.add(std::vector<double>{1.0, 1.0}, 1.0);
  d.add(std::vector<double>{-1.0, 0.5}, 0.0);
  double prev = lipschitz_bound(d, RegularizerSpec{RegVariant::reg2, 0.8, 0.0});
  for (double lambda : {0.1, 0.5, 1.0, 5.0}) {
    const double next = lipschitz_bound(d, RegularizerSpec{RegVariant::reg2, 0.8, lambda});
    CHECK(next >= prev);
    prev = next;
  }
}

TEST_CASE("convergence summary distinguishes healthy and diverging runs") {
  const Dataset d = synth::make_separable(30, 3, 0.2, 31);
  TrainConfig c;
  c.loss = LossKind::entropy_smoothed_l0({RegVariant::reg1, 1.0, 1e-4});
  const double L = lipschitz_bound(c.loss, d);
  c.policy = StepPolicy::fixed(safe_step(L, 0.9).eta);
  c.certified = true;
  c.epochs = 2000;
  c.init_scale = 0.25;
  c.seed = 3;
  const TrainTrace good = train_batch(c, d);
  const ConvergenceSummary gs = convergence_summary(good);
  CHECK(gs.loss_monotone);
  CHECK(gs.iterations_to_grad_below.at(1e-1) >= 0);

  // overstep on the saturating single-sample instance, where the curvature
  // bound is tight at the optimum: eta = 4/L oscillates and the loss climbs
  Dataset crafted("crafted", 2);
  crafted.add(std::vector<double>{2.0, 0.0}, 0.5);
  TrainConfig wild;
  wild.policy = StepPolicy::manual(4.0 / lipschitz_bound(crafted));
  wild.epochs = 50;
  wild.init_scale = 0.5;
  wild.seed = 8;
  const TrainTrace rough = train_batch(wild, crafted);
  const ConvergenceSummary ws = convergence_summary(rough);
  CHECK_FALSE(ws.loss_monotone);
}

TEST_CASE("trace files round-trip") {
  const Dataset d = synth::make_classification({"io", 20, 3, 2, 1.0, 0.5, false, 71});
  TrainConfig c;
  c.policy = StepPolicy::fixed(safe_step(lipschitz_bound(d), 0.9).eta);
  c.epochs = 12;
  c.seed = 5;
  c.init_scale = 0.5;
  c.certified = true;
  const TrainTrace t = train_batch(c, d);

  const auto path = std::filesystem::temp_directory_path() / "eegml0_trace_test.txt";
  write_trace(path, t);
  const ParsedTrace p = read_trace(path);
  REQUIRE(p.loss.size() == t.records.size());
  for (std::size_t i = 0; i < p.loss.size(); ++i) {
    CHECK(p.loss[i] == t.records[i].loss);
    CHECK(p.grad_norm[i] == t.records[i].grad_norm);
    CHECK(p.step_norm[i] == t.records[i].step_norm);
  }
  CHECK(p.get("beta", -1.0) == t.beta);
  CHECK(p.get("final_loss", -1.0) == t.epochs.back().train_loss);

  // the parsed sequence feeds the same checker verdict
  std::vector<double> losses = p.loss;
  losses.push_back(p.get("final_loss", 0.0));
  CHECK(check_descent(losses, p.grad_norm, p.get("beta", 0.0)).ok());
}

TEST_CASE("report files are key-value text") {
  const auto path = std::filesystem::temp_directory_path() / "eegml0_report_test.txt";
  write_report(path, {{"alpha", "1"}, {"beta", "ok"}});
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "alpha = 1");
  std::getline(in, line);
  CHECK(line == "beta = ok");
}
