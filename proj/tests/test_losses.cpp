#include <doctest.h>

#include <cmath>

#include "eegml0/diagnostics.hpp"
#include "eegml0/losses.hpp"
#include "eegml0/rng.hpp"

using namespace eegml0;

namespace {

Dataset one_sample(std::vector<double> features, double label) {
  Dataset d("one", features.size());
  d.add(features, label);
  return d;
}

// Feature range [-1, 1] keeps |W.x| below the entropy clamp threshold, where
// the loss is deliberately flat while the gradient keeps the algebraic form.
Dataset random_dataset(Rng& rng, std::size_t rows, std::size_t cols) {
  Dataset d("rand", cols);
  std::vector<double> x(cols);
  for (std::size_t j = 0; j < rows; ++j) {
    for (double& v : x) v = rng.uniform(-1.0, 1.0);
    d.add(x, rng.uniform() < 0.5 ? 0.0 : 1.0);
  }
  return d;
}

LossKind random_kind(Rng& rng) {
  LossKind kind;
  kind.base = rng.uniform() < 0.5 ? BaseLoss::entropy : BaseLoss::squared_error;
  const double pick = rng.uniform();
  if (pick < 0.55) {
    const RegVariant variants[] = {RegVariant::reg1, RegVariant::reg2, RegVariant::reg3,
                                   RegVariant::reg4};
    kind.regularizer = RegularizerSpec{variants[rng.below(4)], rng.uniform(0.01, 10.0),
                                       rng.uniform(0.0, 0.5)};
  } else if (pick < 0.75) {
    kind.l2_lambda = rng.uniform(0.0, 0.5);
  }
  return kind;
}

}  // namespace

TEST_CASE("sigmoid fixed points and stability") {
  CHECK(sigmoid(0.0) == 0.5);
  CHECK(sigmoid(std::log(3.0)) == doctest::Approx(0.75).epsilon(1e-15));
  const double tail = sigmoid(-50.0);
  CHECK(tail > 0.0);
  CHECK(tail == doctest::Approx(1.928749847963918e-22).epsilon(1e-12));
  CHECK(std::isfinite(sigmoid(700.0)));
  CHECK(std::isfinite(sigmoid(-700.0)));
  CHECK(sigmoid(-700.0) > 0.0);
  CHECK_THROWS_AS(sigmoid(std::numeric_limits<double>::quiet_NaN()), std::domain_error);
}

TEST_CASE("sigmoid symmetry and derivative bound") {
  Rng rng(23);
  int at_quarter = 0;
  for (int i = 0; i < 100000; ++i) {
    const double x = rng.uniform(-40.0, 40.0);
    const double g = sigmoid(x);
    CHECK(sigmoid(-x) == doctest::Approx(1.0 - g).epsilon(1e-12));
    const double slope = g * (1.0 - g);
    CHECK(slope <= 0.25);
    if (slope == 0.25) ++at_quarter;
  }
  CHECK(at_quarter == 0);  // equality only at x = 0 exactly
  CHECK(sigmoid(0.0) * (1.0 - sigmoid(0.0)) == 0.25);
}

TEST_CASE("predict") {
  const WeightVector zero{0.0, 0.0};
  const Sample s{{3.0, -4.0}, 1.0};
  CHECK(predict(zero, s) == 0.5);
  const WeightVector w{std::log(3.0), 0.0};
  const Sample s2{{1.0, 7.0}, 1.0};
  CHECK(predict(w, s2) == doctest::Approx(0.75).epsilon(1e-15));
  const WeightVector w3{1.0, 1.0};
  const Sample s3{{2.0, -2.0}, 0.0};
  CHECK(predict(w3, s3) == 0.5);
  CHECK_THROWS_AS(predict(WeightVector{1.0}, s2), std::invalid_argument);
}

TEST_CASE("entropy error values") {
  const WeightVector w0{0.0};
  CHECK(entropy_error(w0, one_sample({1.0}, 1.0)) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(entropy_error(w0, one_sample({1.0}, 0.5)) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-15));
  // W.xi = ln 3, label 1 -> -ln(3/4)
  const WeightVector w1{std::log(3.0)};
  CHECK(entropy_error(w1, one_sample({1.0}, 1.0)) ==
        doctest::Approx(0.2876820724517809).epsilon(1e-12));
  CHECK_THROWS_AS(entropy_error(w0, Dataset("empty", 1)), std::invalid_argument);
  CHECK_THROWS_AS(entropy_error(WeightVector{1.0, 2.0}, one_sample({1.0}, 1.0)),
                  std::invalid_argument);
}

TEST_CASE("entropy gradient closed form") {
  const WeightVector w0{0.0, 0.0};
  const WeightVector g = entropy_error_grad(w0, one_sample({1.0, 0.0}, 1.0));
  CHECK(g[0] == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(g[1] == 0.0);

  // perfect fit: residuals vanish
  Dataset d("fit", 1);
  const WeightVector w{0.7};
  for (double x : {0.4, -1.2, 2.0}) d.add(std::vector<double>{x}, sigmoid(0.7 * x));
  const WeightVector gz = entropy_error_grad(w, d);
  CHECK(gz[0] == 0.0);
}

TEST_CASE("adding a perfectly-predicted sample leaves the gradient unchanged") {
  Rng rng(29);
  Dataset d = random_dataset(rng, 5, 3);
  // powers of two keep the inner product exact under any summation order,
  // so the appended sample's residual is exactly zero
  WeightVector w{0.5, -0.25, 1.0};
  const WeightVector before = entropy_error_grad(w, d);
  std::vector<double> extra{1.0, 2.0, -0.5};
  d.add(extra, sigmoid(-0.5));
  const WeightVector after = entropy_error_grad(w, d);
  for (std::size_t i = 0; i < w.size(); ++i) CHECK(before[i] == after[i]);
}

TEST_CASE("squared error values") {
  const WeightVector w0{0.0};
  CHECK(squared_error(w0, one_sample({1.0}, 0.5)) == 0.0);
  CHECK(squared_error(w0, one_sample({1.0}, 1.0)) == doctest::Approx(0.125).epsilon(1e-15));
}

TEST_CASE("total loss composition") {
  Rng rng(31);
  const Dataset d = random_dataset(rng, 6, 3);
  WeightVector w{0.2, -0.4, 0.9};

  // lambda = 0 short-circuits to the plain path, bit for bit
  LossKind with_zero = LossKind::entropy_smoothed_l0({RegVariant::reg2, 1.0, 0.0});
  CHECK(total_loss(with_zero, w, d) == total_loss(LossKind::plain_entropy(), w, d));
  const WeightVector g1 = total_loss_grad(with_zero, w, d);
  const WeightVector g2 = total_loss_grad(LossKind::plain_entropy(), w, d);
  for (std::size_t i = 0; i < w.size(); ++i) CHECK(g1[i] == g2[i]);

  // W = 0: any smoothing penalty contributes nothing
  const WeightVector zero{0.0, 0.0, 0.0};
  LossKind reg = LossKind::entropy_smoothed_l0({RegVariant::reg1, 0.7, 2.0});
  CHECK(total_loss(reg, zero, d) == total_loss(LossKind::plain_entropy(), zero, d));

  // both penalties set is invalid
  LossKind bad;
  bad.regularizer = RegularizerSpec{RegVariant::reg1, 1.0, 0.1};
  bad.l2_lambda = 0.1;
  CHECK_THROWS_AS(total_loss(bad, w, d), std::invalid_argument);
}

TEST_CASE("analytic gradients match finite differences for every loss kind") {
  Rng rng(37);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t p = 1 + rng.below(8);
    const std::size_t rows = 1 + rng.below(16);
    const Dataset d = random_dataset(rng, rows, p);
    const LossKind kind = random_kind(rng);
    WeightVector w(p);
    for (double& v : w) v = rng.uniform(-2.0, 2.0);

    const WeightVector analytic = total_loss_grad(kind, w, d);
    const WeightVector numeric = fd_gradient(kind, w, d);
    for (std::size_t i = 0; i < p; ++i)
      CHECK(std::abs(analytic[i] - numeric[i]) <= 1e-6 * std::max(1.0, std::abs(analytic[i])));
  }
}

TEST_CASE("losses are nonnegative") {
  Rng rng(41);
  for (int rep = 0; rep < 200; ++rep) {
    const Dataset d = random_dataset(rng, 1 + rng.below(12), 1 + rng.below(6));
    WeightVector w(d.dim());
    for (double& v : w) v = rng.uniform(-30.0, 30.0);
    const LossKind kind = random_kind(rng);
    CHECK(total_loss(kind, w, d) >= 0.0);
  }
}
