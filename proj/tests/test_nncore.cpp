#include <cmath>
#include <numeric>

#include "doctest.h"
#include "latestop/errors.hpp"
#include "latestop/nncore.hpp"
#include "support.hpp"

using namespace latestop;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, Rng& rng) {
  Matrix m(r, c);
  for (auto& v : m.data()) v = rng.normal();
  return m;
}

std::vector<int> random_labels(std::size_t n, int classes, Rng& rng) {
  std::vector<int> y(n);
  for (auto& v : y) v = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(classes)));
  return y;
}

// One 1x1 layer; handy for hand-computed optimizer traces.
Parameters scalar_params(double w, double b) {
  Parameters p;
  p.layers.push_back({Matrix(1, 1, std::vector<double>{w}), {b}});
  return p;
}

}  // namespace

TEST_CASE("analytic gradients match central differences") {
  Rng rng(11);
  for (int trial = 0; trial < 8; ++trial) {
    NetworkSpec spec;
    spec.layer_widths = {3 + rng.uniform_index(3), 2 + rng.uniform_index(5), 2 + rng.uniform_index(3)};
    if (trial % 2) spec.layer_widths.insert(spec.layer_widths.begin() + 1, 4);
    spec.activation = trial % 3 == 0 ? Activation::tanh : Activation::relu;
    Parameters p = init_parameters(spec, rng);
    for (auto& layer : p.layers)
      for (auto& b : layer.bias) b = 0.1 * rng.normal();
    const Matrix x = random_matrix(5, spec.input_width(), rng);
    const auto y = random_labels(5, static_cast<int>(spec.num_classes()), rng);
    const LossAndGrad lg = loss_and_grad(p, x, y);
    const double mean_loss = std::accumulate(lg.per_example_loss.begin(), lg.per_example_loss.end(), 0.0) / 5.0;
    CHECK(mean_loss == doctest::Approx(support::reference_mean_loss(p, x, y)).epsilon(1e-12));
    CHECK(support::max_gradient_error(p, x, y, lg.grad.flatten()) < 1e-4);
  }
}

TEST_CASE("momentum SGD matches a two-step hand trace") {
  Parameters p = scalar_params(1.0, 0.5);
  OptimizerState opt = make_optimizer(p, 0.1, 0.9, 0.01);
  sgd_step(p, scalar_params(2.0, -1.0), opt);
  // v = 2 + 0.01*1 = 2.01, w = 1 - 0.201; vb = -1 + 0.005 = -0.995, b = 0.5 + 0.0995
  CHECK(p.layers[0].weight(0, 0) == doctest::Approx(0.799).epsilon(1e-14));
  CHECK(p.layers[0].bias[0] == doctest::Approx(0.5995).epsilon(1e-14));
  sgd_step(p, scalar_params(-1.0, 0.0), opt);
  // v = 0.9*2.01 - 1 + 0.00799 = 0.81699, w = 0.799 - 0.081699
  CHECK(p.layers[0].weight(0, 0) == doctest::Approx(0.717301).epsilon(1e-14));
  // vb = 0.9*-0.995 + 0 + 0.005995 = -0.889505, b = 0.5995 + 0.0889505
  CHECK(p.layers[0].bias[0] == doctest::Approx(0.6884505).epsilon(1e-14));
}

TEST_CASE("non-finite gradients are rejected before any update") {
  Parameters p = scalar_params(1.0, 0.0);
  OptimizerState opt = make_optimizer(p, 0.1, 0.9, 0.0);
  CHECK_THROWS_AS(sgd_step(p, scalar_params(std::nan(""), 0.0), opt), NumericError);
  CHECK(p.layers[0].weight(0, 0) == 1.0);
}

TEST_CASE("predict breaks ties towards the lowest index") {
  const Matrix logits(3, 3, std::vector<double>{1, 3, 3, 2, 2, 2, 0, -1, 5});
  CHECK(predict(logits) == std::vector<int>{1, 0, 2});
}

TEST_CASE("softmax rows sum to one and ignore constant shifts") {
  Rng rng(3);
  Matrix z = random_matrix(4, 5, rng);
  Matrix shifted = z;
  for (auto& v : shifted.data()) v += 123.0;
  const Matrix a = softmax_rows(z), b = softmax_rows(shifted);
  for (std::size_t r = 0; r < 4; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < 5; ++c) {
      s += a(r, c);
      CHECK(a(r, c) == doctest::Approx(b(r, c)).epsilon(1e-12));
    }
    CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
  }
  CHECK(predict(z) == predict(shifted));
}

TEST_CASE("cross-entropy of equal logits is log C") {
  const Matrix z(2, 4, 0.0);
  const std::vector<int> y{0, 3};
  for (double l : cross_entropy(z, y)) CHECK(l == doctest::Approx(std::log(4.0)));
}

TEST_CASE("initialization respects the fan bound and is seed-deterministic") {
  NetworkSpec spec{{16, 64, 64, 4}, Activation::relu};
  Rng a(5), b(5), c(6);
  const Parameters pa = init_parameters(spec, a);
  CHECK(pa == init_parameters(spec, b));
  CHECK_FALSE(pa == init_parameters(spec, c));
  CHECK(pa.count() == 16 * 64 + 64 + 64 * 64 + 64 + 64 * 4 + 4);
  for (const auto& layer : pa.layers) {
    const double bound = init_bound(layer.weight.rows(), layer.weight.cols());
    for (double w : layer.weight.data()) CHECK(std::abs(w) <= bound);
    for (double v : layer.bias) CHECK(v == 0.0);
  }
  CHECK(init_bound(16, 64) == doctest::Approx(std::sqrt(6.0 / 80.0)));
}

TEST_CASE("invalid network specs are configuration errors") {
  Rng rng(1);
  CHECK_THROWS_AS(init_parameters(NetworkSpec{{4}, Activation::relu}, rng), ConfigError);
  CHECK_THROWS_AS(init_parameters(NetworkSpec{{4, 0, 2}, Activation::relu}, rng), ConfigError);
  CHECK_THROWS_AS(parse_activation("sigmoid"), ConfigError);
}

TEST_CASE("evaluate agrees with forward and predict") {
  Rng rng(9);
  NetworkSpec spec{{3, 8, 3}, Activation::tanh};
  const Parameters p = init_parameters(spec, rng);
  const Matrix x = random_matrix(2500, 3, rng);
  const auto y = random_labels(2500, 3, rng);
  const EvalPass ev = evaluate(p, x, y);
  const auto pred = predict(forward(p, x));
  const auto ce = cross_entropy(forward(p, x), y);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    CHECK(ev.correct[i] == (pred[i] == y[i]));
    CHECK(ev.loss[i] == doctest::Approx(ce[i]).epsilon(1e-12));
    hits += ev.correct[i];
  }
  CHECK(ev.accuracy == doctest::Approx(static_cast<double>(hits) / 2500.0));
}

TEST_CASE("training fits a linearly separable problem") {
  Rng rng(21);
  Matrix x(400, 2);
  std::vector<int> y(400);
  for (std::size_t i = 0; i < 400; ++i) {
    y[i] = static_cast<int>(i % 2);
    x(i, 0) = (y[i] ? 2.0 : -2.0) + 0.5 * rng.normal();
    x(i, 1) = rng.normal();
  }
  NetworkSpec spec{{2, 16, 2}, Activation::relu};
  Parameters p = init_parameters(spec, rng);
  OptimizerState opt = make_optimizer(p, 0.05, 0.9, 5e-4);
  const double first = train_epoch(p, opt, x, y, 32, rng);
  double last = first;
  for (int e = 0; e < 20; ++e) last = train_epoch(p, opt, x, y, 32, rng);
  CHECK(last < first);
  CHECK(evaluate(p, x, y).accuracy > 0.98);
}
