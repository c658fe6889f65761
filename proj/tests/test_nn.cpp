#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "scalenet/nn.hpp"

using namespace scalenet;

namespace {

// Scalar probe loss sum(G .* Y): its gradient with respect to Y is G.
double probe(const DenseMatrix& y, const DenseMatrix& g) { return (y.array() * g.array()).sum(); }

}  // namespace

TEST_CASE("relu") {
  DenseMatrix x(1, 3);
  x << -1, 0, 2;
  DenseMatrix expected(1, 3);
  expected << 0, 0, 2;
  CHECK(relu(x) == expected);
  DenseMatrix g = DenseMatrix::Ones(1, 3);
  DenseMatrix gx(1, 3);
  gx << 0, 0, 1;
  CHECK(relu_backward(x, g) == gx);
}

TEST_CASE("linear layer gradients match finite differences") {
  std::mt19937_64 rng(1);
  Linear layer(5, 3, true, rng);
  DenseMatrix x = oracle::gaussian(8, 5, rng);
  const DenseMatrix g = oracle::gaussian(8, 3, rng);

  layer.zero_grad();
  const DenseMatrix gx = layer.backward(x, g);
  auto loss = [&] { return probe(layer.forward(x), g); };
  CHECK(oracle::relative_error(layer.weight_grad, oracle::numeric_gradient(layer.weight, loss)) < 1e-4);
  CHECK(oracle::relative_error(layer.bias_grad, oracle::numeric_gradient(layer.bias, loss)) < 1e-4);
  CHECK(oracle::relative_error(gx, oracle::numeric_gradient(x, loss)) < 1e-4);
  CHECK(layer.weight_grad.rows() == layer.weight.rows());
  CHECK(layer.weight_grad.cols() == layer.weight.cols());

  Linear nobias(5, 3, false, rng);
  CHECK(!nobias.has_bias());
  CHECK(nobias.parameter_count() == 15);
}

TEST_CASE("relu gradient matches finite differences") {
  std::mt19937_64 rng(2);
  DenseMatrix x = oracle::gaussian(8, 5, rng);
  const DenseMatrix g = oracle::gaussian(8, 5, rng);
  auto loss = [&] { return probe(relu(x), g); };
  CHECK(oracle::relative_error(relu_backward(x, g), oracle::numeric_gradient(x, loss)) < 1e-4);
}

TEST_CASE("batchnorm") {
  SUBCASE("constant column normalizes to zero") {
    BatchNorm1d bn(2);
    DenseMatrix x(4, 2);
    x << 3, 1, 3, 2, 3, 3, 3, 4;
    const DenseMatrix y = bn.forward(x, true);
    CHECK(y.col(0).cwiseAbs().maxCoeff() == 0.0);
    CHECK(std::abs(y.col(1).mean()) < 1e-12);
  }
  SUBCASE("training-mode gradients") {
    std::mt19937_64 rng(3);
    BatchNorm1d bn(5);
    bn.gamma = oracle::gaussian(1, 5, rng);
    bn.beta = oracle::gaussian(1, 5, rng);
    DenseMatrix x = oracle::gaussian(8, 5, rng);
    const DenseMatrix g = oracle::gaussian(8, 5, rng);
    bn.zero_grad();
    bn.forward(x, true);
    const DenseMatrix gx = bn.backward(g);
    const DenseMatrix gg = bn.gamma_grad, gb = bn.beta_grad;
    auto loss = [&] { return probe(bn.forward(x, true), g); };
    CHECK(oracle::relative_error(gx, oracle::numeric_gradient(x, loss)) < 1e-4);
    CHECK(oracle::relative_error(gg, oracle::numeric_gradient(bn.gamma, loss)) < 1e-4);
    CHECK(oracle::relative_error(gb, oracle::numeric_gradient(bn.beta, loss)) < 1e-4);
  }
  SUBCASE("eval mode uses running statistics") {
    std::mt19937_64 rng(4);
    BatchNorm1d bn(5);
    DenseMatrix x = oracle::gaussian(8, 5, rng);
    bn.forward(x, true);
    const DenseMatrix g = oracle::gaussian(8, 5, rng);
    bn.zero_grad();
    bn.forward(x, false);
    const DenseMatrix gx = bn.backward(g);
    auto loss = [&] { return probe(bn.forward(x, false), g); };
    CHECK(oracle::relative_error(gx, oracle::numeric_gradient(x, loss)) < 1e-4);
  }
}

TEST_CASE("dropout") {
  std::mt19937_64 rng(5);
  const DenseMatrix x = oracle::gaussian(8, 5, rng);
  Dropout off(0.0);
  CHECK(off.forward(x, true, rng) == x);
  Dropout half(0.5);
  CHECK(half.forward(x, false, rng) == x);

  std::mt19937_64 r1(7), r2(7);
  Dropout d1(0.5), d2(0.5);
  const DenseMatrix y1 = d1.forward(x, true, r1);
  CHECK(y1 == d2.forward(x, true, r2));
  for (Index i = 0; i < x.rows(); ++i)
    for (Index j = 0; j < x.cols(); ++j) CHECK((y1(i, j) == 0.0 || y1(i, j) == doctest::Approx(2 * x(i, j))));
  const DenseMatrix g = oracle::gaussian(8, 5, rng);
  const DenseMatrix gx = d1.backward(g);
  for (Index i = 0; i < x.rows(); ++i)
    for (Index j = 0; j < x.cols(); ++j) CHECK(gx(i, j) == (y1(i, j) == 0.0 ? 0.0 : 2 * g(i, j)));
}

TEST_CASE("softmax cross-entropy") {
  const std::vector<int> labels{0, 2, 1, 3};
  const std::vector<Index> rows{0, 1, 3};
  const auto uniform = softmax_cross_entropy(DenseMatrix::Constant(4, 4, 0.7), labels, rows);
  CHECK(uniform.loss == doctest::Approx(std::log(4.0)).epsilon(1e-15));
  const std::vector<Index> one{1};
  CHECK(softmax_cross_entropy(DenseMatrix::Constant(4, 4, -2.5), labels, one).loss == std::log(4.0));

  std::mt19937_64 rng(6);
  DenseMatrix logits = oracle::gaussian(4, 4, rng);
  const auto r = softmax_cross_entropy(logits, labels, rows);
  CHECK(r.grad.row(2).cwiseAbs().maxCoeff() == 0.0);
  auto loss = [&] { return softmax_cross_entropy(logits, labels, rows).loss; };
  CHECK(oracle::relative_error(r.grad, oracle::numeric_gradient(logits, loss)) < 1e-6);

  DenseMatrix big = DenseMatrix::Zero(2, 2);
  big(0, 0) = 1000;
  const std::vector<int> l2{0, 0};
  const std::vector<Index> r2{0, 1};
  CHECK(std::isfinite(softmax_cross_entropy(big, l2, r2).loss));
}

TEST_CASE("accuracy") {
  DenseMatrix logits(3, 2);
  logits << 1, 0, 0, 1, 2, 1;
  const std::vector<int> labels{0, 1, 1};
  const std::vector<Index> all{0, 1, 2};
  CHECK(accuracy(logits, labels, all) == doctest::Approx(2.0 / 3.0));
  const std::vector<Index> first{0};
  CHECK(accuracy(logits, labels, first) == 1.0);
}

TEST_CASE("adam") {
  SUBCASE("zero gradient leaves parameters unchanged") {
    DenseMatrix w = DenseMatrix::Constant(2, 2, 0.3), g = DenseMatrix::Zero(2, 2);
    Adam opt({{&w, &g}}, AdamOptions{.lr = 0.1});
    for (int i = 0; i < 5; ++i) opt.step();
    CHECK(w == DenseMatrix::Constant(2, 2, 0.3));
  }
  SUBCASE("quadratic converges") {
    DenseMatrix w = DenseMatrix::Constant(1, 1, 3.0), g(1, 1);
    Adam opt({{&w, &g}}, AdamOptions{.lr = 0.1});
    int steps = 0;
    for (; steps < 500; ++steps) {
      if ((w(0, 0) - 1.0) * (w(0, 0) - 1.0) < 1e-6) break;
      g(0, 0) = 2 * (w(0, 0) - 1.0);
      opt.step();
    }
    CHECK((w(0, 0) - 1.0) * (w(0, 0) - 1.0) < 1e-6);
    CHECK(steps <= 500);
  }
  SUBCASE("first step moves by lr against the gradient sign") {
    DenseMatrix w = DenseMatrix::Zero(1, 2), g(1, 2);
    g << 5.0, -0.01;
    Adam opt({{&w, &g}}, AdamOptions{.lr = 0.01});
    opt.step();
    CHECK(w(0, 0) == doctest::Approx(-0.01).epsilon(1e-6));
    CHECK(w(0, 1) == doctest::Approx(0.01).epsilon(1e-4));
  }
  SUBCASE("deterministic") {
    auto run = [] {
      std::mt19937_64 rng(8);
      DenseMatrix w = oracle::gaussian(3, 3, rng), g(3, 3);
      Adam opt({{&w, &g}}, AdamOptions{.lr = 0.05, .weight_decay = 1e-3});
      for (int i = 0; i < 50; ++i) {
        g = w.array().sin().matrix();
        opt.step();
      }
      return w;
    };
    CHECK(run() == run());
  }
}

TEST_CASE("glorot initialization is seeded and bounded") {
  std::mt19937_64 a(10), b(10);
  const DenseMatrix w = glorot(6, 4, a);
  CHECK(w == glorot(6, 4, b));
  CHECK(w.cwiseAbs().maxCoeff() <= std::sqrt(6.0 / 10.0));
  CHECK(all_finite(w));
  DenseMatrix bad = w;
  bad(0, 0) = std::nan("");
  CHECK(!all_finite(bad));
}
