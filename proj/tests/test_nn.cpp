#include <doctest.h>

#include "gradcheck.hpp"
#include "socnav/nn.hpp"

using namespace socnav::nn;

namespace {

Matrix random_matrix(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return Matrix::NullaryExpr(rows, cols, [&]() { return n(rng); });
}

void init(Layer& layer, std::mt19937_64& rng) {
  for (Parameter* p : layer.parameters()) {
    std::normal_distribution<double> n(0.0, 0.5);
    p->value = p->value.unaryExpr([&](double) { return n(rng); });
  }
}

}  // namespace

TEST_SUITE("nn") {

TEST_CASE("dense gradients match finite differences") {
  std::mt19937_64 rng(1);
  Dense d(7, 5, "d");
  init(d, rng);
  const auto r = gradcheck::check(d, random_matrix(7, 4, rng), rng);
  CHECK(r.checked > 0);
  CHECK(r.max_relative_error < 1e-4);
}

TEST_CASE("conv gradients match finite differences") {
  std::mt19937_64 rng(2);
  const TensorShape in{2, 6, 11};
  Conv2D c(in, 3, 3, 4, 1, 2, "c");
  init(c, rng);
  CHECK(c.output_shape() == TensorShape{3, 4, 4});
  const auto r = gradcheck::check(c, random_matrix(in.size(), 3, rng), rng, true, 200);
  CHECK(r.max_relative_error < 1e-4);
}

TEST_CASE("conv without input gradient returns an empty matrix") {
  std::mt19937_64 rng(2);
  Conv2D c({1, 4, 6}, 2, 2, 2, 1, 1, "c");
  c.set_input_gradient(false);
  const Matrix x = random_matrix(24, 2, rng);
  const Matrix y = c.forward(x);
  CHECK(c.backward(Matrix::Ones(y.rows(), y.cols())).size() == 0);
}

TEST_CASE("max-pool gradients match finite differences") {
  std::mt19937_64 rng(3);
  MaxPool2D p({2, 4, 9}, 2, 3);
  CHECK(p.output_shape() == TensorShape{2, 2, 3});
  const auto r = gradcheck::check(p, random_matrix(72, 3, rng), rng, true, 200);
  CHECK(r.max_relative_error < 1e-4);
}

TEST_CASE("relu and scaled tanh gradients match finite differences") {
  std::mt19937_64 rng(4);
  ReLU relu({6, 1, 1});
  CHECK(gradcheck::check(relu, random_matrix(6, 5, rng), rng).max_relative_error < 1e-4);
  ScaledTanh t({6, 1, 1}, 1.5);
  CHECK(gradcheck::check(t, random_matrix(6, 5, rng), rng).max_relative_error < 1e-4);
}

TEST_CASE("stacked network gradients match finite differences") {
  std::mt19937_64 rng(5);
  Sequential net;
  const TensorShape in{1, 5, 16};
  auto& conv = net.add<Conv2D>(in, 4, 2, 5, 1, 2, "c0");
  net.add<ReLU>(conv.output_shape());
  auto& pool = net.add<MaxPool2D>(conv.output_shape(), 1, 2);
  net.add<Dense>(pool.output_shape().size(), 3, "d0");
  net.add<ScaledTanh>(TensorShape{3, 1, 1}, 1.5);
  for (Parameter* p : net.parameters()) init_uniform(*p, 4, rng);
  const auto r = gradcheck::check(net, random_matrix(in.size(), 3, rng), rng, true, 100);
  CHECK(r.max_relative_error < 1e-4);
  CHECK(net.output_shape(in) == TensorShape{3, 1, 1});
}

TEST_CASE("scaled tanh bounds the output") {
  ScaledTanh t({2, 1, 1}, 1.5);
  Matrix x(2, 3);
  x << 100, -100, 0, 0.1, -1e9, 1e9;
  const Matrix y = t.forward(x);
  CHECK(y.cwiseAbs().maxCoeff() <= 1.5);
  CHECK(y(0, 2) == 0.0);
}

TEST_CASE("copies of a sequential network are independent") {
  std::mt19937_64 rng(6);
  Sequential a;
  a.add<Dense>(3, 2, "d");
  for (Parameter* p : a.parameters()) init_uniform(*p, 3, rng);
  Sequential b = a;
  b.parameters()[0]->value.setZero();
  CHECK(a.parameters()[0]->value.norm() > 0.0);
}

TEST_CASE("adam moves a quadratic toward its minimum") {
  Parameter p{"w", Matrix::Constant(2, 1, 3.0), Matrix::Zero(2, 1)};
  Adam opt(0.1);
  std::vector<Parameter*> params{&p};
  for (int k = 0; k < 500; ++k) {
    p.grad = 2.0 * p.value;
    opt.step(params);
  }
  CHECK(p.value.norm() < 0.05);
  CHECK(opt.step_count() == 500);
}

TEST_CASE("first adam step has magnitude equal to the learning rate") {
  Parameter p{"w", Matrix::Constant(1, 1, 1.0), Matrix::Constant(1, 1, 0.37)};
  Adam opt(0.01);
  std::vector<Parameter*> params{&p};
  opt.step(params);
  CHECK(p.value(0, 0) == doctest::Approx(0.99).epsilon(1e-6));
}

}
