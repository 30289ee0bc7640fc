/*
 * Copyright 2026 The asyrec Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "asyrec/grad_check.hpp"
#include "asyrec/ops.hpp"
#include "asyrec/optimizer.hpp"
#include "asyrec/tensor.hpp"
#include "support/oracles.hpp"

namespace asyrec {
namespace {

TEST(Tensor, RejectsZeroExtentAndLengthMismatch) {
  EXPECT_THROW(Tensor({2, 0}), std::invalid_argument);
  EXPECT_THROW(Tensor({2, 2}, std::vector<double>{1, 2, 3}), std::invalid_argument);
  EXPECT_NO_THROW(Tensor({2, 2}, std::vector<double>{1, 2, 3, 4}));
}

TEST(Tensor, ItemOnlyOnScalars) {
  EXPECT_DOUBLE_EQ(Tensor::scalar(3.5).item(), 3.5);
  EXPECT_THROW(Tensor::vector({1, 2}).item(), std::logic_error);
}

TEST(Tape, BackwardNeedsScalarAndZeroGradBeforeSecondSweep) {
  Tape tape;
  Var x = tape.leaf(Tensor::vector({1.0, 2.0}));
  EXPECT_THROW(tape.backward(x), std::invalid_argument);
  Var s = sum(mul(x, x));
  tape.backward(s);
  EXPECT_DOUBLE_EQ(x.grad()[0], 2.0);
  EXPECT_DOUBLE_EQ(x.grad()[1], 4.0);
  EXPECT_THROW(tape.backward(s), std::logic_error);
  tape.zero_grad();
  tape.backward(s);
  EXPECT_DOUBLE_EQ(x.grad()[1], 4.0);
}

TEST(Ops, MatmulMatchesLoop) {
  std::mt19937_64 rng(1);
  Tape tape;
  Tensor a = oracle::random_tensor({3, 4}, rng), b = oracle::random_tensor({4, 2}, rng);
  Var c = matmul(tape.leaf(a), tape.leaf(b));
  ASSERT_EQ(c.shape(), (Shape{3, 2}));
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < 4; ++k) s += a.at(i, k) * b.at(k, j);
      EXPECT_NEAR(c.value().at(i, j), s, 1e-14);
    }
}

TEST(Ops, ShapeErrorsNameBothShapes) {
  Tape tape;
  Var a = tape.leaf(Tensor({2, 3})), b = tape.leaf(Tensor({2, 3}));
  try {
    matmul(a, b);
    FAIL() << "expected a shape error";
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("[2x3]"), std::string::npos) << msg;
  }
  EXPECT_THROW(add(a, tape.leaf(Tensor({3, 2}))), std::invalid_argument);
}

TEST(Ops, ReluSubgradientAtZeroIsZero) {
  Tape tape;
  Var x = tape.leaf(Tensor::vector({-1.0, 0.0, 2.0}));
  tape.backward(sum(relu(x)));
  EXPECT_EQ(x.grad()[0], 0.0);
  EXPECT_EQ(x.grad()[1], 0.0);
  EXPECT_EQ(x.grad()[2], 1.0);
}

TEST(Ops, SoftmaxIsStableForLargeLogits) {
  Tape tape;
  Var p = softmax(tape.leaf(Tensor::vector({1000.0, 1000.0, 999.0})), 0);
  ASSERT_TRUE(p.value().all_finite());
  const oracle::Vec expect = oracle::softmax({0.0, 0.0, -1.0});
  for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(p.value()[k], expect[k], 1e-15);
}

TEST(Ops, MaskedSoftmaxZeroesMaskedEntriesAndEmptySlices) {
  Tape tape;
  Tensor mask = Tensor::matrix(2, 2, {1, 0, 1, 0});
  Var x = tape.leaf(Tensor::matrix(2, 2, {0.3, -2.0, 1.1, 5.0}));
  Var p = masked_softmax(x, mask, 0);
  EXPECT_NEAR(p.value().at(0, 0) + p.value().at(1, 0), 1.0, 1e-15);
  EXPECT_EQ(p.value().at(0, 1), 0.0);
  EXPECT_EQ(p.value().at(1, 1), 0.0);
  tape.backward(sum(mul(p, tape.constant(Tensor::matrix(2, 2, {1, 2, 3, 4})))));
  EXPECT_EQ(x.grad().at(0, 1), 0.0);
  EXPECT_EQ(x.grad().at(1, 1), 0.0);
}

TEST(Ops, CrossEntropyOfUniformLogitsIsLogClasses) {
  for (std::size_t n : {2u, 4u, 7u}) {
    Tape tape;
    Var ce = cross_entropy(tape.leaf(Tensor({n}, 0.37)), n - 1);
    EXPECT_NEAR(ce.value().item(), std::log(static_cast<double>(n)), 1e-15);
  }
}

TEST(Ops, CrossEntropyMatchesOracle) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    Tensor logits = oracle::random_tensor({5}, rng, 3.0);
    Tape tape;
    Var ce = cross_entropy(tape.leaf(logits), static_cast<std::size_t>(trial % 5));
    EXPECT_NEAR(ce.value().item(), oracle::cross_entropy(logits.values(), trial % 5), 1e-12);
  }
}

// Every differentiable primitive composed into one scalar.
TEST(GradCheck, PrimitivesAgreeWithFiniteDifferences) {
  std::mt19937_64 rng(3);
  std::vector<Tensor> params = {oracle::random_tensor({3, 4}, rng), oracle::random_tensor({4, 3}, rng),
                                oracle::random_tensor({3}, rng), oracle::random_tensor({4}, rng)};
  for (double& v : params[3].values()) v = 1.5 + std::abs(v);  // divisor away from zero
  const Tensor mask = Tensor::matrix(4, 3, {1, 0, 1, 1, 1, 0, 0, 1, 1, 1, 1, 0});
  const std::size_t rows[] = {2, 0, 2};
  const std::size_t positions[] = {0, 4, 5, 7};
  ScalarFn f = [&](Tape& tape, std::span<const Var> p) {
    Var m = matmul(p[0], p[1]);
    Var a = leaky_relu(add_scalar(m, 0.1), 0.2);
    Var b = scale_rows(sin(a), p[2]);
    Var c = concat({transpose(b), cos(m)}, 1);
    Var g = gather_rows(c, rows);
    Var sm = softmax(slice(g, 1, 1, 5), 1);
    Var mk = masked_softmax(reshape(p[0], {4, 3}), mask, 0);
    Var d = div(reduce_mean(transpose(p[0]), 1), p[3]);
    Var e = scatter(d, {3, 3}, positions);
    Var h = clamp_min(sub(e, tape.constant(Tensor({3, 3}, 0.05))), -0.2);
    Var ce = cross_entropy(reduce_sum(m, 0), 1);
    Var mk_weighted = mul(mk, tape.constant(Tensor::matrix(4, 3, {1, 2, 3, 4, 5, 6, 7, 8, 9, 1, 2, 3})));
    return add(add(add(sum(mul(sm, sm)), sum(mk_weighted)), sum(relu(h))), scale(ce, 0.5));
  };
  const GradCheckResult r = grad_check_detailed(f, params, 1e-6);
  EXPECT_LE(r.max_rel_error, 1e-6) << "param " << r.worst_param << " index " << r.worst_index;
}

TEST(GradCheck, RejectsStepOutsideRange) {
  ScalarFn f = [](Tape&, std::span<const Var> p) { return sum(p[0]); };
  EXPECT_THROW(grad_check(f, {Tensor::vector({1.0})}, 1e-2), std::invalid_argument);
  EXPECT_THROW(grad_check(f, {Tensor::vector({1.0})}, 1e-9), std::invalid_argument);
}

TEST(GradCheck, DetectsAWrongGradient) {
  // Backward deliberately returns twice the true derivative of x^2.
  ScalarFn f = [](Tape& tape, std::span<const Var> p) {
    const double x = p[0].value()[0];
    return tape.record(Tensor::scalar(x * x), {p[0]}, [x](const Tensor& g, std::span<Tensor* const> in) {
      if (in[0]) (*in[0])[0] += g.item() * 4.0 * x;
    });
  };
  EXPECT_GT(grad_check(f, {Tensor::vector({1.3})}), 0.1);
}

TEST(Optimizer, AdamWMatchesScalarOracleOverSteps) {
  std::mt19937_64 rng(4);
  Tensor p = oracle::random_tensor({2, 3}, rng);
  OptimizerState state;
  state.hyper.learning_rate = 1e-2;
  state.hyper.weight_decay = 5e-4;
  std::vector<double> expect = p.values();
  std::vector<oracle::AdamScalarState> scalar(expect.size());
  for (std::size_t step = 1; step <= 5; ++step) {
    Tensor g = oracle::random_tensor({2, 3}, rng);
    Tensor* params[] = {&p};
    const Tensor* grads[] = {&g};
    optimizer_step(state, params, grads);
    for (std::size_t k = 0; k < expect.size(); ++k)
      expect[k] = oracle::adamw(expect[k], g[k], scalar[k], step, 1e-2, 5e-4);
  }
  for (std::size_t k = 0; k < expect.size(); ++k) EXPECT_NEAR(p[k], expect[k], 1e-15);
  EXPECT_EQ(state.step, 5u);
}

TEST(Optimizer, RejectsShapeMismatch) {
  Tensor p({2, 2}), g({4});
  OptimizerState state;
  Tensor* params[] = {&p};
  const Tensor* grads[] = {&g};
  EXPECT_THROW(optimizer_step(state, params, grads), std::invalid_argument);
}

}  // namespace
}  // namespace asyrec
