// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "copygen/error.hpp"
#include "copygen/numerics/adam.hpp"
#include "copygen/numerics/autograd.hpp"
#include "copygen/numerics/tensor.hpp"
#include "support/gradcheck.hpp"

namespace copygen::numerics {
namespace {

using testing::gradient_check;
using testing::random_tensor;

// Naive triple loop, written independently of the library kernel.
Tensor reference_matmul(const Tensor& a, const Tensor& b) {
  const std::size_t m = a.shape()[0], k = a.shape()[1], n = b.shape()[1];
  std::vector<double> out(m * n, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t p = 0; p < k; ++p) out[i * n + j] += a.data()[i * k + p] * b.data()[p * n + j];
  return Tensor({m, n}, out);
}

TEST(Tensor, ShapeInvariantEnforced) {
  EXPECT_THROW(Tensor({2, 3}, std::vector<double>(5)), Error);
  EXPECT_THROW(Tensor(Shape{0, 3}), Error);
  Tensor t({2, 3}, 1.5);
  EXPECT_EQ(t.size(), 6u);
  EXPECT_EQ(t.rows(), 2u);
  EXPECT_EQ(t.cols(), 3u);
}

TEST(Matmul, IdentityLeavesMatrixUnchanged) {
  const auto a = Tensor::matrix({{0.3, -1.2}, {4.0, 2.5}});
  EXPECT_EQ(matmul(Tensor::identity(2), a), a);
}

TEST(Matmul, WorkedExampleMatchesTripleLoop) {
  const auto a = Tensor::matrix({{1, 2}, {3, 4}});
  const auto b = Tensor::matrix({{5, 6}, {7, 8}});
  const auto expected = reference_matmul(a, b);
  EXPECT_EQ(expected, Tensor::matrix({{19, 22}, {43, 50}}));
  EXPECT_EQ(matmul(a, b), expected);
}

TEST(Matmul, RandomAgainstTripleLoop) {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = 1 + rng.below(5), k = 1 + rng.below(5), n = 1 + rng.below(5);
    const auto a = random_tensor(rng, {m, k});
    const auto b = random_tensor(rng, {k, n});
    const auto got = matmul(a, b);
    const auto want = reference_matmul(a, b);
    for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-12);
  }
}

TEST(Matmul, ShapeMismatchRejected) {
  try {
    matmul(Tensor({2, 3}), Tensor({4, 5}));
    FAIL() << "expected shape error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "shape_error");
    EXPECT_NE(std::string(e.what()).find("[2x3]"), std::string::npos);
  }
}

TEST(Softmax, ConstantVectorIsUniform) {
  const auto y = softmax(Tensor::vector({3, 3, 3, 3}), 0);
  for (double v : y.data()) EXPECT_DOUBLE_EQ(v, 0.25);
}

TEST(Softmax, ClosedFormTwoElement) {
  const auto y = softmax(Tensor::vector({0.0, std::log(2.0)}), 0);
  EXPECT_NEAR(y[0], 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(y[1], 2.0 / 3.0, 1e-15);
}

TEST(Softmax, SlicesSumToOneIncludingLargeMagnitudes) {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const double scale = trial % 2 ? 1e4 : 3.0;
    const auto x = random_tensor(rng, {3, 4, 5}, scale);
    for (std::size_t axis = 0; axis < 3; ++axis) {
      const auto y = softmax(x, axis);
      ASSERT_TRUE(y.all_finite());
      for (double v : y.data()) ASSERT_GE(v, 0.0);
      // Sum along the chosen axis.
      const std::size_t extents[3] = {3, 4, 5};
      const std::size_t inner = axis == 0 ? 20 : axis == 1 ? 5 : 1;
      const std::size_t outer = axis == 0 ? 1 : axis == 1 ? 3 : 12;
      for (std::size_t o = 0; o < outer; ++o)
        for (std::size_t q = 0; q < inner; ++q) {
          double total = 0.0;
          for (std::size_t i = 0; i < extents[axis]; ++i) total += y[o * extents[axis] * inner + i * inner + q];
          ASSERT_NEAR(total, 1.0, 1e-6);
        }
    }
  }
}

TEST(Softmax, AxisOutOfRange) { EXPECT_THROW(softmax(Tensor({2, 2}), 2), Error); }

TEST(CrossEntropy, OneHotIsZero) {
  EXPECT_DOUBLE_EQ(cross_entropy(Tensor::vector({0, 0, 1, 0}), 2), 0.0);
}

TEST(CrossEntropy, UniformOverEight) {
  EXPECT_NEAR(cross_entropy(Tensor::vector(std::vector<double>(8, 0.125)), 5), std::log(8.0), 1e-12);
  EXPECT_NEAR(std::log(8.0), 2.0794, 1e-4);
}

TEST(CrossEntropy, DirectEvaluation) {
  EXPECT_NEAR(cross_entropy(Tensor::vector({0.625, 0.375}), 0), 0.4700, 1e-4);
}

TEST(CrossEntropy, FloorAvoidsInfinity) {
  EXPECT_NEAR(cross_entropy(Tensor::vector({1.0, 0.0}), 1), -std::log(kProbabilityFloor), 1e-9);
}

TEST(CrossEntropy, TargetOutOfRange) { EXPECT_THROW(cross_entropy(Tensor::vector({1.0}), 1), Error); }

TEST(Backward, SquareAtThree) {
  Tape tape;
  auto x = tape.parameter(Tensor::scalar(3.0));
  auto y = square(x);
  EXPECT_DOUBLE_EQ(y.value().item(), 9.0);
  EXPECT_DOUBLE_EQ(tape.backward(y).of(x).item(), 6.0);
}

TEST(Backward, UnusedParameterHasExactlyZeroGradient) {
  Tape tape;
  auto x = tape.parameter(Tensor::vector({1.0, 2.0}));
  auto unused = tape.parameter(Tensor::vector({5.0, 6.0, 7.0}));
  auto loss = sum(square(x));
  const auto g = tape.backward(loss).of(unused);
  for (double v : g.data()) EXPECT_EQ(v, 0.0);
}

TEST(Backward, NonScalarLossRejected) {
  Tape tape;
  auto x = tape.parameter(Tensor::vector({1.0, 2.0}));
  EXPECT_THROW(tape.backward(square(x)), Error);
}

TEST(Backward, SharedInputAccumulatesOnce) {
  // f(x) = x*x + x -> f'(x) = 2x + 1
  Tape tape;
  auto x = tape.parameter(Tensor::scalar(1.5));
  auto loss = add(mul(x, x), x);
  EXPECT_DOUBLE_EQ(tape.backward(loss).of(x).item(), 4.0);
}

TEST(GradCheck, SoftmaxCrossEntropyComposite) {
  Rng rng(2024);
  for (int trial = 0; trial < 10; ++trial) {
    const auto logits = random_tensor(rng, {7}, 2.0);
    const std::size_t target = rng.below(7);
    auto fn = [target](Tape&, const std::vector<Var>& v) { return cross_entropy(softmax(v[0], 0), target); };
    EXPECT_LT(gradient_check(fn, {logits}).max_relative_error, 1e-4);
  }
}

struct PrimitiveCase {
  const char* name;
  std::vector<Shape> shapes;
  testing::LossFn fn;
};

// Each primitive is reduced to a scalar through a fixed random projection so
// every output coordinate contributes to the checked gradient.
Var project(const Var& y, std::uint64_t seed) {
  Rng rng(seed);
  auto w = random_tensor(rng, y.shape());
  return sum(mul(y, y.tape().constant(std::move(w))));
}

TEST(GradCheck, EveryPrimitive) {
  const std::vector<std::size_t> ids = {2, 0, 2, 1};
  const std::vector<std::size_t> targets = {1, 0, 3};
  std::vector<bool> mask(12, false);
  mask[3] = mask[7] = true;
  const std::vector<PrimitiveCase> cases = {
      {"matmul", {{3, 4}, {4, 2}}, [](Tape&, const auto& v) { return project(matmul(v[0], v[1]), 1); }},
      {"transpose", {{3, 4}}, [](Tape&, const auto& v) { return project(transpose(v[0]), 2); }},
      {"add", {{2, 3}, {2, 3}}, [](Tape&, const auto& v) { return project(add(v[0], v[1]), 3); }},
      {"sub", {{2, 3}, {2, 3}}, [](Tape&, const auto& v) { return project(sub(v[0], v[1]), 4); }},
      {"mul", {{2, 3}, {2, 3}}, [](Tape&, const auto& v) { return project(mul(v[0], v[1]), 5); }},
      {"scale", {{2, 3}}, [](Tape&, const auto& v) { return project(scale(v[0], -1.7), 6); }},
      {"add_bias", {{3, 4}, {4}}, [](Tape&, const auto& v) { return project(add_bias(v[0], v[1]), 7); }},
      {"sigmoid", {{2, 5}}, [](Tape&, const auto& v) { return project(sigmoid(v[0]), 8); }},
      {"gelu", {{2, 5}}, [](Tape&, const auto& v) { return project(gelu(v[0]), 9); }},
      {"softmax_rows", {{3, 4}}, [](Tape&, const auto& v) { return project(softmax(v[0], 1), 10); }},
      {"softmax_cols", {{3, 4}}, [](Tape&, const auto& v) { return project(softmax(v[0], 0), 11); }},
      {"mask_fill", {{3, 4}}, [mask](Tape&, const auto& v) { return project(softmax(mask_fill(v[0], mask), 1), 12); }},
      {"layer_norm", {{3, 6}, {6}, {6}},
       [](Tape&, const auto& v) { return project(layer_norm(v[0], v[1], v[2]), 13); }},
      {"gather_rows", {{3, 4}}, [ids](Tape&, const auto& v) { return project(gather_rows(v[0], ids), 14); }},
      {"slice_concat", {{3, 5}, {3, 2}},
       [](Tape&, const auto& v) { return project(concat_cols({slice_cols(v[0], 1, 3), v[1]}), 15); }},
      {"mean", {{4, 2}}, [](Tape&, const auto& v) { return mean(square(v[0])); }},
      {"mean_row_nll", {{3, 5}},
       [targets](Tape&, const auto& v) { return mean_row_nll(softmax(v[0], 1), targets); }},
  };
  Rng rng(99);
  for (const auto& c : cases) {
    std::vector<Tensor> inputs;
    for (const auto& s : c.shapes) inputs.push_back(random_tensor(rng, s));
    const auto r = gradient_check(c.fn, inputs);
    EXPECT_LT(r.max_relative_error, 1e-4) << c.name;
    EXPECT_GT(r.checked, 0u) << c.name;
  }
}

TEST(GradCheck, DropoutWithFixedMask) {
  Rng rng(3);
  const auto x = random_tensor(rng, {4, 4});
  auto fn = [](Tape& tape, const std::vector<Var>& v) {
    tape.set_training(true, 77);
    return project(dropout(v[0], 0.3), 16);
  };
  EXPECT_LT(gradient_check(fn, {x}).max_relative_error, 1e-4);
}

TEST(Dropout, IdentityOutsideTraining) {
  Tape tape;
  auto x = tape.constant(Tensor::vector({1, 2, 3}));
  EXPECT_EQ(dropout(x, 0.5).id(), x.id());
}

TEST(Determinism, RepeatedEvaluationIsBitIdentical) {
  Rng a(42), b(42);
  const auto x1 = random_tensor(a, {5, 5});
  const auto x2 = random_tensor(b, {5, 5});
  ASSERT_EQ(x1, x2);
  EXPECT_EQ(softmax(matmul(x1, x1), 1), softmax(matmul(x2, x2), 1));
}

TEST(Adam, ZeroGradientLeavesParamsUnchanged) {
  std::vector<Tensor> params = {Tensor::vector({0.5, -1.25}), Tensor::matrix({{2.0}})};
  const auto before = params;
  std::vector<Tensor> grads = {Tensor::vector({0, 0}), Tensor::matrix({{0.0}})};
  AdamState state;
  adam_step(params, grads, state);
  EXPECT_EQ(params[0], before[0]);
  EXPECT_EQ(params[1], before[1]);
}

TEST(Adam, FirstStepMovesByLearningRateTimesSign) {
  for (double g : {0.3, -2.0, 1e-3}) {
    std::vector<Tensor> params = {Tensor::scalar(1.0)};
    std::vector<Tensor> grads = {Tensor::scalar(g)};
    AdamState state(AdamHyper{.learning_rate = 0.01});
    adam_step(params, grads, state);
    // m_hat / sqrt(v_hat) = g / |g| on the first step.
    EXPECT_NEAR(params[0].item(), 1.0 - 0.01 * (g > 0 ? 1.0 : -1.0), 1e-6);
  }
}

TEST(Adam, StepCounterCountsCalls) {
  std::vector<Tensor> params = {Tensor::scalar(1.0)};
  std::vector<Tensor> grads = {Tensor::scalar(0.5)};
  AdamState state;
  for (int i = 0; i < 7; ++i) adam_step(params, grads, state);
  EXPECT_EQ(state.steps(), 7u);
  EXPECT_EQ(state.first_moments()[0].shape(), params[0].shape());
}

TEST(Adam, ShapeMismatchRejected) {
  std::vector<Tensor> params = {Tensor::vector({1, 2})};
  std::vector<Tensor> grads = {Tensor::vector({1, 2, 3})};
  AdamState state;
  EXPECT_THROW(adam_step(params, grads, state), Error);
}

}  // namespace
}  // namespace copygen::numerics
