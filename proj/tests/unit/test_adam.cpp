#include <gtest/gtest.h>

#include "emoadapt/adam.hpp"
#include "emoadapt/error.hpp"
#include "oracles.hpp"

using namespace emoadapt;

namespace {

struct ScalarAdam {
  double lr = 1e-3, b1 = 0.9, b2 = 0.999, eps = 1e-8;
  double m = 0, v = 0;
  int t = 0;
  double step(double w, double g) {
    ++t;
    m = b1 * m + (1 - b1) * g;
    v = b2 * v + (1 - b2) * g * g;
    const double mh = m / (1 - std::pow(b1, t));
    const double vh = v / (1 - std::pow(b2, t));
    return w - lr * mh / (std::sqrt(vh) + eps);
  }
};

ModelParams<double> scalar_param(double w) { return {{"w", Tensor<double>({1}, w)}}; }

TEST(Adam, FirstStepIsMinusLr) {
  auto p = scalar_param(0.0);
  AdamState<double> s;
  adam_step(p, {{"w", Tensor<double>({1}, 1.0)}}, s);
  EXPECT_NEAR(p.at("w")[0], -9.999e-4, 1e-7);
  EXPECT_NEAR(p.at("w")[0], -1e-3 / (1 + 1e-8), 1e-15);
  EXPECT_EQ(s.step, 1u);
}

TEST(Adam, ZeroGradientLeavesParamsButCountsStep) {
  auto p = scalar_param(0.75);
  AdamState<double> s;
  adam_step(p, {{"w", Tensor<double>({1}, 0.0)}}, s);
  EXPECT_EQ(p.at("w")[0], 0.75);
  EXPECT_EQ(s.step, 1u);
}

TEST(Adam, MatchesScalarOracle) {
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int trial = 0; trial < 100; ++trial) {
    double w0 = u(rng);
    auto p = scalar_param(w0);
    AdamState<double> s;
    ScalarAdam o;
    double w = w0;
    const int steps = 1 + trial % 7;
    const double g_const = u(rng);
    for (int i = 0; i < steps; ++i) {
      const double g = trial % 2 ? g_const : u(rng);
      adam_step(p, {{"w", Tensor<double>({1}, g)}}, s);
      w = o.step(w, g);
    }
    EXPECT_NEAR(p.at("w")[0], w, 1e-12) << "trial " << trial;
  }
}

TEST(Adam, TwoConstantSteps) {
  auto p = scalar_param(0.3);
  AdamState<double> s;
  ScalarAdam o;
  double w = 0.3;
  for (int i = 0; i < 2; ++i) {
    adam_step(p, {{"w", Tensor<double>({1}, 0.5)}}, s);
    w = o.step(w, 0.5);
  }
  EXPECT_NEAR(p.at("w")[0], w, 1e-12);
}

TEST(Adam, LearningRateZeroIsNoOp) {
  std::mt19937_64 rng(45);
  ModelParams<float> p = {{"a", oracle::random_tensor<float>({3, 2}, rng)}, {"b", oracle::random_tensor<float>({4}, rng)}};
  auto before = p;
  AdamState<float> s;
  s.lr = 0;
  for (int i = 0; i < 3; ++i) {
    adam_step(p, {{"a", oracle::random_tensor<float>({3, 2}, rng)}, {"b", oracle::random_tensor<float>({4}, rng)}}, s);
  }
  for (auto& [name, t] : p) EXPECT_TRUE(bit_identical(t, before.at(name))) << name;
}

TEST(Adam, MissingGradientNamesParameter) {
  ModelParams<float> p = {{"conv1", Tensor<float>({1}, 0.f)}, {"fc3.b", Tensor<float>({1}, 0.f)}};
  AdamState<float> s;
  try {
    adam_step(p, {{"conv1", Tensor<float>({1}, 1.f)}}, s);
    FAIL();
  } catch (const ArgumentError& e) {
    EXPECT_NE(std::string(e.what()).find("fc3.b"), std::string::npos);
  }
}

TEST(Adam, GradientShapeMismatch) {
  ModelParams<float> p = {{"w", Tensor<float>({2}, 0.f)}};
  AdamState<float> s;
  EXPECT_THROW(adam_step(p, {{"w", Tensor<float>({3}, 1.f)}}, s), ShapeError);
}

}  // namespace
