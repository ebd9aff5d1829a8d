#include <gtest/gtest.h>

#include "emoadapt/error.hpp"
#include "emoadapt/loss.hpp"
#include "oracles.hpp"

using namespace emoadapt;

namespace {

double cls(const std::vector<ProbDist>& t, const std::vector<ProbDist>& p) {
  return classifier_loss(constant(to_batch<double>(t)), constant(to_batch<double>(p)), 1e-12).value()[0];
}

double disc(const std::vector<ProbDist>& a, const std::vector<ProbDist>& b) {
  return discrepancy_loss(constant(to_batch<double>(a)), constant(to_batch<double>(b))).value()[0];
}

TEST(ProbDist, Helpers) {
  EXPECT_TRUE(ProbDist::one_hot(2).on_simplex());
  EXPECT_EQ(ProbDist::one_hot(2).p[2], 1.0);
  EXPECT_TRUE(ProbDist::uniform().on_simplex());
  EXPECT_FALSE((ProbDist{{0.5, 0.6, 0, 0}}).on_simplex());
  EXPECT_THROW(ProbDist::one_hot(4), ArgumentError);
}

TEST(ClassifierLoss, Examples) {
  EXPECT_LE(cls({ProbDist::one_hot(0)}, {ProbDist::one_hot(0)}), 1e-11);
  EXPECT_NEAR(cls({ProbDist::one_hot(0)}, {ProbDist::uniform()}), std::log(4.0), 1e-15);
  EXPECT_NEAR(cls({ProbDist::one_hot(0)}, {ProbDist::uniform()}), 1.386294, 1e-6);
}

TEST(ClassifierLoss, ClampKeepsZeroProbabilityFinite) {
  const double v = cls({ProbDist::one_hot(1)}, {ProbDist::one_hot(0)});
  EXPECT_NEAR(v, -std::log(1e-12), 1e-9);
}

TEST(ClassifierLoss, BatchMatchesScalarOracle) {
  std::vector<ProbDist> t = {ProbDist::one_hot(3), ProbDist{{0.2, 0.3, 0.4, 0.1}}, ProbDist::one_hot(1)};
  std::vector<ProbDist> p = {ProbDist{{0.1, 0.1, 0.1, 0.7}}, ProbDist{{0.25, 0.25, 0.25, 0.25}},
                             ProbDist{{0.05, 0.8, 0.1, 0.05}}};
  double want = 0;
  for (std::size_t n = 0; n < 3; ++n) {
    double s = 0;
    for (std::size_t k = 0; k < 4; ++k) s -= t[n].p[k] * std::log(std::max(p[n].p[k], 1e-12));
    want += s;
  }
  EXPECT_NEAR(cls(t, p), want / 3, 1e-15);
}

TEST(ClassifierLoss, BatchMismatch) {
  EXPECT_THROW(cls({ProbDist::one_hot(0)}, {ProbDist::uniform(), ProbDist::uniform()}), ShapeError);
}

TEST(DiscrepancyLoss, Examples) {
  EXPECT_EQ(disc({ProbDist{{0.7, 0.1, 0.1, 0.1}}}, {ProbDist{{0.7, 0.1, 0.1, 0.1}}}), 0.0);
  EXPECT_DOUBLE_EQ(disc({ProbDist::one_hot(0)}, {ProbDist::one_hot(1)}), 0.5);
  EXPECT_NEAR(disc({ProbDist{{0.7, 0.1, 0.1, 0.1}}}, {ProbDist{{0.4, 0.3, 0.2, 0.1}}}), 0.15, 1e-15);
  EXPECT_THROW(disc({ProbDist::one_hot(0)}, {ProbDist::one_hot(0), ProbDist::one_hot(1)}), ShapeError);
}

TEST(DiscrepancyLoss, BatchMean) {
  EXPECT_DOUBLE_EQ(disc({ProbDist::one_hot(0), ProbDist::one_hot(2)}, {ProbDist::one_hot(1), ProbDist::one_hot(2)}),
                   0.25);
}

TEST(L2, ZeroAndAllOnes) {
  ModelConfig c;
  auto p = init_params<float>(c, 1);
  for (auto name : kFcWeightNames) p.at(std::string(name)) = Tensor<float>(p.at(std::string(name)).shape(), 0.0f);
  EXPECT_EQ(l2_regularizer(p), 0.0);
  for (auto name : kFcWeightNames) p.at(std::string(name)) = Tensor<float>(p.at(std::string(name)).shape(), 1.0f);
  EXPECT_EQ(l2_regularizer(p), 999680.0);
  EXPECT_EQ(l2_regularizer(as_leaves(p, false)).value()[0], 999680.0f);
}

TEST(L2, IgnoresBiasesAndConvs) {
  ModelConfig c;
  auto p = init_params<double>(c, 1);
  const double before = l2_regularizer(p);
  p.at("fc1.b") = Tensor<double>(p.at("fc1.b").shape(), 5.0);
  p.at("conv1") = Tensor<double>(p.at("conv1").shape(), 5.0);
  EXPECT_EQ(l2_regularizer(p), before);
}

TEST(L2, MatchesLoopOracle) {
  std::mt19937_64 rng(31);
  ModelConfig c = oracle::tiny_config();
  for (int trial = 0; trial < 20; ++trial) {
    ModelParams<double> p;
    for (auto& [name, shape] : param_shapes(c)) p.emplace(name, oracle::random_tensor<double>(shape, rng, -3, 3));
    double want = 0;
    for (auto name : kFcWeightNames)
      for (double v : p.at(std::string(name)).data()) want += v * v;
    EXPECT_NEAR(l2_regularizer(p), want, 1e-6 * want);
    EXPECT_NEAR(l2_regularizer(as_leaves(p, false)).value()[0], want, 1e-6 * want);
  }
}

TEST(L2, MissingFcWeightRejected) {
  ModelConfig c;
  auto p = init_params<float>(c, 1);
  p.erase("fc2.w");
  EXPECT_THROW(l2_regularizer(p), ShapeError);
  EXPECT_THROW(l2_regularizer(as_leaves(p, false)), ShapeError);
}

TEST(OverallLoss, WeightedSum) {
  LossConfig lc;
  lc.lambda = 0.1;
  EXPECT_DOUBLE_EQ(overall_loss(1.0, 0.5, 2.0, lc), 1.7);
  auto one = [](double v) { return constant(Tensor<double>({1}, v)); };
  EXPECT_DOUBLE_EQ(overall_loss(one(1.0), one(0.5), one(2.0), lc).value()[0], 1.7);
}

TEST(OverallLoss, AblationReducesToCrossEntropy) {
  LossConfig lc;
  lc.lambda = 0;
  lc.w_discrepancy = 0;
  EXPECT_EQ(overall_loss(0.8125, 0.3, 123.0, lc), 0.8125);
}

TEST(OverallLoss, NonFiniteTermNamed) {
  LossConfig lc;
  try {
    overall_loss(1.0, std::nan(""), 1.0, lc);
    FAIL();
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("discrepancy"), std::string::npos) << e.what();
  }
  try {
    overall_loss(1.0, 0.0, std::numeric_limits<double>::infinity(), lc);
    FAIL();
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("regular"), std::string::npos) << e.what();
  }
}

TEST(LossConfig, Validation) {
  LossConfig lc;
  EXPECT_NO_THROW(lc.validate());
  lc.lambda = -1;
  EXPECT_THROW(lc.validate(), ConfigError);
  lc = {};
  lc.epsilon_log = 0;
  EXPECT_THROW(lc.validate(), ConfigError);
}

}  // namespace
