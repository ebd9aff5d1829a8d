#include <gtest/gtest.h>

#include "emoadapt/checkpoint.hpp"
#include "emoadapt/error.hpp"
#include "emoadapt/glyph.hpp"
#include "emoadapt/intersection.hpp"
#include "eigen_oracles.hpp"
#include "oracles.hpp"

using namespace emoadapt;

namespace {

using oracle::clusters;

TEST(ClassStats, Examples) {
  // Class 0 is {(0,0,0),(2,0,0)}; the rest are filler.
  Tensor<double> proj({8, 3}, {0, 0, 0, 2, 0, 0, 5, 5, 5, 5, 5, 5, 1, 1, 1, 3, 3, 3, 7, 7, 7, 7, 7, 7});
  auto s = class_stats(proj, {0, 0, 1, 1, 2, 2, 3, 3});
  EXPECT_EQ(s.mean[0][0], 1.0);
  EXPECT_EQ(s.sigma[0][0], 1.0);
  EXPECT_EQ(s.mean[0][1], 0.0);
  EXPECT_EQ(s.sigma[0][1], 0.0);
  EXPECT_EQ(s.sigma[0][2], 0.0);
  for (int m = 0; m < 3; ++m) EXPECT_EQ(s.sigma[1][m], 0.0);  // repeated point
  EXPECT_EQ(s.count[2], 2u);
}

TEST(ClassStats, MissingOrSingletonClassRejected) {
  Tensor<double> proj({4, 3});
  EXPECT_THROW(class_stats(proj, {0, 0, 1, 1}), DataError);
  EXPECT_THROW(class_stats(Tensor<double>({5, 3}), {0, 0, 1, 2, 3}), DataError);
  EXPECT_THROW(class_stats(Tensor<double>({4, 2}), {0, 1, 2, 3}), ShapeError);
}

TEST(ClassStats, MatchesTwoPassOracle) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> lab(0, 3);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 8 + trial % 40;
    auto proj = oracle::random_tensor<double>({n, 3}, rng, -50, 50);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = i < 8 ? static_cast<int>(i % 4) : lab(rng);
    auto s = class_stats(proj, labels);
    auto ref = oracle::class_moments(proj, labels);
    for (int c = 0; c < 4; ++c)
      for (int m = 0; m < 3; ++m) {
        EXPECT_NEAR(s.mean[c][m], ref.mean[c][m], 1e-12 * (1 + std::abs(ref.mean[c][m])));
        EXPECT_NEAR(s.sigma[c][m], ref.sigma[c][m], 1e-12 * (1 + ref.sigma[c][m]));
      }
  }
}

TEST(Ranges, Examples) {
  ClassComponentStats s;
  s.mean[0][0] = 0, s.sigma[0][0] = 1;
  s.mean[1][1] = 3, s.sigma[1][1] = 0;
  s.mean[2][2] = 5, s.sigma[2][2] = 0.5;
  auto r = ranges(s);
  EXPECT_EQ(r.range[0][0].lo, -2.0);
  EXPECT_EQ(r.range[0][0].hi, 2.0);
  EXPECT_EQ(r.range[1][1].lo, 3.0);
  EXPECT_EQ(r.range[1][1].hi, 3.0);
  EXPECT_EQ(r.range[2][2].lo, 4.0);
  EXPECT_EQ(r.range[2][2].hi, 6.0);
}

TEST(PairOverlap, Examples) {
  EXPECT_EQ(pair_overlap({0, 1}, {0, 1}), 1.0);
  EXPECT_EQ(pair_overlap({0, 1}, {2, 3}), 0.0);
  EXPECT_EQ(pair_overlap({0, 2}, {1, 3}), 1.0 / 3.0);
  EXPECT_EQ(pair_overlap({4, 4}, {4, 4}), 1.0);
  EXPECT_EQ(pair_overlap({4, 4}, {5, 5}), 0.0);
  EXPECT_EQ(pair_overlap({0, 4}, {1, 2}), 0.25);
}

TEST(TotalPair, Examples) {
  EXPECT_EQ(total_pair(1, 1, 1), 1.0);
  EXPECT_EQ(total_pair(0.5, 0.5, 0.5), 0.125);
  EXPECT_EQ(total_pair(0.7, 0, 0.9), 0.0);
}

TEST(IntersectionAlgebra, RandomIntervalProperties) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-10, 10), w(0, 5);
  for (int trial = 0; trial < 1000; ++trial) {
    Interval a{u(rng), 0}, b{u(rng), 0};
    a.hi = a.lo + (trial % 10 == 0 ? 0.0 : w(rng));
    b.hi = b.lo + w(rng);
    const double ab = pair_overlap(a, b), ba = pair_overlap(b, a);
    ASSERT_EQ(ab, ba);
    ASSERT_GE(ab, 0.0);
    ASSERT_LE(ab, 1.0);
    ASSERT_EQ(pair_overlap(a, a), 1.0);
    Interval far{b.hi + 1 + w(rng), 0};
    far.hi = far.lo + w(rng);
    ASSERT_EQ(pair_overlap(b, far), 0.0);
    const double c = std::pow(2.0, std::uniform_int_distribution<int>(-4, 4)(rng));
    ASSERT_EQ(pair_overlap({a.lo * c, a.hi * c}, {b.lo * c, b.hi * c}), ab);
  }
}

TEST(IntersectionScore, DisjointAndIdenticalClusters) {
  std::mt19937_64 rng(9);
  EmbeddingDump sep;
  std::normal_distribution<double> n(0, 0.1);
  for (int c = 0; c < 4; ++c)
    for (int i = 0; i < 10; ++i) sep.labels.push_back(c);
  sep.matrix = Tensor<double>({40, 5});
  for (std::size_t i = 0; i < 40; ++i)
    for (std::size_t d = 0; d < 5; ++d) sep.matrix[i * 5 + d] = (d == 0 ? 100.0 * sep.labels[i] : 0.0) + n(rng);
  EXPECT_EQ(intersection_score(sep, ScoreMode::off_diagonal), 0.0);
  EXPECT_EQ(intersection_score(sep, ScoreMode::paper_literal), 4.0);

  EmbeddingDump same;
  auto cloud = oracle::random_tensor<double>({10, 6}, rng);
  same.matrix = Tensor<double>({40, 6});
  for (int c = 0; c < 4; ++c)
    for (std::size_t i = 0; i < 10; ++i) {
      same.labels.push_back(c);
      for (std::size_t d = 0; d < 6; ++d) same.matrix[(c * 10 + i) * 6 + d] = cloud[i * 6 + d];
    }
  EXPECT_NEAR(intersection_score(same, ScoreMode::off_diagonal), 12.0, 1e-12);
  EXPECT_NEAR(intersection_score(same, ScoreMode::paper_literal), 16.0, 1e-12);
}

TEST(IntersectionScore, MatchesPipelineOracle) {
  std::mt19937_64 rng(10);
  std::uniform_int_distribution<std::size_t> per(3, 25), dims(3, 20);
  std::uniform_real_distribution<double> spread(0.2, 3.0);
  for (int trial = 0; trial < 100; ++trial) {
    auto dump = clusters(per(rng), dims(rng), spread(rng), rng);
    auto got = analyze_layer(dump);
    auto [literal, offdiag] = oracle::intersection_reference(dump);
    EXPECT_NEAR(got.c_literal, literal, 1e-9) << trial;
    EXPECT_NEAR(got.c_offdiag, offdiag, 1e-9) << trial;
    EXPECT_NEAR(got.c_literal - got.c_offdiag, 4.0, 1e-12);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) EXPECT_EQ(got.total[i][j], got.total[j][i]);
  }
}

TEST(IntersectionScore, ScaleAndTranslationInvariance) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::size_t> per(4, 15), dims(3, 12);
  std::uniform_real_distribution<double> spread(0.3, 2.0), shift(-100, 100), logscale(-3, 3);
  std::bernoulli_distribution flip(0.3);
  for (int trial = 0; trial < 1000; ++trial) {
    auto dump = clusters(per(rng), dims(rng), spread(rng), rng);
    const double base = intersection_score(dump);
    ASSERT_GE(base, 0.0);
    ASSERT_LE(base, 12.0);
    auto scaled = dump;
    const double c = std::exp(logscale(rng)) * (flip(rng) ? -1.0 : 1.0);
    std::vector<double> t(dump.matrix.dim(1));
    for (auto& v : t) v = shift(rng);
    for (std::size_t i = 0; i < scaled.matrix.dim(0); ++i)
      for (std::size_t d = 0; d < t.size(); ++d) {
        auto& v = scaled.matrix[i * t.size() + d];
        v = v * c + t[d];
      }
    ASSERT_NEAR(intersection_score(scaled), base, 1e-7) << "trial " << trial << " c=" << c;
  }
}

TEST(IntersectionScore, LiteralIncludesDiagonal) {
  std::mt19937_64 rng(12);
  auto dump = clusters(10, 6, 1.0, rng);
  auto l = analyze_layer(dump);
  for (int i = 0; i < 4; ++i) EXPECT_EQ(l.total[i][i], 1.0);
  EXPECT_DOUBLE_EQ(l.score(ScoreMode::paper_literal), l.c_offdiag + 4.0);
  EXPECT_EQ(parse_score_mode("paper-literal"), ScoreMode::paper_literal);
  EXPECT_THROW(parse_score_mode("diag"), ArgumentError);
}

TEST(IntersectionScore, ValidationErrors) {
  std::mt19937_64 rng(13);
  auto dump = clusters(5, 4, 1.0, rng);
  dump.labels.pop_back();
  EXPECT_THROW(analyze_layer(dump), ShapeError);
  dump = clusters(5, 4, 1.0, rng);
  dump.matrix[3] = std::nan("");
  EXPECT_THROW(analyze_layer(dump), NumericError);
  dump = clusters(5, 4, 1.0, rng);
  for (auto& l : dump.labels)
    if (l == 3) l = 2;
  EXPECT_THROW(analyze_layer(dump), DataError);
}

TEST(IntersectionScore, RankDeficientLayerIsFlagged) {
  EmbeddingDump d;
  d.matrix = Tensor<double>({8, 3});
  for (std::size_t i = 0; i < 8; ++i) {
    d.labels.push_back(static_cast<int>(i % 4));
    d.matrix[i * 3] = static_cast<double>(i % 4) * 10 + (i < 4 ? 0.1 : -0.1);
  }
  auto l = analyze_layer(d);
  EXPECT_TRUE(l.rank_deficient);
  EXPECT_EQ(l.c_offdiag, 0.0);
}

TEST(Report, CsvShapeAndArchiveRoundTrip) {
  std::mt19937_64 rng(14);
  std::vector<EmbeddingDump> dumps = {clusters(6, 5, 1.0, rng)};
  dumps.push_back(dumps[0]);
  dumps[0].layer = LayerTag::fc_1;
  dumps[1].layer = LayerTag::op;
  for (auto& v : dumps[1].matrix.data()) v *= 0.5;
  auto report = build_report(dumps);
  auto csv = report.to_csv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "layer,C_offdiag,C_literal,I_12,I_13,I_14,I_23,I_24,I_34");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
  EXPECT_EQ(csv.substr(csv.find('\n') + 1, 5), "fc-1,");
  EXPECT_THROW(report.at(LayerTag::conv_n), ArgumentError);

  auto back = embeddings_from_archive(decode_archive(encode_archive(embeddings_to_archive(dumps))));
  ASSERT_EQ(back.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(back[i].layer, dumps[i].layer);
    EXPECT_EQ(back[i].labels, dumps[i].labels);
    EXPECT_TRUE(bit_identical(back[i].matrix, dumps[i].matrix));
  }
}

TEST(LayerConvergence, UntrainedModelScoresAreBounded) {
  oracle::TempDir dir("conv");
  auto probe = generate_synthetic(Domain::target, 8, 3, dir.path()).dataset;
  ModelConfig c;
  auto ckpt = make_checkpoint(c, init_params<float>(c, 21), Phase::source, 0, 21);
  auto report = layer_convergence(ckpt, probe);
  ASSERT_EQ(report.layers.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(report.layers[i].layer, kAllLayers[i]);
    EXPECT_TRUE(std::isfinite(report.layers[i].c_offdiag));
    EXPECT_GE(report.layers[i].c_offdiag, 0.0);
    EXPECT_LE(report.layers[i].c_offdiag, 12.0);
  }
  auto small = generate_synthetic(Domain::target, 7, 3, dir.path(), "small").dataset;
  EXPECT_THROW(layer_convergence(ckpt, small), DataError);
}

}  // namespace
