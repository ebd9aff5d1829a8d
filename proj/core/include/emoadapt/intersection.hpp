#pragma once

// Intersection Score: how much the per-class spreads of a layer's embeddings
// overlap once projected onto their top three principal components.
//
// For each class i and component m the spread is [mean - 2 sigma, mean +
// 2 sigma]. Two spreads overlap by |intersection| / |hull| (I_ij(m)), the
// pair total I_ij is the product over the three components, and C sums I_ij
// over class pairs. Lower C means better separated classes.

#include <array>
#include <string>
#include <vector>

#include "emoadapt/checkpoint.hpp"
#include "emoadapt/dataset.hpp"
#include "emoadapt/model.hpp"
#include "emoadapt/pca.hpp"

namespace emoadapt {

inline constexpr std::size_t kComponents = 3;

struct EmbeddingDump {
  LayerTag layer = LayerTag::op;
  Tensor<double> matrix;  // [samples,dims]
  std::vector<int> labels;

  std::array<std::size_t, kNumClasses> class_counts() const;
  // One in-range label per finite row.
  void validate_rows() const;
  // validate_rows plus at least 2 rows per class.
  void validate() const;
};

template <typename V>
using PerClass = std::array<std::array<V, kComponents>, kNumClasses>;

struct ClassComponentStats {
  PerClass<double> mean{};
  PerClass<double> sigma{};  // population standard deviation
  std::array<std::size_t, kNumClasses> count{};
};

ClassComponentStats class_stats(const Tensor<double>& projection, const std::vector<int>& labels);

struct Interval {
  double lo = 0.0, hi = 0.0;
};

struct ComponentRanges {
  PerClass<Interval> range{};
};

ComponentRanges ranges(const ClassComponentStats& stats);

// Overlap ratio of two closed intervals in [0,1]. When both are the same
// single point the ratio is 1; distinct single points give 0.
double pair_overlap(Interval a, Interval b);
double total_pair(double ix, double iy, double iz);

enum class ScoreMode { paper_literal, off_diagonal };
ScoreMode parse_score_mode(std::string_view name);

template <typename V>
using PairMatrix = std::array<std::array<V, kNumClasses>, kNumClasses>;

struct LayerIntersection {
  LayerTag layer = LayerTag::op;
  std::array<double, 3> eigenvalues{};
  bool rank_deficient = false;
  ClassComponentStats stats;
  ComponentRanges ranges;
  PairMatrix<std::array<double, kComponents>> component{};  // I_ij(m)
  PairMatrix<double> total{};                                // I_ij
  double c_literal = 0.0;  // all (i,j) including i == j
  double c_offdiag = 0.0;  // i != j only

  double score(ScoreMode mode) const { return mode == ScoreMode::paper_literal ? c_literal : c_offdiag; }
};

LayerIntersection analyze_layer(const EmbeddingDump& dump);
double intersection_score(const EmbeddingDump& dump, ScoreMode mode = ScoreMode::off_diagonal);

struct IntersectionReport {
  std::vector<LayerIntersection> layers;  // in capture order

  // `layer,C_offdiag,C_literal,I_12,I_13,I_14,I_23,I_24,I_34`
  std::string to_csv() const;
  const LayerIntersection& at(LayerTag tag) const;
};

IntersectionReport build_report(const std::vector<EmbeddingDump>& dumps);

// Batched inference capturing the requested layers for every sample.
std::vector<EmbeddingDump> capture_embeddings(const ModelConfig& config, const ModelParams<float>& params,
                                              const Dataset& probe, const std::vector<LayerTag>& layers,
                                              std::size_t batch_size = 64);

// Captures [conv-n, fc-1, fc-2, fc-3, op] on the probe set and scores each.
// The probe set needs every class with at least 8 samples.
IntersectionReport layer_convergence(const Checkpoint& checkpoint, const Dataset& probe);

// Dumps <-> tensor container: one `emb.<tag>` f64 matrix per layer plus a
// `labels` f64 vector.
TensorArchive embeddings_to_archive(const std::vector<EmbeddingDump>& dumps);
std::vector<EmbeddingDump> embeddings_from_archive(const TensorArchive& archive);

}  // namespace emoadapt
