#pragma once

#include <array>
#include <string>
#include <vector>

#include "emoadapt/checkpoint.hpp"
#include "emoadapt/dataset.hpp"
#include "emoadapt/intersection.hpp"

namespace emoadapt {

// Row-wise argmax; ties resolve to the lowest class index.
template <typename T>
std::vector<int> argmax_rows(const Tensor<T>& probs);

// Rows are true classes, columns predictions, both in kClassNames order.
struct ConfusionMatrix {
  std::array<std::array<std::size_t, kNumClasses>, kNumClasses> counts{};

  std::size_t total() const;
  std::size_t trace() const;
  std::size_t row_sum(std::size_t true_class) const;
  double accuracy() const;
  double recall(std::size_t true_class) const;  // 0 for an absent class
};

ConfusionMatrix confusion_matrix(const std::vector<int>& truth, const std::vector<int>& predicted);

struct EvalResult {
  double accuracy = 0.0;
  ConfusionMatrix confusion;
  std::array<double, kNumClasses> recall{};
};

EvalResult evaluate(const ModelConfig& config, const ModelParams<float>& params, const Dataset& dataset,
                    std::size_t batch_size = 64);
EvalResult evaluate(const Checkpoint& checkpoint, const Dataset& dataset);

// 4x4 CSV with a `true\pred` corner cell and class-name header row/column.
std::string confusion_csv(const ConfusionMatrix& cm);
// {"accuracy":..,"per_class_recall":{..},"samples":N}
std::string metrics_json(const EvalResult& result);

// `sample_id,label,x,y,z` rows of the pooled PCA projection.
std::string export_embedding_plot(const EmbeddingDump& dump);

}  // namespace emoadapt
