#include "emoadapt/eval.hpp"

#include <json.hpp>

#include "emoadapt/io.hpp"

namespace emoadapt {

template <typename T>
std::vector<int> argmax_rows(const Tensor<T>& probs) {
  if (probs.rank() != 2) throw ShapeError("argmax_rows: expected [N,K], got " + shape_to_string(probs.shape()));
  const std::size_t n = probs.dim(0), k = probs.dim(1);
  std::vector<int> out(n);
  for (std::size_t r = 0; r < n; ++r) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < k; ++c)
      if (probs[r * k + c] > probs[r * k + best]) best = c;
    out[r] = static_cast<int>(best);
  }
  return out;
}

template std::vector<int> argmax_rows(const Tensor<float>&);
template std::vector<int> argmax_rows(const Tensor<double>&);

std::size_t ConfusionMatrix::total() const {
  std::size_t n = 0;
  for (const auto& row : counts)
    for (std::size_t v : row) n += v;
  return n;
}

std::size_t ConfusionMatrix::trace() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < kNumClasses; ++i) n += counts[i][i];
  return n;
}

std::size_t ConfusionMatrix::row_sum(std::size_t true_class) const {
  std::size_t n = 0;
  for (std::size_t v : counts.at(true_class)) n += v;
  return n;
}

double ConfusionMatrix::accuracy() const {
  const std::size_t n = total();
  return n ? static_cast<double>(trace()) / static_cast<double>(n) : 0.0;
}

double ConfusionMatrix::recall(std::size_t c) const {
  const std::size_t n = row_sum(c);
  return n ? static_cast<double>(counts[c][c]) / static_cast<double>(n) : 0.0;
}

ConfusionMatrix confusion_matrix(const std::vector<int>& truth, const std::vector<int>& predicted) {
  if (truth.size() != predicted.size()) throw ShapeError("confusion_matrix: label/prediction count mismatch");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] < 0 || truth[i] >= static_cast<int>(kNumClasses) || predicted[i] < 0 ||
        predicted[i] >= static_cast<int>(kNumClasses)) {
      throw DataError("confusion_matrix: class index out of range");
    }
    ++cm.counts[static_cast<std::size_t>(truth[i])][static_cast<std::size_t>(predicted[i])];
  }
  return cm;
}

EvalResult evaluate(const ModelConfig& config, const ModelParams<float>& params, const Dataset& dataset,
                    std::size_t batch_size) {
  if (dataset.empty()) throw DataError("evaluate: dataset is empty");
  std::vector<int> predicted;
  predicted.reserve(dataset.size());
  for (std::size_t start = 0; start < dataset.size(); start += batch_size) {
    std::vector<std::size_t> idx;
    for (std::size_t i = start; i < std::min(dataset.size(), start + batch_size); ++i) idx.push_back(i);
    auto pred = argmax_rows(forward(config, params, stack_images(dataset, idx), false, 0));
    predicted.insert(predicted.end(), pred.begin(), pred.end());
  }
  EvalResult r;
  r.confusion = confusion_matrix(labels_of(dataset), predicted);
  r.accuracy = r.confusion.accuracy();
  for (std::size_t c = 0; c < kNumClasses; ++c) r.recall[c] = r.confusion.recall(c);
  return r;
}

EvalResult evaluate(const Checkpoint& checkpoint, const Dataset& dataset) {
  return evaluate(checkpoint.model_config(), checkpoint.params, dataset);
}

std::string confusion_csv(const ConfusionMatrix& cm) {
  std::string out = "true\\pred";
  for (auto name : kClassNames) out += ',' + std::string(name);
  out += '\n';
  for (std::size_t i = 0; i < kNumClasses; ++i) {
    out += kClassNames[i];
    for (std::size_t j = 0; j < kNumClasses; ++j) out += ',' + std::to_string(cm.counts[i][j]);
    out += '\n';
  }
  return out;
}

std::string metrics_json(const EvalResult& result) {
  nlohmann::ordered_json j;
  j["accuracy"] = result.accuracy;
  nlohmann::ordered_json recall;
  for (std::size_t c = 0; c < kNumClasses; ++c) recall[std::string(kClassNames[c])] = result.recall[c];
  j["per_class_recall"] = recall;
  j["samples"] = result.confusion.total();
  return j.dump(2) + "\n";
}

std::string export_embedding_plot(const EmbeddingDump& dump) {
  dump.validate_rows();
  Pca3 pca = pca3(dump.matrix);
  std::string out = "sample_id,label,x,y,z\n";
  for (std::size_t i = 0; i < dump.labels.size(); ++i) {
    out += std::to_string(i) + ',' + std::string(kClassNames.at(static_cast<std::size_t>(dump.labels[i])));
    for (std::size_t m = 0; m < 3; ++m) out += ',' + format_double(pca.projection[i * 3 + m]);
    out += '\n';
  }
  return out;
}

}  // namespace emoadapt
