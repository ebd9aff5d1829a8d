#include "emoadapt/intersection.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "emoadapt/io.hpp"

namespace emoadapt {

std::array<std::size_t, kNumClasses> EmbeddingDump::class_counts() const {
  std::array<std::size_t, kNumClasses> n{};
  for (int l : labels) {
    if (l < 0 || l >= static_cast<int>(kNumClasses)) throw DataError("embedding label out of range");
    ++n[static_cast<std::size_t>(l)];
  }
  return n;
}

void EmbeddingDump::validate_rows() const {
  if (matrix.rank() != 2) throw ShapeError("embedding matrix must be [samples,dims]");
  if (matrix.dim(0) != labels.size()) {
    throw ShapeError("embedding dump has " + std::to_string(matrix.dim(0)) + " rows but " +
                     std::to_string(labels.size()) + " labels");
  }
  class_counts();
  if (!all_finite(matrix.data())) throw NumericError("embedding dump contains non-finite values");
}

void EmbeddingDump::validate() const {
  validate_rows();
  auto n = class_counts();
  for (std::size_t i = 0; i < kNumClasses; ++i) {
    if (n[i] < 2) {
      throw DataError("class '" + std::string(kClassNames[i]) + "' has " + std::to_string(n[i]) +
                      " samples in the " + std::string(layer_name(layer)) + " dump; need at least 2");
    }
  }
}

ClassComponentStats class_stats(const Tensor<double>& projection, const std::vector<int>& labels) {
  if (projection.rank() != 2 || projection.dim(1) != kComponents || projection.dim(0) != labels.size()) {
    throw ShapeError("class_stats: expected [samples,3] projection with one label per row");
  }
  ClassComponentStats s;
  for (int l : labels) {
    if (l < 0 || l >= static_cast<int>(kNumClasses)) throw DataError("class_stats: label out of range");
    ++s.count[static_cast<std::size_t>(l)];
  }
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    if (s.count[c] == 0) throw DataError("class_stats: class '" + std::string(kClassNames[c]) + "' is missing");
    if (s.count[c] < 2) throw DataError("class_stats: class '" + std::string(kClassNames[c]) + "' has one sample");
  }
  // Two passes: means, then squared deviations from them.
  for (std::size_t r = 0; r < labels.size(); ++r)
    for (std::size_t m = 0; m < kComponents; ++m)
      s.mean[static_cast<std::size_t>(labels[r])][m] += projection[r * kComponents + m];
  for (std::size_t c = 0; c < kNumClasses; ++c)
    for (std::size_t m = 0; m < kComponents; ++m) s.mean[c][m] /= static_cast<double>(s.count[c]);
  PerClass<double> sq{};
  for (std::size_t r = 0; r < labels.size(); ++r) {
    const auto c = static_cast<std::size_t>(labels[r]);
    for (std::size_t m = 0; m < kComponents; ++m) {
      const double d = projection[r * kComponents + m] - s.mean[c][m];
      sq[c][m] += d * d;
    }
  }
  for (std::size_t c = 0; c < kNumClasses; ++c)
    for (std::size_t m = 0; m < kComponents; ++m) s.sigma[c][m] = std::sqrt(sq[c][m] / static_cast<double>(s.count[c]));
  return s;
}

ComponentRanges ranges(const ClassComponentStats& stats) {
  ComponentRanges r;
  for (std::size_t c = 0; c < kNumClasses; ++c)
    for (std::size_t m = 0; m < kComponents; ++m)
      r.range[c][m] = {stats.mean[c][m] - 2.0 * stats.sigma[c][m], stats.mean[c][m] + 2.0 * stats.sigma[c][m]};
  return r;
}

double pair_overlap(Interval a, Interval b) {
  const double hull = std::max(a.hi, b.hi) - std::min(a.lo, b.lo);
  if (hull == 0.0) return 1.0;
  const double inter = std::max(std::min(a.hi, b.hi) - std::max(a.lo, b.lo), 0.0);
  return inter / hull;
}

double total_pair(double ix, double iy, double iz) { return ix * iy * iz; }

ScoreMode parse_score_mode(std::string_view name) {
  if (name == "paper-literal") return ScoreMode::paper_literal;
  if (name == "off-diagonal") return ScoreMode::off_diagonal;
  throw ArgumentError("unknown score mode '" + std::string(name) + "' (expected paper-literal or off-diagonal)");
}

LayerIntersection analyze_layer(const EmbeddingDump& dump) {
  dump.validate();
  Pca3 pca = pca3(dump.matrix);
  LayerIntersection out;
  out.layer = dump.layer;
  out.eigenvalues = pca.eigenvalues;
  out.rank_deficient = pca.rank_deficient();
  out.stats = class_stats(pca.projection, dump.labels);
  out.ranges = ranges(out.stats);
  for (std::size_t i = 0; i < kNumClasses; ++i) {
    for (std::size_t j = 0; j < kNumClasses; ++j) {
      for (std::size_t m = 0; m < kComponents; ++m)
        out.component[i][j][m] = pair_overlap(out.ranges.range[i][m], out.ranges.range[j][m]);
      out.total[i][j] = total_pair(out.component[i][j][0], out.component[i][j][1], out.component[i][j][2]);
      out.c_literal += out.total[i][j];
      if (i != j) out.c_offdiag += out.total[i][j];
    }
  }
  return out;
}

double intersection_score(const EmbeddingDump& dump, ScoreMode mode) { return analyze_layer(dump).score(mode); }

std::string IntersectionReport::to_csv() const {
  std::string out = "layer,C_offdiag,C_literal,I_12,I_13,I_14,I_23,I_24,I_34\n";
  for (const auto& l : layers) {
    out += std::string(layer_name(l.layer)) + ',' + format_double(l.c_offdiag) + ',' + format_double(l.c_literal);
    for (std::size_t i = 0; i < kNumClasses; ++i)
      for (std::size_t j = i + 1; j < kNumClasses; ++j) out += ',' + format_double(l.total[i][j]);
    out += '\n';
  }
  return out;
}

const LayerIntersection& IntersectionReport::at(LayerTag tag) const {
  for (const auto& l : layers)
    if (l.layer == tag) return l;
  throw ArgumentError("report has no layer '" + std::string(layer_name(tag)) + "'");
}

IntersectionReport build_report(const std::vector<EmbeddingDump>& dumps) {
  IntersectionReport report;
  report.layers.resize(dumps.size());
  for (std::size_t i = 0; i < dumps.size(); ++i) report.layers[i] = analyze_layer(dumps[i]);
  return report;
}

std::vector<EmbeddingDump> capture_embeddings(const ModelConfig& config, const ModelParams<float>& params,
                                              const Dataset& probe, const std::vector<LayerTag>& layers,
                                              std::size_t batch_size) {
  if (layers.empty()) throw ArgumentError("capture_embeddings: no layers requested");
  if (probe.empty()) throw DataError("capture_embeddings: probe dataset is empty");
  std::set<LayerTag> tags(layers.begin(), layers.end());
  std::map<LayerTag, std::vector<double>> rows;
  std::map<LayerTag, std::size_t> width;
  for (std::size_t start = 0; start < probe.size(); start += batch_size) {
    std::vector<std::size_t> idx;
    for (std::size_t i = start; i < std::min(probe.size(), start + batch_size); ++i) idx.push_back(i);
    auto fw = forward_with_embeddings(config, params, stack_images(probe, idx), tags);
    for (auto& [tag, t] : fw.embeddings) {
      width[tag] = t.dim(1);
      auto& dst = rows[tag];
      dst.insert(dst.end(), t.data().begin(), t.data().end());
    }
  }
  std::vector<EmbeddingDump> out;
  for (LayerTag tag : layers) {
    EmbeddingDump d;
    d.layer = tag;
    d.matrix = Tensor<double>({probe.size(), width.at(tag)}, rows.at(tag));
    d.labels = labels_of(probe);
    out.push_back(std::move(d));
  }
  return out;
}

IntersectionReport layer_convergence(const Checkpoint& checkpoint, const Dataset& probe) {
  std::array<std::size_t, kNumClasses> n{};
  for (const auto& s : probe.samples) ++n.at(static_cast<std::size_t>(s.label));
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    if (n[c] < 8) {
      throw DataError("probe set has " + std::to_string(n[c]) + " '" + std::string(kClassNames[c]) +
                      "' samples; need at least 8 per class");
    }
  }
  const ModelConfig config = checkpoint.model_config();
  std::vector<LayerTag> layers(kAllLayers.begin(), kAllLayers.end());
  return build_report(capture_embeddings(config, checkpoint.params, probe, layers));
}

TensorArchive embeddings_to_archive(const std::vector<EmbeddingDump>& dumps) {
  if (dumps.empty()) throw ArgumentError("no embedding dumps to store");
  TensorArchive archive;
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& d : dumps) {
    if (d.labels != dumps.front().labels) throw ArgumentError("embedding dumps disagree on labels");
    archive.tensors.emplace_back("emb." + std::string(layer_name(d.layer)), d.matrix);
    layers.push_back(layer_name(d.layer));
  }
  std::vector<double> labels(dumps.front().labels.begin(), dumps.front().labels.end());
  const std::size_t n = labels.size();
  archive.tensors.emplace_back("labels", Tensor<double>({n}, std::move(labels)));
  nlohmann::json meta = {{"kind", "embeddings"}, {"layers", layers}};
  archive.metadata_json = meta.dump();
  return archive;
}

std::vector<EmbeddingDump> embeddings_from_archive(const TensorArchive& archive) {
  const Tensor<double>* labels = nullptr;
  for (const auto& [name, any] : archive.tensors)
    if (name == "labels") labels = std::get_if<Tensor<double>>(&any);
  if (!labels) throw DataError("embedding archive has no f64 'labels' tensor");
  std::vector<int> label_ints;
  for (double v : labels->data()) label_ints.push_back(static_cast<int>(v));
  std::vector<EmbeddingDump> out;
  for (const auto& [name, any] : archive.tensors) {
    if (name.rfind("emb.", 0) != 0) continue;
    const auto* m = std::get_if<Tensor<double>>(&any);
    if (!m) throw DataError("embedding '" + name + "' is not f64");
    EmbeddingDump d;
    d.layer = parse_layer(name.substr(4));
    d.matrix = *m;
    d.labels = label_ints;
    out.push_back(std::move(d));
  }
  if (out.empty()) throw DataError("embedding archive has no emb.<layer> tensors");
  return out;
}

}  // namespace emoadapt
