#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "emoadapt/autograd.hpp"
#include "emoadapt/tensor.hpp"

namespace emoadapt {

inline constexpr std::size_t kNumClasses = 4;
inline constexpr std::array<std::string_view, kNumClasses> kClassNames = {"angry", "happy", "sad", "neutral"};

// Index of a class name, or nullopt for anything outside the four classes.
std::optional<int> class_index(std::string_view name);

// Architecture hyper-parameters. Kernels are 3x3 everywhere; the two feature
// convolutions are unpadded and the attention convolutions are zero-padded so
// the mask matches the input.
struct ModelConfig {
  std::size_t input_size = 48;
  std::size_t conv1_filters = 8;
  std::size_t conv2_filters = 16;
  std::size_t fc1_units = 128;
  std::size_t fc2_units = 64;
  double dropout_rate = 0.5;
  bool attention = true;
  std::size_t attention_hidden = 4;

  static constexpr std::size_t kKernel = 3;

  // Side of the pooled conv-n feature map (48 -> 46 -> 44 -> 22).
  std::size_t pooled_size() const;
  // Flattened conv-n width, i.e. the fc1 input dimension.
  std::size_t flat_features() const;
  // Throws ConfigError on inconsistent values.
  void validate() const;
  // key=value lines, sorted by key. Feeds the checkpoint config digest.
  std::string canonical_text() const;
  std::string digest() const;

  bool operator==(const ModelConfig&) const = default;
};

// Capture points of the forward pass, from the last conv block to the output.
enum class LayerTag { conv_n, fc_1, fc_2, fc_3, op };

inline constexpr std::array<LayerTag, 5> kAllLayers = {LayerTag::conv_n, LayerTag::fc_1, LayerTag::fc_2,
                                                       LayerTag::fc_3, LayerTag::op};

std::string_view layer_name(LayerTag tag);
LayerTag parse_layer(std::string_view name);

// Parameter tensors by name. std::map keeps the names sorted, which fixes
// the order every optimizer and serializer walks them in.
template <typename T>
using ModelParams = std::map<std::string, Tensor<T>>;

// FC weight names; the L2 regularizer covers exactly these.
inline constexpr std::array<std::string_view, 3> kFcWeightNames = {"fc1.w", "fc2.w", "fc3.w"};

// Expected shape for every parameter of a config.
std::map<std::string, Shape> param_shapes(const ModelConfig& config);

// Glorot-uniform weights, zero biases. Each tensor draws from its own stream
// derived from (seed, name).
template <typename T>
ModelParams<T> init_params(const ModelConfig& config, std::uint64_t seed);

// Throws ShapeError if names or shapes disagree with the config.
template <typename T>
void check_params(const ModelConfig& config, const ModelParams<T>& params);

template <typename T>
struct ForwardResult {
  Var<T> probs;                          // [N,4] softmax output
  Var<T> mask;                           // [N,1,S,S]; empty when attention is off
  std::map<LayerTag, Tensor<T>> captures;  // [N, width] per requested tag
};

// Full forward pass over leaf variables, so callers can backpropagate into
// params. dropout_seed only matters when training is true.
template <typename T>
ForwardResult<T> forward_graph(const ModelConfig& config, const std::map<std::string, Var<T>>& params,
                               const Tensor<T>& batch, bool training, std::uint64_t dropout_seed,
                               const std::set<LayerTag>& capture = {});

// Gradient-free convenience wrappers.
template <typename T>
Tensor<T> forward(const ModelConfig& config, const ModelParams<T>& params, const Tensor<T>& batch, bool training,
                  std::uint64_t dropout_seed);

template <typename T>
struct EmbeddingForward {
  Tensor<T> probs;
  std::map<LayerTag, Tensor<T>> embeddings;
};

// Inference-mode pass that also returns flattened activations per tag:
// conv-n after pool and ReLU, fc-1..fc-3 before their activation, op after
// softmax. Throws ArgumentError on an empty tag set.
template <typename T>
EmbeddingForward<T> forward_with_embeddings(const ModelConfig& config, const ModelParams<T>& params,
                                            const Tensor<T>& batch, const std::set<LayerTag>& tags);

// Attention mask for a batch, [N,1,S,S]. Requires attention enabled.
template <typename T>
Tensor<T> attention_mask(const ModelConfig& config, const ModelParams<T>& params, const Tensor<T>& batch);

template <typename T>
std::map<std::string, Var<T>> as_leaves(const ModelParams<T>& params, bool requires_grad);

}  // namespace emoadapt
