#include "emoadapt/model.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "emoadapt/digest.hpp"

namespace emoadapt {

std::optional<int> class_index(std::string_view name) {
  for (std::size_t i = 0; i < kClassNames.size(); ++i)
    if (kClassNames[i] == name) return static_cast<int>(i);
  return std::nullopt;
}

std::size_t ModelConfig::pooled_size() const {
  return (input_size - 2 * (kKernel - 1)) / 2;
}

std::size_t ModelConfig::flat_features() const {
  return conv2_filters * pooled_size() * pooled_size();
}

void ModelConfig::validate() const {
  if (input_size < 2 * (kKernel - 1) + 2) throw ConfigError("model.input_size too small: " + std::to_string(input_size));
  if ((input_size - 2 * (kKernel - 1)) % 2 != 0) {
    throw ConfigError("model.input_size must leave an even map for 2x2 pooling, got " + std::to_string(input_size));
  }
  if (conv1_filters == 0 || conv2_filters == 0 || fc1_units == 0 || fc2_units == 0) {
    throw ConfigError("model layer widths must be positive");
  }
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
    throw ConfigError("model.dropout must be in [0, 1), got " + std::to_string(dropout_rate));
  }
  if (attention && attention_hidden == 0) throw ConfigError("model.attention_hidden must be positive");
}

std::string ModelConfig::canonical_text() const {
  std::ostringstream os;
  os.precision(17);
  os << "model.attention=" << (attention ? "true" : "false") << '\n'
     << "model.attention_hidden=" << attention_hidden << '\n'
     << "model.conv1_filters=" << conv1_filters << '\n'
     << "model.conv2_filters=" << conv2_filters << '\n'
     << "model.dropout=" << dropout_rate << '\n'
     << "model.fc1_units=" << fc1_units << '\n'
     << "model.fc2_units=" << fc2_units << '\n'
     << "model.input_size=" << input_size << '\n';
  return os.str();
}

std::string ModelConfig::digest() const { return sha256_hex(canonical_text()); }

std::string_view layer_name(LayerTag tag) {
  switch (tag) {
    case LayerTag::conv_n: return "conv-n";
    case LayerTag::fc_1: return "fc-1";
    case LayerTag::fc_2: return "fc-2";
    case LayerTag::fc_3: return "fc-3";
    case LayerTag::op: return "op";
  }
  return "?";
}

LayerTag parse_layer(std::string_view name) {
  for (LayerTag tag : kAllLayers)
    if (layer_name(tag) == name) return tag;
  throw ArgumentError("unknown layer tag '" + std::string(name) + "'");
}

std::map<std::string, Shape> param_shapes(const ModelConfig& c) {
  constexpr std::size_t k = ModelConfig::kKernel;
  std::map<std::string, Shape> shapes;
  if (c.attention) {
    shapes["attn.conv1"] = {c.attention_hidden, 1, k, k};
    shapes["attn.conv2"] = {1, c.attention_hidden, k, k};
  }
  shapes["conv1"] = {c.conv1_filters, 1, k, k};
  shapes["conv2"] = {c.conv2_filters, c.conv1_filters, k, k};
  shapes["fc1.w"] = {c.flat_features(), c.fc1_units};
  shapes["fc1.b"] = {c.fc1_units};
  shapes["fc2.w"] = {c.fc1_units, c.fc2_units};
  shapes["fc2.b"] = {c.fc2_units};
  shapes["fc3.w"] = {c.fc2_units, kNumClasses};
  shapes["fc3.b"] = {kNumClasses};
  return shapes;
}

template <typename T>
ModelParams<T> init_params(const ModelConfig& config, std::uint64_t seed) {
  config.validate();
  ModelParams<T> params;
  for (const auto& [name, shape] : param_shapes(config)) {
    Tensor<T> t(shape, T{0});
    if (shape.size() > 1) {
      std::size_t fan_in, fan_out;
      if (shape.size() == 4) {
        fan_in = shape[1] * shape[2] * shape[3];
        fan_out = shape[0] * shape[2] * shape[3];
      } else {
        fan_in = shape[0];
        fan_out = shape[1];
      }
      const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
      std::mt19937_64 rng(derive_seed(seed, "init/" + name));
      for (auto& v : t.data()) {
        double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        v = static_cast<T>(bound * (2.0 * u - 1.0));
      }
    }
    params.emplace(name, std::move(t));
  }
  return params;
}

template <typename T>
void check_params(const ModelConfig& config, const ModelParams<T>& params) {
  auto shapes = param_shapes(config);
  for (const auto& [name, shape] : shapes) {
    auto it = params.find(name);
    if (it == params.end()) throw ShapeError("missing parameter '" + name + "'");
    if (it->second.shape() != shape) {
      throw ShapeError("parameter '" + name + "' has shape " + shape_to_string(it->second.shape()) + ", expected " +
                       shape_to_string(shape));
    }
  }
  for (const auto& [name, t] : params) {
    if (!shapes.count(name)) throw ShapeError("unexpected parameter '" + name + "'");
  }
}

template <typename T>
std::map<std::string, Var<T>> as_leaves(const ModelParams<T>& params, bool requires_grad) {
  std::map<std::string, Var<T>> out;
  for (const auto& [name, t] : params) out.emplace(name, leaf(t, requires_grad));
  return out;
}

namespace {

template <typename T>
const Var<T>& param(const std::map<std::string, Var<T>>& params, const std::string& name) {
  auto it = params.find(name);
  if (it == params.end()) throw ShapeError("missing parameter '" + name + "'");
  return it->second;
}

template <typename T>
Tensor<T> flatten_rows(const Tensor<T>& t) {
  std::size_t n = t.dim(0);
  return t.reshaped({n, t.size() / n});
}

}  // namespace

template <typename T>
ForwardResult<T> forward_graph(const ModelConfig& config, const std::map<std::string, Var<T>>& params,
                               const Tensor<T>& batch, bool training, std::uint64_t dropout_seed,
                               const std::set<LayerTag>& capture) {
  const std::size_t s = config.input_size;
  if (batch.rank() != 4 || batch.dim(1) != 1 || batch.dim(2) != s || batch.dim(3) != s) {
    throw ShapeError("model input must be [N,1," + std::to_string(s) + "," + std::to_string(s) + "], got " +
                     shape_to_string(batch.shape()));
  }
  const std::size_t n = batch.dim(0);
  ForwardResult<T> result;
  auto want = [&](LayerTag tag) { return capture.count(tag) > 0; };

  Var<T> x = constant(batch);
  if (config.attention) {
    Var<T> hidden = relu(conv2d(x, param(params, "attn.conv1"), 1));
    result.mask = sigmoid(conv2d(hidden, param(params, "attn.conv2"), 1));
    x = mul(x, result.mask);
  }
  Var<T> h = conv2d(x, param(params, "conv1"), 0);
  h = conv2d(h, param(params, "conv2"), 0);
  h = relu(maxpool2d(h));
  h = reshape(h, {n, config.flat_features()});
  if (want(LayerTag::conv_n)) result.captures[LayerTag::conv_n] = h.value();
  h = dropout(h, config.dropout_rate, dropout_seed, training);

  Var<T> f1 = dense(h, param(params, "fc1.w"), param(params, "fc1.b"));
  if (want(LayerTag::fc_1)) result.captures[LayerTag::fc_1] = f1.value();
  Var<T> f2 = dense(relu(f1), param(params, "fc2.w"), param(params, "fc2.b"));
  if (want(LayerTag::fc_2)) result.captures[LayerTag::fc_2] = f2.value();
  Var<T> f3 = dense(relu(f2), param(params, "fc3.w"), param(params, "fc3.b"));
  if (want(LayerTag::fc_3)) result.captures[LayerTag::fc_3] = f3.value();
  result.probs = softmax(f3);
  if (want(LayerTag::op)) result.captures[LayerTag::op] = result.probs.value();
  return result;
}

template <typename T>
Tensor<T> forward(const ModelConfig& config, const ModelParams<T>& params, const Tensor<T>& batch, bool training,
                  std::uint64_t dropout_seed) {
  auto leaves = as_leaves(params, false);
  return forward_graph(config, leaves, batch, training, dropout_seed).probs.value();
}

template <typename T>
EmbeddingForward<T> forward_with_embeddings(const ModelConfig& config, const ModelParams<T>& params,
                                            const Tensor<T>& batch, const std::set<LayerTag>& tags) {
  if (tags.empty()) throw ArgumentError("forward_with_embeddings: empty layer tag set");
  auto leaves = as_leaves(params, false);
  auto r = forward_graph(config, leaves, batch, false, 0, tags);
  EmbeddingForward<T> out;
  out.probs = r.probs.value();
  for (auto& [tag, t] : r.captures) out.embeddings.emplace(tag, flatten_rows(t));
  return out;
}

template <typename T>
Tensor<T> attention_mask(const ModelConfig& config, const ModelParams<T>& params, const Tensor<T>& batch) {
  if (!config.attention) throw ArgumentError("attention_mask: attention is disabled in this config");
  auto leaves = as_leaves(params, false);
  return forward_graph(config, leaves, batch, false, 0).mask.value();
}

#define EMOADAPT_INSTANTIATE(T)                                                                                  \
  template ModelParams<T> init_params<T>(const ModelConfig&, std::uint64_t);                                    \
  template void check_params(const ModelConfig&, const ModelParams<T>&);                                        \
  template std::map<std::string, Var<T>> as_leaves(const ModelParams<T>&, bool);                                \
  template ForwardResult<T> forward_graph(const ModelConfig&, const std::map<std::string, Var<T>>&,             \
                                          const Tensor<T>&, bool, std::uint64_t, const std::set<LayerTag>&);    \
  template Tensor<T> forward(const ModelConfig&, const ModelParams<T>&, const Tensor<T>&, bool, std::uint64_t); \
  template EmbeddingForward<T> forward_with_embeddings(const ModelConfig&, const ModelParams<T>&,               \
                                                       const Tensor<T>&, const std::set<LayerTag>&);            \
  template Tensor<T> attention_mask(const ModelConfig&, const ModelParams<T>&, const Tensor<T>&);

EMOADAPT_INSTANTIATE(float)
EMOADAPT_INSTANTIATE(double)

#undef EMOADAPT_INSTANTIATE

}  // namespace emoadapt
