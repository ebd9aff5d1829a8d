#include "emoadapt/autograd.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "emoadapt/parallel.hpp"

namespace emoadapt {

template <typename T>
std::vector<T>& Node<T>::grad_buffer() {
  if (grad.empty()) grad.assign(value.size(), T{0});
  return grad;
}

template <typename T>
void Node<T>::accumulate(std::span<const T> g) {
  auto& buf = grad_buffer();
  for (std::size_t i = 0; i < buf.size(); ++i) buf[i] += g[i];
}

template <typename T>
Tensor<T> Var<T>::grad() const {
  if (node_->grad.empty()) return Tensor<T>(node_->value.shape(), T{0});
  return Tensor<T>(node_->value.shape(), node_->grad);
}

template <typename T>
Var<T> leaf(Tensor<T> value, bool requires_grad) {
  auto node = std::make_shared<Node<T>>();
  node->value = std::move(value);
  node->requires_grad = requires_grad;
  return Var<T>(std::move(node));
}

namespace {

template <typename T>
using NodePtr = std::shared_ptr<Node<T>>;

template <typename T>
NodePtr<T> make_node(Tensor<T> value, std::string_view op, std::vector<NodePtr<T>> inputs) {
  auto node = std::make_shared<Node<T>>();
  node->value = std::move(value);
  node->op = op;
  for (const auto& in : inputs) node->requires_grad = node->requires_grad || in->requires_grad;
  if (node->requires_grad) node->inputs = std::move(inputs);
  return node;
}

template <typename T>
void require_same_shape(const Var<T>& a, const Var<T>& b, std::string_view op) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shape mismatch " + shape_to_string(a.shape()) + " vs " +
                     shape_to_string(b.shape()));
  }
}

template <typename T>
void require_rank(const Var<T>& x, std::size_t rank, std::string_view op, std::string_view what) {
  if (x.shape().size() != rank) {
    throw ShapeError(std::string(op) + ": " + std::string(what) + " must have rank " + std::to_string(rank) +
                     ", got " + shape_to_string(x.shape()));
  }
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Elementwise unary op with derivative expressed through input and output.
template <typename T, typename F, typename D>
Var<T> unary(const Var<T>& x, std::string_view op, F f, D dfdx) {
  const auto& in = x.value();
  std::vector<T> out(in.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(in[i]);
  auto node = make_node<T>(Tensor<T>(in.shape(), std::move(out)), op, {x.node()});
  if (node->requires_grad) {
    node->backward = [dfdx](Node<T>& self) {
      auto& src = *self.inputs[0];
      if (!src.requires_grad) return;
      auto& g = src.grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * dfdx(src.value[i], self.value[i]);
    };
  }
  return Var<T>(node);
}

}  // namespace

template <typename T>
std::vector<Node<T>*> topological_order(const Var<T>& root) {
  std::vector<Node<T>*> order;
  std::unordered_set<Node<T>*> seen;
  // Iterative post-order DFS; each frame tracks the next input to visit.
  std::vector<std::pair<Node<T>*, std::size_t>> stack;
  stack.emplace_back(root.node().get(), 0);
  seen.insert(root.node().get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->inputs.size()) {
      Node<T>* child = node->inputs[next++].get();
      if (seen.insert(child).second) stack.emplace_back(child, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  return order;
}

template <typename T>
void backward(const Var<T>& loss) {
  if (!loss) throw ArgumentError("backward: empty loss variable");
  if (loss.value().size() != 1) {
    throw ShapeError("backward: loss must be a scalar, got shape " + shape_to_string(loss.shape()));
  }
  auto order = topological_order(loss);
  loss.node()->grad_buffer()[0] += T{1};
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node<T>* node = *it;
    if (!node->requires_grad) continue;
    if (node->backward && !node->grad.empty()) node->backward(*node);
  }
  for (Node<T>* node : order) {
    if (node->requires_grad && node->inputs.empty()) node->grad_buffer();
  }
}

// --- conv2d ------------------------------------------------------------------

template <typename T>
Var<T> conv2d(const Var<T>& input, const Var<T>& kernel, std::size_t padding) {
  require_rank(input, 4, "conv2d", "input");
  require_rank(kernel, 4, "conv2d", "kernel");
  const Shape& is = input.shape();
  const Shape& ks = kernel.shape();
  const std::size_t N = is[0], C = is[1], H = is[2], W = is[3];
  const std::size_t F = ks[0], KH = ks[2], KW = ks[3];
  if (ks[1] != C) {
    throw ShapeError("conv2d: kernel expects " + std::to_string(ks[1]) + " input channels, input " +
                     shape_to_string(is) + " has " + std::to_string(C));
  }
  if (KH > H + 2 * padding || KW > W + 2 * padding) {
    throw ShapeError("conv2d: kernel " + shape_to_string(ks) + " larger than padded input " + shape_to_string(is));
  }
  const std::size_t OH = H + 2 * padding - KH + 1;
  const std::size_t OW = W + 2 * padding - KW + 1;
  const auto P = static_cast<std::ptrdiff_t>(padding);

  // Valid output x range for kernel column kx: ix = ox + kx - P in [0, W).
  auto ox_range = [=](std::size_t kx) {
    std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, P - static_cast<std::ptrdiff_t>(kx));
    std::ptrdiff_t hi = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(OW),
                                                 static_cast<std::ptrdiff_t>(W) + P - static_cast<std::ptrdiff_t>(kx));
    return std::pair{lo, hi};
  };
  auto oy_range = [=](std::size_t ky) {
    std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, P - static_cast<std::ptrdiff_t>(ky));
    std::ptrdiff_t hi = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(OH),
                                                 static_cast<std::ptrdiff_t>(H) + P - static_cast<std::ptrdiff_t>(ky));
    return std::pair{lo, hi};
  };

  const T* x = input.value().data().data();
  const T* k = kernel.value().data().data();
  std::vector<T> out(N * F * OH * OW, T{0});
  parallel_for(N, [&](std::size_t n) {
    for (std::size_t f = 0; f < F; ++f) {
      T* o = out.data() + (n * F + f) * OH * OW;
      for (std::size_t c = 0; c < C; ++c) {
        const T* xc = x + (n * C + c) * H * W;
        for (std::size_t ky = 0; ky < KH; ++ky) {
          auto [y0, y1] = oy_range(ky);
          for (std::size_t kx = 0; kx < KW; ++kx) {
            auto [x0, x1] = ox_range(kx);
            const T w = k[((f * C + c) * KH + ky) * KW + kx];
            for (std::ptrdiff_t oy = y0; oy < y1; ++oy) {
              const T* row = xc + (oy + static_cast<std::ptrdiff_t>(ky) - P) * static_cast<std::ptrdiff_t>(W) +
                             static_cast<std::ptrdiff_t>(kx) - P;
              T* orow = o + oy * static_cast<std::ptrdiff_t>(OW);
              for (std::ptrdiff_t ox = x0; ox < x1; ++ox) orow[ox] += w * row[ox];
            }
          }
        }
      }
    }
  });

  auto node = make_node<T>(Tensor<T>({N, F, OH, OW}, std::move(out)), "conv2d", {input.node(), kernel.node()});
  if (node->requires_grad) {
    node->backward = [=](Node<T>& self) {
      auto& in_node = *self.inputs[0];
      auto& k_node = *self.inputs[1];
      const T* g = self.grad.data();
      const T* xv = in_node.value.data().data();
      const T* kv = k_node.value.data().data();
      if (in_node.requires_grad) {
        T* gx = in_node.grad_buffer().data();
        parallel_for(N, [&](std::size_t n) {
          for (std::size_t f = 0; f < F; ++f) {
            const T* go = g + (n * F + f) * OH * OW;
            for (std::size_t c = 0; c < C; ++c) {
              T* gxc = gx + (n * C + c) * H * W;
              for (std::size_t ky = 0; ky < KH; ++ky) {
                auto [y0, y1] = oy_range(ky);
                for (std::size_t kx = 0; kx < KW; ++kx) {
                  auto [x0, x1] = ox_range(kx);
                  const T w = kv[((f * C + c) * KH + ky) * KW + kx];
                  for (std::ptrdiff_t oy = y0; oy < y1; ++oy) {
                    T* row = gxc + (oy + static_cast<std::ptrdiff_t>(ky) - P) * static_cast<std::ptrdiff_t>(W) +
                             static_cast<std::ptrdiff_t>(kx) - P;
                    const T* grow = go + oy * static_cast<std::ptrdiff_t>(OW);
                    for (std::ptrdiff_t ox = x0; ox < x1; ++ox) row[ox] += w * grow[ox];
                  }
                }
              }
            }
          }
        });
      }
      if (k_node.requires_grad) {
        const std::size_t kn = F * C * KH * KW;
        // Per-sample partials reduced in sample order for determinism.
        std::vector<T> partial(N * kn, T{0});
        parallel_for(N, [&](std::size_t n) {
          T* pk = partial.data() + n * kn;
          std::vector<T> lanes(OW);
          for (std::size_t f = 0; f < F; ++f) {
            const T* go = g + (n * F + f) * OH * OW;
            for (std::size_t c = 0; c < C; ++c) {
              const T* xc = xv + (n * C + c) * H * W;
              for (std::size_t ky = 0; ky < KH; ++ky) {
                auto [y0, y1] = oy_range(ky);
                for (std::size_t kx = 0; kx < KW; ++kx) {
                  auto [x0, x1] = ox_range(kx);
                  std::fill(lanes.begin(), lanes.end(), T{0});
                  for (std::ptrdiff_t oy = y0; oy < y1; ++oy) {
                    const T* row = xc + (oy + static_cast<std::ptrdiff_t>(ky) - P) * static_cast<std::ptrdiff_t>(W) +
                                   static_cast<std::ptrdiff_t>(kx) - P;
                    const T* grow = go + oy * static_cast<std::ptrdiff_t>(OW);
                    for (std::ptrdiff_t ox = x0; ox < x1; ++ox) lanes[ox] += grow[ox] * row[ox];
                  }
                  T acc{0};
                  for (std::ptrdiff_t ox = x0; ox < x1; ++ox) acc += lanes[ox];
                  pk[((f * C + c) * KH + ky) * KW + kx] = acc;
                }
              }
            }
          }
        });
        auto& gk = k_node.grad_buffer();
        for (std::size_t n = 0; n < N; ++n)
          for (std::size_t i = 0; i < kn; ++i) gk[i] += partial[n * kn + i];
      }
    };
  }
  return Var<T>(node);
}

// --- maxpool2d ---------------------------------------------------------------

template <typename T>
Var<T> maxpool2d(const Var<T>& input) {
  require_rank(input, 4, "maxpool2d", "input");
  const Shape& s = input.shape();
  const std::size_t N = s[0], C = s[1], H = s[2], W = s[3];
  if (H % 2 != 0 || W % 2 != 0) {
    throw ShapeError("maxpool2d: spatial dims must be even, got " + shape_to_string(s));
  }
  const std::size_t OH = H / 2, OW = W / 2;
  const auto& x = input.value();
  std::vector<T> out(N * C * OH * OW);
  std::vector<std::size_t> argmax(out.size());
  for (std::size_t p = 0; p < N * C; ++p) {
    for (std::size_t oy = 0; oy < OH; ++oy) {
      for (std::size_t ox = 0; ox < OW; ++ox) {
        std::size_t base = p * H * W + 2 * oy * W + 2 * ox;
        const std::size_t cand[4] = {base, base + 1, base + W, base + W + 1};
        std::size_t best = cand[0];
        for (int i = 1; i < 4; ++i)
          if (x[cand[i]] > x[best]) best = cand[i];
        std::size_t o = (p * OH + oy) * OW + ox;
        out[o] = x[best];
        argmax[o] = best;
      }
    }
  }
  auto node = make_node<T>(Tensor<T>({N, C, OH, OW}, std::move(out)), "maxpool2d", {input.node()});
  if (node->requires_grad) {
    node->backward = [argmax = std::move(argmax)](Node<T>& self) {
      auto& g = self.inputs[0]->grad_buffer();
      for (std::size_t o = 0; o < argmax.size(); ++o) g[argmax[o]] += self.grad[o];
    };
  }
  return Var<T>(node);
}

// --- dense -------------------------------------------------------------------

template <typename T>
Var<T> dense(const Var<T>& input, const Var<T>& weight, const Var<T>& bias) {
  require_rank(input, 2, "dense", "input");
  require_rank(weight, 2, "dense", "weight");
  require_rank(bias, 1, "dense", "bias");
  const std::size_t N = input.shape()[0], D = input.shape()[1], M = weight.shape()[1];
  if (weight.shape()[0] != D) {
    throw ShapeError("dense: input " + shape_to_string(input.shape()) + " incompatible with weight " +
                     shape_to_string(weight.shape()));
  }
  if (bias.shape()[0] != M) {
    throw ShapeError("dense: bias " + shape_to_string(bias.shape()) + " incompatible with weight " +
                     shape_to_string(weight.shape()));
  }
  const T* x = input.value().data().data();
  const T* w = weight.value().data().data();
  const T* b = bias.value().data().data();
  std::vector<T> out(N * M, T{0});
  parallel_for(N, [&](std::size_t n) {
    T* o = out.data() + n * M;
    for (std::size_t d = 0; d < D; ++d) {
      const T xv = x[n * D + d];
      const T* wr = w + d * M;
      for (std::size_t m = 0; m < M; ++m) o[m] += xv * wr[m];
    }
    for (std::size_t m = 0; m < M; ++m) o[m] += b[m];
  });
  auto node = make_node<T>(Tensor<T>({N, M}, std::move(out)), "dense", {input.node(), weight.node(), bias.node()});
  if (node->requires_grad) {
    node->backward = [=](Node<T>& self) {
      auto& in_node = *self.inputs[0];
      auto& w_node = *self.inputs[1];
      auto& b_node = *self.inputs[2];
      const T* g = self.grad.data();
      const T* xv = in_node.value.data().data();
      const T* wv = w_node.value.data().data();
      if (in_node.requires_grad) {
        T* gx = in_node.grad_buffer().data();
        parallel_for(N, [&](std::size_t n) {
          const T* gn = g + n * M;
          for (std::size_t d = 0; d < D; ++d) {
            const T* wr = wv + d * M;
            T acc{0};
            for (std::size_t m = 0; m < M; ++m) acc += gn[m] * wr[m];
            gx[n * D + d] += acc;
          }
        });
      }
      if (w_node.requires_grad) {
        T* gw = w_node.grad_buffer().data();
        parallel_for(D, [&](std::size_t d) {
          T* row = gw + d * M;
          for (std::size_t n = 0; n < N; ++n) {
            const T xnd = xv[n * D + d];
            const T* gn = g + n * M;
            for (std::size_t m = 0; m < M; ++m) row[m] += xnd * gn[m];
          }
        });
      }
      if (b_node.requires_grad) {
        auto& gb = b_node.grad_buffer();
        for (std::size_t n = 0; n < N; ++n)
          for (std::size_t m = 0; m < M; ++m) gb[m] += g[n * M + m];
      }
    };
  }
  return Var<T>(node);
}

// --- elementwise -------------------------------------------------------------

template <typename T>
Var<T> relu(const Var<T>& x) {
  return unary(
      x, "relu", [](T v) { return v > T{0} ? v : T{0}; }, [](T in, T) { return in > T{0} ? T{1} : T{0}; });
}

template <typename T>
Var<T> sigmoid(const Var<T>& x) {
  return unary(
      x, "sigmoid", [](T v) { return T{1} / (T{1} + std::exp(-v)); },
      [](T, T out) { return out * (T{1} - out); });
}

template <typename T>
Var<T> abs(const Var<T>& x) {
  return unary(
      x, "abs", [](T v) { return std::abs(v); },
      [](T in, T) { return in > T{0} ? T{1} : (in < T{0} ? T{-1} : T{0}); });
}

template <typename T>
Var<T> square(const Var<T>& x) {
  return unary(
      x, "square", [](T v) { return v * v; }, [](T in, T) { return T{2} * in; });
}

template <typename T>
Var<T> log_clamped(const Var<T>& x, T floor) {
  return unary(
      x, "log_clamped", [floor](T v) { return std::log(std::max(v, floor)); },
      [floor](T in, T) { return in > floor ? T{1} / in : T{0}; });
}

template <typename T>
Var<T> scale(const Var<T>& x, T factor) {
  return unary(
      x, "scale", [factor](T v) { return v * factor; }, [factor](T, T) { return factor; });
}

template <typename T>
Var<T> add(const Var<T>& a, const Var<T>& b) {
  require_same_shape(a, b, "add");
  std::vector<T> out(a.value().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.value()[i] + b.value()[i];
  auto node = make_node<T>(Tensor<T>(a.shape(), std::move(out)), "add", {a.node(), b.node()});
  if (node->requires_grad) {
    node->backward = [](Node<T>& self) {
      for (auto& in : self.inputs)
        if (in->requires_grad) in->accumulate(self.grad);
    };
  }
  return Var<T>(node);
}

template <typename T>
Var<T> sub(const Var<T>& a, const Var<T>& b) {
  require_same_shape(a, b, "sub");
  std::vector<T> out(a.value().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.value()[i] - b.value()[i];
  auto node = make_node<T>(Tensor<T>(a.shape(), std::move(out)), "sub", {a.node(), b.node()});
  if (node->requires_grad) {
    node->backward = [](Node<T>& self) {
      if (self.inputs[0]->requires_grad) self.inputs[0]->accumulate(self.grad);
      if (self.inputs[1]->requires_grad) {
        auto& g = self.inputs[1]->grad_buffer();
        for (std::size_t i = 0; i < g.size(); ++i) g[i] -= self.grad[i];
      }
    };
  }
  return Var<T>(node);
}

template <typename T>
Var<T> mul(const Var<T>& a, const Var<T>& b) {
  require_same_shape(a, b, "mul");
  std::vector<T> out(a.value().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.value()[i] * b.value()[i];
  auto node = make_node<T>(Tensor<T>(a.shape(), std::move(out)), "mul", {a.node(), b.node()});
  if (node->requires_grad) {
    node->backward = [](Node<T>& self) {
      auto& na = *self.inputs[0];
      auto& nb = *self.inputs[1];
      // Read both values before writing: a and b may be the same node.
      if (na.requires_grad) {
        auto& g = na.grad_buffer();
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * nb.value[i];
      }
      if (nb.requires_grad) {
        auto& g = nb.grad_buffer();
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * na.value[i];
      }
    };
  }
  return Var<T>(node);
}

template <typename T>
Var<T> softmax(const Var<T>& x) {
  const Shape& s = x.shape();
  const std::size_t K = s.back();
  const std::size_t rows = x.value().size() / K;
  std::vector<T> out(x.value().size());
  for (std::size_t r = 0; r < rows; ++r) {
    const T* in = x.value().data().data() + r * K;
    T* o = out.data() + r * K;
    T mx = *std::max_element(in, in + K);
    T total{0};
    for (std::size_t k = 0; k < K; ++k) {
      o[k] = std::exp(in[k] - mx);
      total += o[k];
    }
    for (std::size_t k = 0; k < K; ++k) o[k] /= total;
  }
  auto node = make_node<T>(Tensor<T>(s, std::move(out)), "softmax", {x.node()});
  if (node->requires_grad) {
    node->backward = [rows, K](Node<T>& self) {
      auto& g = self.inputs[0]->grad_buffer();
      for (std::size_t r = 0; r < rows; ++r) {
        const T* y = self.value.data().data() + r * K;
        const T* dy = self.grad.data() + r * K;
        T dot{0};
        for (std::size_t k = 0; k < K; ++k) dot += dy[k] * y[k];
        for (std::size_t k = 0; k < K; ++k) g[r * K + k] += y[k] * (dy[k] - dot);
      }
    };
  }
  return Var<T>(node);
}

template <typename T>
Var<T> reshape(const Var<T>& x, Shape shape) {
  if (shape_numel(shape) != x.value().size()) {
    throw ShapeError("reshape: cannot view " + shape_to_string(x.shape()) + " as " + shape_to_string(shape));
  }
  auto node = make_node<T>(x.value().reshaped(std::move(shape)), "reshape", {x.node()});
  if (node->requires_grad) {
    node->backward = [](Node<T>& self) { self.inputs[0]->accumulate(self.grad); };
  }
  return Var<T>(node);
}

template <typename T>
Var<T> sum(const Var<T>& x) {
  T total{0};
  for (T v : x.value().data()) total += v;
  auto node = make_node<T>(Tensor<T>({1}, std::vector<T>{total}), "sum", {x.node()});
  if (node->requires_grad) {
    node->backward = [](Node<T>& self) {
      auto& g = self.inputs[0]->grad_buffer();
      for (auto& v : g) v += self.grad[0];
    };
  }
  return Var<T>(node);
}

double dropout_uniform(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t h = splitmix64(seed ^ splitmix64(index));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

template <typename T>
Var<T> dropout(const Var<T>& x, double rate, std::uint64_t seed, bool training) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw ArgumentError("dropout: rate must be in [0, 1), got " + std::to_string(rate));
  }
  if (!training || rate == 0.0) return x;
  const T keep_scale = static_cast<T>(1.0 / (1.0 - rate));
  std::vector<T> mask(x.value().size());
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = dropout_uniform(seed, i) >= rate ? keep_scale : T{0};
  std::vector<T> out(mask.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x.value()[i] * mask[i];
  auto node = make_node<T>(Tensor<T>(x.shape(), std::move(out)), "dropout", {x.node()});
  if (node->requires_grad) {
    node->backward = [mask = std::move(mask)](Node<T>& self) {
      auto& g = self.inputs[0]->grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * mask[i];
    };
  }
  return Var<T>(node);
}

#define EMOADAPT_INSTANTIATE(T)                                               \
  template struct Node<T>;                                                     \
  template class Var<T>;                                                       \
  template Var<T> leaf(Tensor<T>, bool);                                       \
  template std::vector<Node<T>*> topological_order(const Var<T>&);             \
  template void backward(const Var<T>&);                                       \
  template Var<T> conv2d(const Var<T>&, const Var<T>&, std::size_t);           \
  template Var<T> maxpool2d(const Var<T>&);                                    \
  template Var<T> dense(const Var<T>&, const Var<T>&, const Var<T>&);          \
  template Var<T> relu(const Var<T>&);                                         \
  template Var<T> sigmoid(const Var<T>&);                                      \
  template Var<T> add(const Var<T>&, const Var<T>&);                           \
  template Var<T> sub(const Var<T>&, const Var<T>&);                           \
  template Var<T> mul(const Var<T>&, const Var<T>&);                           \
  template Var<T> scale(const Var<T>&, T);                                     \
  template Var<T> abs(const Var<T>&);                                          \
  template Var<T> square(const Var<T>&);                                       \
  template Var<T> log_clamped(const Var<T>&, T);                               \
  template Var<T> softmax(const Var<T>&);                                      \
  template Var<T> reshape(const Var<T>&, Shape);                               \
  template Var<T> sum(const Var<T>&);                                          \
  template Var<T> dropout(const Var<T>&, double, std::uint64_t, bool);

EMOADAPT_INSTANTIATE(float)
EMOADAPT_INSTANTIATE(double)

#undef EMOADAPT_INSTANTIATE

}  // namespace emoadapt
