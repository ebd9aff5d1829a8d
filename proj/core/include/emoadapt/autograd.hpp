#pragma once

// Reverse-mode automatic differentiation over Tensor<T>.
//
// A Var is a handle to a node of a dynamically built compute graph. Every op
// returns a fresh node whose value is immutable; when at least one input
// requires a gradient the node also records a backward closure. backward()
// orders the reachable subgraph topologically and runs each closure once.

#include <cstdint>
#include <functional>
#include <memory>
#include <string_view>
#include <vector>

#include "emoadapt/tensor.hpp"

namespace emoadapt {

template <typename T>
struct Node {
  Tensor<T> value;
  std::vector<T> grad;  // empty until something accumulates into it
  bool requires_grad = false;
  std::string_view op = "leaf";
  std::vector<std::shared_ptr<Node>> inputs;
  std::function<void(Node&)> backward;

  // Adds g into grad, allocating zeros first if needed.
  void accumulate(std::span<const T> g);
  std::vector<T>& grad_buffer();
};

template <typename T>
class Var {
 public:
  Var() = default;
  explicit Var(std::shared_ptr<Node<T>> node) : node_(std::move(node)) {}

  const Tensor<T>& value() const { return node_->value; }
  const Shape& shape() const { return node_->value.shape(); }
  bool requires_grad() const { return node_ && node_->requires_grad; }
  bool has_grad() const { return node_ && !node_->grad.empty(); }

  // Gradient as a tensor of the value's shape; zeros if none accumulated.
  Tensor<T> grad() const;

  const std::shared_ptr<Node<T>>& node() const { return node_; }
  explicit operator bool() const { return static_cast<bool>(node_); }

 private:
  std::shared_ptr<Node<T>> node_;
};

template <typename T>
Var<T> leaf(Tensor<T> value, bool requires_grad = true);

template <typename T>
Var<T> constant(Tensor<T> value) {
  return leaf(std::move(value), false);
}

// Nodes reachable from root in evaluation order (inputs before consumers).
template <typename T>
std::vector<Node<T>*> topological_order(const Var<T>& root);

// Seeds d(loss)/d(loss) = 1 and propagates to every reachable node that
// requires a gradient. Leaves on the path always end with a populated grad.
template <typename T>
void backward(const Var<T>& loss);

// --- Ops -------------------------------------------------------------------

// Cross-correlation of input [N,C,H,W] with kernel [F,C,kH,kW] and symmetric
// zero padding, giving [N,F,H+2p-kH+1,W+2p-kW+1].
template <typename T>
Var<T> conv2d(const Var<T>& input, const Var<T>& kernel, std::size_t padding = 0);

// Non-overlapping 2x2 max pool on [N,C,H,W] with H and W even. Ties go to the
// first element in row-major window order.
template <typename T>
Var<T> maxpool2d(const Var<T>& input);

// input [N,D] x weight [D,M] + bias [M].
template <typename T>
Var<T> dense(const Var<T>& input, const Var<T>& weight, const Var<T>& bias);

template <typename T>
Var<T> relu(const Var<T>& x);
template <typename T>
Var<T> sigmoid(const Var<T>& x);
template <typename T>
Var<T> add(const Var<T>& a, const Var<T>& b);
template <typename T>
Var<T> sub(const Var<T>& a, const Var<T>& b);
template <typename T>
Var<T> mul(const Var<T>& a, const Var<T>& b);
template <typename T>
Var<T> scale(const Var<T>& x, T factor);
template <typename T>
Var<T> abs(const Var<T>& x);
template <typename T>
Var<T> square(const Var<T>& x);
// log(max(x, floor)); the gradient is zero where the clamp is active.
template <typename T>
Var<T> log_clamped(const Var<T>& x, T floor);
// Softmax over the last axis.
template <typename T>
Var<T> softmax(const Var<T>& x);
template <typename T>
Var<T> reshape(const Var<T>& x, Shape shape);
// Sum of all elements as a [1] tensor.
template <typename T>
Var<T> sum(const Var<T>& x);

// Inverted dropout. Element i of the output is kept when
// dropout_uniform(seed, i) >= rate and is then scaled by 1/(1-rate).
// Identity when training is false.
template <typename T>
Var<T> dropout(const Var<T>& x, double rate, std::uint64_t seed, bool training);

// Counter-based uniform in [0,1) used by dropout.
double dropout_uniform(std::uint64_t seed, std::uint64_t index);

}  // namespace emoadapt
