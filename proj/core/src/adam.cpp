#include "emoadapt/adam.hpp"

#include <cmath>

namespace emoadapt {

template <typename T>
void adam_step(ModelParams<T>& params, const std::map<std::string, Tensor<T>>& grads, AdamState<T>& state) {
  for (const auto& [name, p] : params) {
    auto it = grads.find(name);
    if (it == grads.end()) throw ArgumentError("adam_step: no gradient for parameter '" + name + "'");
    if (it->second.shape() != p.shape()) {
      throw ShapeError("adam_step: gradient for '" + name + "' has shape " + shape_to_string(it->second.shape()) +
                       ", parameter is " + shape_to_string(p.shape()));
    }
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const T b1 = static_cast<T>(state.beta1);
  const T b2 = static_cast<T>(state.beta2);
  const T c1 = static_cast<T>(1.0 - std::pow(state.beta1, t));
  const T c2 = static_cast<T>(1.0 - std::pow(state.beta2, t));
  const T lr = static_cast<T>(state.lr);
  const T eps = static_cast<T>(state.eps);

  for (auto& [name, p] : params) {
    const auto& g = grads.at(name);
    auto& m = state.m.try_emplace(name, p.shape(), T{0}).first->second;
    auto& v = state.v.try_emplace(name, p.shape(), T{0}).first->second;
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = b1 * m[i] + (T{1} - b1) * g[i];
      v[i] = b2 * v[i] + (T{1} - b2) * g[i] * g[i];
      const T m_hat = m[i] / c1;
      const T v_hat = v[i] / c2;
      p[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
    }
  }
}

template void adam_step(ModelParams<float>&, const std::map<std::string, Tensor<float>>&, AdamState<float>&);
template void adam_step(ModelParams<double>&, const std::map<std::string, Tensor<double>>&, AdamState<double>&);

}  // namespace emoadapt
