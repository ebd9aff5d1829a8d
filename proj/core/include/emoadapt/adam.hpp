#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "emoadapt/model.hpp"

namespace emoadapt {

template <typename T>
struct AdamState {
  std::uint64_t step = 0;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::map<std::string, Tensor<T>> m;
  std::map<std::string, Tensor<T>> v;
};

// One bias-corrected Adam update over every parameter, in name order.
// Moments are created lazily on the first step. Throws ArgumentError naming
// the first parameter without a gradient.
template <typename T>
void adam_step(ModelParams<T>& params, const std::map<std::string, Tensor<T>>& grads, AdamState<T>& state);

}  // namespace emoadapt
