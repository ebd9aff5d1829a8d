#pragma once

#include <array>

#include "emoadapt/autograd.hpp"
#include "emoadapt/model.hpp"

namespace emoadapt {

// One class-probability vector. Batched losses take [N,4] tensors whose rows
// are ProbDists.
struct ProbDist {
  std::array<double, kNumClasses> p{};

  static ProbDist one_hot(int cls);
  static ProbDist uniform();
  bool on_simplex(double tol = 1e-6) const;
};

template <typename T>
Tensor<T> to_batch(const std::vector<ProbDist>& rows);

struct LossConfig {
  double lambda = 1e-4;
  double w_classifier = 1.0;
  double w_discrepancy = 1.0;
  double epsilon_log = 1e-12;

  void validate() const;
};

// Mean over the batch of -sum_k target_k * log(max(pred_k, eps)).
template <typename T>
Var<T> classifier_loss(const Var<T>& target, const Var<T>& predicted, T epsilon_log = T(1e-12));

// Mean over the batch of (1/K) * sum_k |source_k - adapted_k|.
template <typename T>
Var<T> discrepancy_loss(const Var<T>& source, const Var<T>& adapted);

// Sum of squared entries of fc1.w, fc2.w and fc3.w. Nothing else.
template <typename T>
Var<T> l2_regularizer(const std::map<std::string, Var<T>>& params);
template <typename T>
double l2_regularizer(const ModelParams<T>& params);

// w_classifier*cls + w_discrepancy*disc + lambda*reg. Throws NumericError
// naming the first non-finite term.
template <typename T>
Var<T> overall_loss(const Var<T>& cls, const Var<T>& disc, const Var<T>& reg, const LossConfig& cfg);
double overall_loss(double cls, double disc, double reg, const LossConfig& cfg);

}  // namespace emoadapt
