#include "emoadapt/loss.hpp"

#include <cmath>

namespace emoadapt {

ProbDist ProbDist::one_hot(int cls) {
  if (cls < 0 || cls >= static_cast<int>(kNumClasses)) {
    throw ArgumentError("one_hot: class index " + std::to_string(cls) + " out of range");
  }
  ProbDist d;
  d.p[static_cast<std::size_t>(cls)] = 1.0;
  return d;
}

ProbDist ProbDist::uniform() {
  ProbDist d;
  d.p.fill(1.0 / kNumClasses);
  return d;
}

bool ProbDist::on_simplex(double tol) const {
  double total = 0.0;
  for (double v : p) {
    if (!(v >= -tol)) return false;
    total += v;
  }
  return std::abs(total - 1.0) <= tol;
}

template <typename T>
Tensor<T> to_batch(const std::vector<ProbDist>& rows) {
  if (rows.empty()) throw ShapeError("to_batch: empty batch");
  std::vector<T> data;
  data.reserve(rows.size() * kNumClasses);
  for (const auto& r : rows)
    for (double v : r.p) data.push_back(static_cast<T>(v));
  return Tensor<T>({rows.size(), kNumClasses}, std::move(data));
}

void LossConfig::validate() const {
  for (auto [name, v] : {std::pair{"loss.lambda", lambda}, std::pair{"loss.w_classifier", w_classifier},
                         std::pair{"loss.w_discrepancy", w_discrepancy}, std::pair{"loss.epsilon_log", epsilon_log}}) {
    if (!std::isfinite(v) || v < 0.0) throw ConfigError(std::string(name) + " must be finite and non-negative");
  }
  if (epsilon_log == 0.0) throw ConfigError("loss.epsilon_log must be positive");
}

namespace {

template <typename T>
void check_pair(const Var<T>& a, const Var<T>& b, const char* op) {
  if (a.shape().size() != 2 || b.shape().size() != 2) {
    throw ShapeError(std::string(op) + ": expected [N,K] distributions, got " + shape_to_string(a.shape()) + " and " +
                     shape_to_string(b.shape()));
  }
  if (a.shape()[0] != b.shape()[0]) {
    throw ShapeError(std::string(op) + ": batch size mismatch " + std::to_string(a.shape()[0]) + " vs " +
                     std::to_string(b.shape()[0]));
  }
  if (a.shape()[1] != b.shape()[1]) {
    throw ShapeError(std::string(op) + ": class count mismatch " + shape_to_string(a.shape()) + " vs " +
                     shape_to_string(b.shape()));
  }
}

}  // namespace

template <typename T>
Var<T> classifier_loss(const Var<T>& target, const Var<T>& predicted, T epsilon_log) {
  check_pair(target, predicted, "classifier_loss");
  const T n = static_cast<T>(target.shape()[0]);
  return scale(sum(mul(target, log_clamped(predicted, epsilon_log))), T{-1} / n);
}

template <typename T>
Var<T> discrepancy_loss(const Var<T>& source, const Var<T>& adapted) {
  check_pair(source, adapted, "discrepancy_loss");
  const T n = static_cast<T>(source.shape()[0]);
  const T k = static_cast<T>(source.shape()[1]);
  return scale(sum(abs(sub(source, adapted))), T{1} / (k * n));
}

template <typename T>
Var<T> l2_regularizer(const std::map<std::string, Var<T>>& params) {
  Var<T> total;
  for (auto name : kFcWeightNames) {
    auto it = params.find(std::string(name));
    if (it == params.end()) throw ShapeError("l2_regularizer: missing FC weight '" + std::string(name) + "'");
    Var<T> term = sum(square(it->second));
    total = total ? add(total, term) : term;
  }
  return total;
}

template <typename T>
double l2_regularizer(const ModelParams<T>& params) {
  double total = 0.0;
  for (auto name : kFcWeightNames) {
    auto it = params.find(std::string(name));
    if (it == params.end()) throw ShapeError("l2_regularizer: missing FC weight '" + std::string(name) + "'");
    for (T v : it->second.data()) total += static_cast<double>(v) * static_cast<double>(v);
  }
  return total;
}

namespace {

void check_terms(double cls, double disc, double reg) {
  if (!std::isfinite(cls)) throw NumericError("classifier loss term is not finite");
  if (!std::isfinite(disc)) throw NumericError("discrepancy loss term is not finite");
  if (!std::isfinite(reg)) throw NumericError("regularization term is not finite");
}

}  // namespace

template <typename T>
Var<T> overall_loss(const Var<T>& cls, const Var<T>& disc, const Var<T>& reg, const LossConfig& cfg) {
  check_terms(static_cast<double>(cls.value()[0]), static_cast<double>(disc.value()[0]),
              static_cast<double>(reg.value()[0]));
  Var<T> total = add(scale(cls, static_cast<T>(cfg.w_classifier)), scale(disc, static_cast<T>(cfg.w_discrepancy)));
  return add(total, scale(reg, static_cast<T>(cfg.lambda)));
}

double overall_loss(double cls, double disc, double reg, const LossConfig& cfg) {
  check_terms(cls, disc, reg);
  return cfg.w_classifier * cls + cfg.w_discrepancy * disc + cfg.lambda * reg;
}

#define EMOADAPT_INSTANTIATE(T)                                                                 \
  template Tensor<T> to_batch<T>(const std::vector<ProbDist>&);                                \
  template Var<T> classifier_loss(const Var<T>&, const Var<T>&, T);                            \
  template Var<T> discrepancy_loss(const Var<T>&, const Var<T>&);                              \
  template Var<T> l2_regularizer(const std::map<std::string, Var<T>>&);                        \
  template double l2_regularizer(const ModelParams<T>&);                                       \
  template Var<T> overall_loss(const Var<T>&, const Var<T>&, const Var<T>&, const LossConfig&);

EMOADAPT_INSTANTIATE(float)
EMOADAPT_INSTANTIATE(double)

#undef EMOADAPT_INSTANTIATE

}  // namespace emoadapt
