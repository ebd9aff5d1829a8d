#include "emoadapt/train.hpp"

#include <cmath>
#include <numeric>
#include <random>

#include "emoadapt/adam.hpp"
#include "emoadapt/digest.hpp"
#include "emoadapt/eval.hpp"
#include "emoadapt/io.hpp"

namespace emoadapt {

void TrainRunConfig::validate() const {
  if (batch_size == 0) throw ConfigError("train.batch_size must be positive");
  if (!std::isfinite(lr) || lr < 0.0) throw ConfigError("train.lr must be finite and non-negative");
  loss.validate();
}

std::string format_training_log(const std::vector<EpochLog>& log) {
  std::string out = "epoch,split,loss_total,loss_cls,loss_disc,loss_reg,accuracy\n";
  for (const auto& e : log) {
    out += std::to_string(e.epoch) + ',' + e.split + ',' + format_double(e.loss_total) + ',' +
           format_double(e.loss_cls) + ',' + format_double(e.loss_disc) + ',' + format_double(e.loss_reg) + ',' +
           format_double(e.accuracy) + '\n';
  }
  return out;
}

std::vector<std::size_t> epoch_permutation(std::size_t n, std::uint64_t seed, std::size_t epoch) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::mt19937_64 rng(derive_seed(seed, "shuffle/" + std::to_string(epoch)));
  for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng() % i]);
  return perm;
}

namespace {

struct BatchTerms {
  double total = 0, cls = 0, disc = 0, reg = 0;
  std::size_t correct = 0;
};

std::size_t count_correct(const Tensor<float>& probs, const std::vector<int>& labels) {
  auto pred = argmax_rows(probs);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) correct += pred[i] == labels[i];
  return correct;
}

// Inference-mode scores of a whole dataset, batched.
EpochLog score_dataset(const ModelConfig& config, const ModelParams<float>& params, const Dataset& data,
                       const TrainRunConfig& run, const ModelParams<float>* frozen) {
  EpochLog e;
  e.split = "test";
  const double reg = l2_regularizer(params);
  std::size_t correct = 0;
  for (std::size_t start = 0; start < data.size(); start += run.batch_size) {
    std::vector<std::size_t> idx;
    for (std::size_t i = start; i < std::min(data.size(), start + run.batch_size); ++i) idx.push_back(i);
    Tensor<float> batch = stack_images(data, idx);
    std::vector<int> labels;
    for (auto i : idx) labels.push_back(data.samples[i].label);
    Tensor<float> p2 = forward(config, params, batch, false, 0);
    auto cls = classifier_loss(constant(one_hot(labels)), constant(p2), static_cast<float>(run.loss.epsilon_log));
    double disc = 0.0;
    if (frozen) {
      Tensor<float> p1 = forward(config, *frozen, batch, false, 0);
      disc = discrepancy_loss(constant(p1), constant(p2)).value()[0];
    }
    const double w = static_cast<double>(idx.size());
    e.loss_cls += w * cls.value()[0];
    e.loss_disc += w * disc;
    correct += count_correct(p2, labels);
  }
  const double n = static_cast<double>(data.size());
  e.loss_cls /= n;
  e.loss_disc /= n;
  e.loss_reg = reg;
  e.loss_total = overall_loss(e.loss_cls, e.loss_disc, e.loss_reg, run.loss);
  e.accuracy = static_cast<double>(correct) / n;
  return e;
}

}  // namespace

TrainResult train_loop(const ModelConfig& config, ModelParams<float> params, const Dataset& data,
                       const TrainRunConfig& run, const ModelParams<float>* frozen, Phase phase,
                       const Dataset* eval_set) {
  config.validate();
  run.validate();
  check_params(config, params);
  if (data.empty()) throw DataError("training dataset is empty");
  for (const auto& s : data.samples) {
    if (s.label < 0 || s.label >= static_cast<int>(kNumClasses)) {
      throw DataError("sample '" + s.path + "' has a label outside the class set");
    }
  }

  AdamState<float> adam;
  adam.lr = run.lr;
  std::vector<EpochLog> log;
  const auto eps = static_cast<float>(run.loss.epsilon_log);

  for (std::size_t epoch = 1; epoch <= run.epochs; ++epoch) {
    auto order = epoch_permutation(data.size(), run.seed, epoch);
    BatchTerms sums;
    for (std::size_t start = 0; start < order.size(); start += run.batch_size) {
      std::vector<std::size_t> idx(order.begin() + static_cast<std::ptrdiff_t>(start),
                                   order.begin() + static_cast<std::ptrdiff_t>(std::min(order.size(), start + run.batch_size)));
      Tensor<float> batch = stack_images(data, idx);
      std::vector<int> labels;
      labels.reserve(idx.size());
      for (auto i : idx) labels.push_back(data.samples[i].label);

      auto leaves = as_leaves(params, true);
      const std::uint64_t dropout_seed = derive_seed(run.seed, "dropout/" + std::to_string(adam.step + 1));
      auto fw = forward_graph(config, leaves, batch, true, dropout_seed);
      Var<float> cls = classifier_loss(constant(one_hot(labels)), fw.probs, eps);
      Var<float> disc = frozen ? discrepancy_loss(constant(forward(config, *frozen, batch, false, 0)), fw.probs)
                               : constant(Tensor<float>({1}, 0.0f));
      Var<float> reg = l2_regularizer(leaves);
      Var<float> total = overall_loss(cls, disc, reg, run.loss);
      if (!std::isfinite(total.value()[0])) {
        throw NumericError("non-finite training loss at epoch " + std::to_string(epoch));
      }
      backward(total);

      std::map<std::string, Tensor<float>> grads;
      for (const auto& [name, v] : leaves) grads.emplace(name, v.grad());
      adam_step(params, grads, adam);

      const double w = static_cast<double>(idx.size());
      sums.total += w * total.value()[0];
      sums.cls += w * cls.value()[0];
      sums.disc += w * disc.value()[0];
      sums.reg += w * reg.value()[0];
      sums.correct += count_correct(fw.probs.value(), labels);
    }
    const double n = static_cast<double>(data.size());
    log.push_back(EpochLog{epoch, "train", sums.total / n, sums.cls / n, sums.disc / n, sums.reg / n,
                           static_cast<double>(sums.correct) / n});
    if (eval_set && !eval_set->empty()) {
      EpochLog e = score_dataset(config, params, *eval_set, run, frozen);
      e.epoch = epoch;
      log.push_back(e);
    }
  }
  return TrainResult{make_checkpoint(config, std::move(params), phase, adam.step, run.seed), std::move(log)};
}

TrainResult pretrain(const ModelConfig& config, const Dataset& source, const TrainRunConfig& run,
                     const Dataset* eval_set) {
  TrainRunConfig cfg = run;
  cfg.loss.w_discrepancy = 0.0;
  config.validate();
  return train_loop(config, init_params<float>(config, derive_seed(run.seed, "init")), source, cfg, nullptr,
                    Phase::source, eval_set);
}

TrainResult adapt(const ModelConfig& config, const Dataset& target, const Checkpoint& source_ckpt,
                  const TrainRunConfig& run, const Dataset* eval_set) {
  if (source_ckpt.meta.phase != Phase::source) {
    throw CheckpointError(CheckpointError::Kind::structure, "adapt needs a phase=source checkpoint");
  }
  if (source_ckpt.meta.config_digest != config.digest()) {
    throw CheckpointError(CheckpointError::Kind::digest_mismatch,
                          "source checkpoint digest " + source_ckpt.meta.config_digest +
                              " does not match the model config digest " + config.digest());
  }
  if (target.empty()) throw DataError("target dataset is empty");
  const ModelParams<float>& frozen = source_ckpt.params;
  return train_loop(config, frozen, target, run, &frozen, Phase::adapted, eval_set);
}

}  // namespace emoadapt
