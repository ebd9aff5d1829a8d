#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "emoadapt/checkpoint.hpp"
#include "emoadapt/dataset.hpp"
#include "emoadapt/loss.hpp"
#include "emoadapt/model.hpp"

namespace emoadapt {

struct TrainRunConfig {
  std::size_t epochs = 10;
  std::size_t batch_size = 32;
  std::uint64_t seed = 1;
  double lr = 1e-3;
  LossConfig loss;

  void validate() const;
};

struct EpochLog {
  std::size_t epoch = 0;  // 1-based
  std::string split;      // "train" or "test"
  double loss_total = 0, loss_cls = 0, loss_disc = 0, loss_reg = 0;
  double accuracy = 0;
};

// CSV with header `epoch,split,loss_total,loss_cls,loss_disc,loss_reg,accuracy`.
std::string format_training_log(const std::vector<EpochLog>& log);

struct TrainResult {
  Checkpoint checkpoint;
  std::vector<EpochLog> log;
};

// Epoch order: a Fisher-Yates permutation seeded from (seed, epoch).
std::vector<std::size_t> epoch_permutation(std::size_t n, std::uint64_t seed, std::size_t epoch);

// Shared Adam loop. Each batch minimises the overall loss with one-hot
// targets; when `frozen` is given, its inference-mode outputs are the
// reference distribution of the discrepancy term, otherwise that term is a
// constant zero. `eval_set`, if non-null, is scored after every epoch and
// logged with split "test".
TrainResult train_loop(const ModelConfig& config, ModelParams<float> init, const Dataset& data,
                       const TrainRunConfig& run, const ModelParams<float>* frozen, Phase phase,
                       const Dataset* eval_set = nullptr);

// Phase 1: source-domain training with the discrepancy weight forced to 0.
TrainResult pretrain(const ModelConfig& config, const Dataset& source, const TrainRunConfig& run,
                     const Dataset* eval_set = nullptr);

// Phase 2: copies source_ckpt's parameters and trains them on the target
// domain under the full loss, with the checkpointed model frozen as the
// discrepancy reference. The checkpoint must be phase=source and its config
// digest must equal config.digest().
TrainResult adapt(const ModelConfig& config, const Dataset& target, const Checkpoint& source_ckpt,
                  const TrainRunConfig& run, const Dataset* eval_set = nullptr);

}  // namespace emoadapt
