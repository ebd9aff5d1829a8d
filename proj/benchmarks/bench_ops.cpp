#include <benchmark/benchmark.h>

#include "emoadapt/autograd.hpp"
#include "emoadapt/digest.hpp"
#include "emoadapt/intersection.hpp"
#include "emoadapt/model.hpp"

using namespace emoadapt;

namespace {

Tensor<float> noise(Shape shape, std::uint64_t seed) {
  Tensor<float> t(shape, 0.0f);
  std::uint64_t i = 0;
  for (auto& v : t.data()) v = static_cast<float>(dropout_uniform(seed, i++));
  return t;
}

void BM_Conv2dForward(benchmark::State& state) {
  const auto batch = static_cast<std::size_t>(state.range(0));
  auto x = constant(noise({batch, 8, 46, 46}, 1));
  auto k = constant(noise({16, 8, 3, 3}, 2));
  for (auto _ : state) benchmark::DoNotOptimize(conv2d(x, k).value().data().data());
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(batch));
}
BENCHMARK(BM_Conv2dForward)->Arg(1)->Arg(32);

void BM_ModelForward(benchmark::State& state) {
  ModelConfig cfg;
  auto params = init_params<float>(cfg, 7);
  const auto batch = static_cast<std::size_t>(state.range(0));
  auto x = noise({batch, 1, 48, 48}, 3);
  for (auto _ : state) benchmark::DoNotOptimize(forward(cfg, params, x, false, 0).data().data());
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(batch));
}
BENCHMARK(BM_ModelForward)->Arg(32);

void BM_TrainStep(benchmark::State& state) {
  ModelConfig cfg;
  auto params = init_params<float>(cfg, 7);
  auto x = noise({32, 1, 48, 48}, 3);
  for (auto _ : state) {
    auto leaves = as_leaves(params, true);
    auto out = forward_graph(cfg, leaves, x, true, 11);
    backward(sum(out.probs));
    benchmark::DoNotOptimize(leaves.at("conv1").grad().data().data());
  }
}
BENCHMARK(BM_TrainStep)->Unit(benchmark::kMillisecond);

void BM_IntersectionScore(benchmark::State& state) {
  const auto dims = static_cast<std::size_t>(state.range(0));
  EmbeddingDump dump;
  dump.matrix = noise({200, dims}, 5).cast<double>();
  for (int i = 0; i < 200; ++i) dump.labels.push_back(i % 4);
  for (auto _ : state) benchmark::DoNotOptimize(intersection_score(dump));
}
BENCHMARK(BM_IntersectionScore)->Arg(4)->Arg(128)->Arg(7744)->Unit(benchmark::kMillisecond);

void BM_Sha256(benchmark::State& state) {
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(state.range(0)), 0x5a);
  for (auto _ : state) benchmark::DoNotOptimize(sha256_hex(bytes));
  state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Sha256)->Arg(1 << 20);

}  // namespace

BENCHMARK_MAIN();
