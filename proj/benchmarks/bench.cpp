#include <benchmark/benchmark.h>

#include "fedtrident/detection.hpp"
#include "fedtrident/engine.hpp"
#include "fedtrident/gmm.hpp"

using namespace fedtrident;

namespace {

std::vector<ModelParams> sample_locals(int count, int d, int h, int e,
                                       std::uint64_t seed) {
  std::vector<ModelParams> locals;
  locals.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    SeededRng rng(seed, 20000 + static_cast<std::uint64_t>(i));
    locals.push_back(init_params(d, h, e, rng));
  }
  return locals;
}

}  // namespace

static void BM_local_training(benchmark::State& state) {
  SeededRng data_rng(1, 20100);
  Dataset data = generate_synthetic(6, 32, static_cast<int>(state.range(0)), 3.0,
                                    1.0, data_rng);
  SeededRng init_rng(1, 20101);
  ModelParams params = init_params(32, 64, 6, init_rng);
  TrainConfig cfg;
  std::uint64_t stream = 0;
  for (auto _ : state) {
    SeededRng rng(1, 20102 + stream++);
    benchmark::DoNotOptimize(train_local(params, data, cfg, rng));
  }
}
BENCHMARK(BM_local_training)->Arg(10)->Arg(40);

static void BM_neuron_features(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  std::vector<ModelParams> locals = sample_locals(m, 32, 64, 6, 2);
  ModelParams global = ModelParams::zeros(32, 64, 6);
  for (auto _ : state)
    benchmark::DoNotOptimize(compute_neuron_features(locals, global));
}
BENCHMARK(BM_neuron_features)->Arg(20)->Arg(50);

static void BM_gmm_fit(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  std::vector<ModelParams> locals = sample_locals(m, 32, 64, 6, 3);
  ModelParams global = ModelParams::zeros(32, 64, 6);
  NeuronFeatureTable table = compute_neuron_features(locals, global);
  auto pair = identify_source_target(table);
  std::vector<Vector> features = build_feature_set(table, pair.first, pair.second);
  for (auto _ : state) benchmark::DoNotOptimize(gmm_fit(features));
}
BENCHMARK(BM_gmm_fit)->Arg(20)->Arg(50);

static void BM_full_round(benchmark::State& state) {
  ExperimentConfig cfg = default_config();
  cfg.num_clients = 40;
  cfg.participants_per_round = 10;
  cfg.rounds = 1;
  cfg.samples_per_class = 200;
  cfg.test_samples_per_class = 50;
  cfg.schedule = static_schedule(3, 1, 1);
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment(cfg));
}
BENCHMARK(BM_full_round);

BENCHMARK_MAIN();
