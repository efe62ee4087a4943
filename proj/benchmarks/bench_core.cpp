#include <benchmark/benchmark.h>

#include "ipdd/adwin.hpp"
#include "ipdd/datasets.hpp"
#include "ipdd/ensemble.hpp"
#include "ipdd/nn.hpp"
#include "ipdd/rng.hpp"
#include "ipdd/uncertainty.hpp"

namespace {

using namespace ipdd;

const Architecture kAnn{4, {10}, 2};
const Architecture kDnn{54, {10, 20, 10}, 7};

void BM_forward_single(benchmark::State& state) {
  const Architecture& arch = state.range(0) == 0 ? kAnn : kDnn;
  const ModelParams model = init_model(arch, 1);
  Rng rng(2);
  Eigen::VectorXd x(arch.input_dim);
  for (int i = 0; i < arch.input_dim; ++i) x(i) = rng.uniform01();
  for (auto _ : state) benchmark::DoNotOptimize(forward(model, x));
}
BENCHMARK(BM_forward_single)->Arg(0)->Arg(1);

void BM_forward_batch(benchmark::State& state) {
  const ModelParams model = init_model(kAnn, 1);
  Rng rng(2);
  Eigen::MatrixXd X(state.range(0), 4);
  for (Eigen::Index i = 0; i < X.size(); ++i) X.data()[i] = rng.uniform01();
  for (auto _ : state) benchmark::DoNotOptimize(forward_batch(model, X));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_forward_batch)->Arg(32)->Arg(400);

void BM_train_epoch(benchmark::State& state) {
  const auto data = gen_sine(static_cast<int>(state.range(0)), DriftSpec::none(), 3);
  TrainConfig cfg;
  cfg.epochs = 1;
  cfg.batch_size = 32;
  const ModelParams start = init_model(kAnn, 4);
  for (auto _ : state) benchmark::DoNotOptimize(train(start, data, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_train_epoch)->Arg(200)->Arg(2000);

void BM_model_distance(benchmark::State& state) {
  const ModelParams a = init_model(kDnn, 5);
  const ModelParams b = init_model(kDnn, 6);
  for (auto _ : state) benchmark::DoNotOptimize(model_distance(a, b));
}
BENCHMARK(BM_model_distance);

void BM_bucket_models(benchmark::State& state) {
  Rng rng(7);
  std::vector<ModelParams> models;
  for (int i = 0; i < state.range(0); ++i) {
    ModelParams m = init_model(kAnn, 8);
    m.weights[0](0, 0) += 0.02 * rng.gaussian();
    models.push_back(std::move(m));
  }
  for (auto _ : state) benchmark::DoNotOptimize(bucket_models(models, 0.01));
}
BENCHMARK(BM_bucket_models)->Arg(25)->Arg(100);

void BM_adwin_update(benchmark::State& state) {
  Rng rng(9);
  Adwin detector(0.001);
  for (auto _ : state) benchmark::DoNotOptimize(detector.update(rng.uniform01()));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_adwin_update);

void BM_predictive_entropy(benchmark::State& state) {
  Rng rng(10);
  std::vector<Eigen::VectorXd> members;
  for (int i = 0; i < 5; ++i) {
    Eigen::VectorXd p(7);
    for (int c = 0; c < 7; ++c) p(c) = 0.1 + rng.uniform01();
    p /= p.sum();
    members.push_back(std::move(p));
  }
  for (auto _ : state) benchmark::DoNotOptimize(predictive_entropy(members));
}
BENCHMARK(BM_predictive_entropy);

void BM_gen_sine(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(gen_sine(static_cast<int>(state.range(0)), DriftSpec::none(), 11));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_gen_sine)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
