#include <benchmark/benchmark.h>

#include "hindsight/bootstrap.hpp"
#include "hindsight/game.hpp"
#include "hindsight/linalg.hpp"
#include "hindsight/moments.hpp"
#include "hindsight/rng.hpp"

namespace {

using namespace hindsight;

OutcomeData sample_data(int groups, int size) {
  ThetaParams theta{1.0, 0.5, 1.0 / 3.0, 0.01, 0.01};
  GameDesign design;
  design.group_sizes.assign(static_cast<std::size_t>(groups), size);
  design.seed = 7;
  return simulate_game(theta, design);
}

void BM_PerronFrobenius(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  rng::Stream stream(11, rng::Tag::check_draw);
  std::vector<double> entries(dim * dim);
  for (double& v : entries) v = stream.uniform_pos();
  const NonNegMatrix m(dim, entries);
  for (auto _ : state) {
    benchmark::DoNotOptimize(perron_frobenius(m));
  }
}
BENCHMARK(BM_PerronFrobenius)->Arg(4)->Arg(8);

void BM_SimulateGame(benchmark::State& state) {
  ThetaParams theta{1.0, 0.5, 1.0 / 3.0, 0.01, 0.01};
  GameDesign design;
  design.group_sizes.assign(10, static_cast<int>(state.range(0)));
  design.seed = 7;
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate_game(theta, design));
  }
}
BENCHMARK(BM_SimulateGame)->Arg(100)->Arg(300);

void BM_MomentSystem(benchmark::State& state) {
  const OutcomeData data = sample_data(10, static_cast<int>(state.range(0)));
  const InstrumentSet instruments = InstrumentSet::standard();
  const PayoffSpec spec = PayoffSpec::linear_binary(1.0, 0.5);
  const MomentOptions options;
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_moment_system(spec, data, instruments, options));
  }
}
BENCHMARK(BM_MomentSystem)->Arg(100)->Arg(300);

void BM_ModifiedBootstrap(benchmark::State& state) {
  const OutcomeData data = sample_data(10, 100);
  const InstrumentSet instruments = InstrumentSet::standard();
  const PayoffSpec spec = PayoffSpec::linear_binary(1.0, 0.5);
  const MomentOptions options;
  const MomentSystem system = build_moment_system(spec, data, instruments, options);
  const MultiplierDraws draws(data.num_players(), static_cast<int>(state.range(0)), 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(modified_stats(data, system, instruments, draws));
  }
}
BENCHMARK(BM_ModifiedBootstrap)->Arg(500)->Arg(1000);

void BM_BenchmarkBootstrap(benchmark::State& state) {
  const OutcomeData data = sample_data(10, 100);
  const InstrumentSet instruments = InstrumentSet::standard();
  const MultiplierDraws draws(data.num_players(), static_cast<int>(state.range(0)), 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(benchmark_stats(data, instruments, draws));
  }
}
BENCHMARK(BM_BenchmarkBootstrap)->Arg(500)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
