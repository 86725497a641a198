#include <benchmark/benchmark.h>

#include "sclust/kmeans.hpp"
#include "sclust/spectral.hpp"
#include "sclust/stability.hpp"
#include "sclust/synth.hpp"

namespace {

sclust::PlantedData planted(int blocks, int block_size, int subjects) {
  sclust::PlantedSpec spec;
  spec.block_sizes.assign(static_cast<std::size_t>(blocks), block_size);
  spec.n_subjects = subjects;
  spec.seed = 3;
  return sclust::generate(spec);
}

const sclust::DistanceMatrix& distances300() {
  static const auto d = sclust::distances(sclust::correlations(planted(5, 60, 5000).responses),
                                          sclust::DistanceVariant::paper_literal);
  return d;
}

void BM_Correlations(benchmark::State& state) {
  const auto data = planted(5, static_cast<int>(state.range(0)) / 5, 20000);
  for (auto _ : state) benchmark::DoNotOptimize(sclust::correlations(data.responses));
}
BENCHMARK(BM_Correlations)->Arg(150)->Arg(300)->Unit(benchmark::kMillisecond);

void BM_LaplacianSpectrum(benchmark::State& state) {
  std::vector<int> items(static_cast<std::size_t>(state.range(0)));
  for (std::size_t i = 0; i < items.size(); ++i) items[i] = static_cast<int>(i);
  const auto d = sclust::restrict(distances300(), items);
  for (auto _ : state) {
    const auto g = sclust::gaussian_adjacency(d, 0.5);
    benchmark::DoNotOptimize(sclust::eigendecompose(sclust::laplacian(g)));
  }
}
BENCHMARK(BM_LaplacianSpectrum)->Arg(150)->Arg(300)->Unit(benchmark::kMillisecond);

void BM_KMeansBest(benchmark::State& state) {
  const auto e = sclust::spectral_embedding(distances300(), 0.5, {});
  const int runs = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sclust::kmeans_best(e.coords, 5, runs, 1));
}
BENCHMARK(BM_KMeansBest)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_ConsistencyTrial(benchmark::State& state) {
  const auto& d = distances300();
  const sclust::PipelineSettings pipeline;
  const auto reference = sclust::kmeans_best(sclust::spectral_embedding(d, 0.5, pipeline).coords,
                                             static_cast<int>(state.range(0)), 20, 1);
  sclust::TrialSettings trial;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sclust::consistency_trial(
        d, 0.5, pipeline, static_cast<int>(state.range(0)), reference, trial, seed++));
  }
}
BENCHMARK(BM_ConsistencyTrial)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
