#include <benchmark/benchmark.h>

#include <random>

#include "vdtk/spectral.hpp"

namespace {

std::vector<double> random_values(std::size_t n) {
  std::mt19937 gen(1234);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  std::vector<double> out(n);
  for (double& v : out) v = dist(gen);
  return out;
}

void BM_DftPow2(benchmark::State& state) {
  const auto x = random_values(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(vdtk::dft_real(x));
  }
}
BENCHMARK(BM_DftPow2)->Arg(128)->Arg(1024)->Arg(8192);

void BM_DftPrime(benchmark::State& state) {
  const auto x = random_values(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(vdtk::dft_real(x));
  }
}
BENCHMARK(BM_DftPrime)->Arg(127)->Arg(1021)->Arg(8191);

void BM_BandMetrics(benchmark::State& state) {
  const auto x = random_values(438);
  vdtk::ErrorSequence seq(x, vdtk::MetricName::kAbsRel);
  const auto partition =
      vdtk::make_band_partition(438, 11, vdtk::BandScheme::kExponential);
  for (auto _ : state) {
    benchmark::DoNotOptimize(vdtk::band_metrics(seq, partition));
  }
}
BENCHMARK(BM_BandMetrics);

}  // namespace
