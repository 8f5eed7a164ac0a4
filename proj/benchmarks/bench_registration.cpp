#include <benchmark/benchmark.h>

#include <random>

#include "vdtk/registration.hpp"

namespace {

struct Cloud {
  std::vector<Eigen::Vector3d> source;
  std::vector<Eigen::Vector3d> target;
  std::vector<double> weights;
};

Cloud make_cloud(std::size_t n) {
  std::mt19937 gen(77);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  Cloud c;
  c.source.resize(n);
  c.target.resize(n);
  c.weights.assign(n, 1.0);
  const Eigen::Matrix3d r =
      Eigen::AngleAxisd(0.4, Eigen::Vector3d(1, 1, 0).normalized())
          .toRotationMatrix();
  for (std::size_t i = 0; i < n; ++i) {
    c.source[i] = {dist(gen), dist(gen), dist(gen) + 4.0};
    c.target[i] = 1.3 * (r * c.source[i]) + Eigen::Vector3d(0.2, -0.1, 0.5);
  }
  return c;
}

void BM_Procrustes(benchmark::State& state) {
  const Cloud c = make_cloud(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        vdtk::procrustes_similarity(c.source, c.target, c.weights));
  }
}
BENCHMARK(BM_Procrustes)->Arg(1024)->Arg(3072)->Arg(16384);

void BM_WeiszfeldFocal(benchmark::State& state) {
  const int w = 64, h = 48;
  std::mt19937 gen(78);
  std::uniform_real_distribution<double> dist(1.0, 8.0);
  std::vector<Eigen::Vector3d> pm(static_cast<std::size_t>(w) * h);
  const double f = 58.0, cx = (w - 1) / 2.0, cy = (h - 1) / 2.0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double z = dist(gen);
      pm[static_cast<std::size_t>(y) * w + x] = {(x - cx) / f * z,
                                                 (y - cy) / f * z, z};
    }
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(vdtk::weiszfeld_focal(pm, w, h, cx, cy, 10));
  }
}
BENCHMARK(BM_WeiszfeldFocal);

}  // namespace
