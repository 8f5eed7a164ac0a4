#include <benchmark/benchmark.h>

#include "vdtk/fusion.hpp"
#include "vdtk/synth.hpp"

namespace {

vdtk::SceneSpec bench_scene(int frames) {
  vdtk::SceneSpec spec;
  spec.width = 64;
  spec.height = 48;
  spec.frame_count = frames;
  spec.intrinsics = {58, 58, 31.5, 23.5};
  spec.camera.position_waypoints = {{0, 0, 0}, {0.4, 0, 0.2}};
  spec.camera.look_at_waypoints = {{0, 0, 5}};
  vdtk::Primitive wall;
  wall.type = vdtk::PrimitiveType::kPlane;
  wall.center = {0, 0, 6};
  wall.normal = {-0.1, 0, -1};
  spec.static_primitives.push_back(wall);
  return spec;
}

void BM_RenderGt(benchmark::State& state) {
  const vdtk::SceneSpec spec = bench_scene(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(vdtk::render_gt(spec, 0));
  }
}
BENCHMARK(BM_RenderGt)->Arg(30)->Arg(110);

void BM_DenoiseVideo(benchmark::State& state) {
  const vdtk::SceneSpec spec = bench_scene(static_cast<int>(state.range(0)));
  const vdtk::GtBundle gt = vdtk::render_gt(spec, 0);
  vdtk::EstimatorSurrogateSpec noise;
  noise.kind = vdtk::SurrogateKind::kStereoJitter;
  noise.jitter_amplitude = 0.04;
  noise.seed = 5;
  const vdtk::DepthVideo corrupted = vdtk::corrupt(gt.depth, gt.masks, noise);
  vdtk::FusionConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(vdtk::denoise_video(corrupted, cfg, 11));
  }
}
BENCHMARK(BM_DenoiseVideo)->Arg(110)->Arg(220);

void BM_AlignGlobal(benchmark::State& state) {
  const vdtk::SceneSpec spec = bench_scene(static_cast<int>(state.range(0)));
  const vdtk::GtBundle gt = vdtk::render_gt(spec, 0);
  vdtk::EstimatorSurrogateSpec noise;
  noise.kind = vdtk::SurrogateKind::kStereoJitter;
  noise.jitter_amplitude = 0.05;
  noise.noise_sigma = 0.02;
  noise.seed = 6;
  const vdtk::PairGraph graph =
      vdtk::make_pairwise(gt.depth, gt.track, gt.masks, 2, noise);
  for (auto _ : state) {
    benchmark::DoNotOptimize(vdtk::align_global(graph));
  }
}
BENCHMARK(BM_AlignGlobal)->Arg(20)->Arg(60);

}  // namespace
