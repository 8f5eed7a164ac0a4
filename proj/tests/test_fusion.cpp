#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <numbers>
#include <random>

#include "vdtk/fusion.hpp"
#include "vdtk/parallel.hpp"
#include "vdtk/spectral.hpp"
#include "vdtk/synth.hpp"

using namespace vdtk;

namespace {

DenoiserConfig test_denoiser(double alpha, double cutoff_hz, bool null_noise) {
  DenoiserConfig cfg;
  cfg.alpha = alpha;
  cfg.cutoff_hz = cutoff_hz;
  cfg.null_noise = null_noise;
  return cfg;
}

DepthVideo trajectory_video(const std::vector<std::vector<double>>& pixels,
                            int frames) {
  const int w = static_cast<int>(pixels.size());
  DepthVideo video(w, 1, frames);
  for (int t = 0; t < frames; ++t) {
    for (int x = 0; x < w; ++x) {
      video.set(t, 0, x, static_cast<float>(pixels[x][t]));
    }
  }
  return video;
}

}  // namespace

TEST_CASE("window plans") {
  WindowPlan one = plan_windows(110, 110, 25);
  CHECK(one.windows == std::vector<std::pair<int, int>>{{0, 109}});

  WindowPlan two = plan_windows(195, 110, 25);
  CHECK(two.windows == std::vector<std::pair<int, int>>{{0, 109}, {85, 194}});

  WindowPlan four = plan_windows(300, 110, 25);
  CHECK(four.windows == std::vector<std::pair<int, int>>{
                            {0, 109}, {85, 194}, {170, 279}, {190, 299}});

  WindowPlan shorter = plan_windows(50, 110, 25);
  CHECK(shorter.windows == std::vector<std::pair<int, int>>{{0, 49}});

  CHECK_THROWS_AS(plan_windows(100, 20, 20), UsageError);
  CHECK_THROWS_AS(plan_windows(100, 20, 25), UsageError);
}

TEST_CASE("identity configuration returns the input bit for bit") {
  std::mt19937 gen(61);
  std::uniform_real_distribution<float> dist(0.5f, 4.0f);
  DepthVideo video(6, 5, 12);
  for (int t = 0; t < 12; ++t) {
    for (int y = 0; y < 5; ++y) {
      for (int x = 0; x < 6; ++x) video.set(t, y, x, dist(gen));
    }
  }
  const DepthVideo out =
      spectral_denoise_window(video, test_denoiser(1.0, 0.2, true), 7);
  for (int t = 0; t < 12; ++t) {
    CHECK(std::memcmp(out.frame(t).data(), video.frame(t).data(),
                      video.pixels_per_frame() * sizeof(float)) == 0);
  }
}

TEST_CASE("constant trajectories keep their mean under any alpha") {
  DepthVideo video(4, 1, 16);
  for (int t = 0; t < 16; ++t) {
    for (int x = 0; x < 4; ++x) video.set(t, 0, x, 1.0f + 0.5f * x);
  }
  const DepthVideo out =
      spectral_denoise_window(video, test_denoiser(0.2, 0.1, false), 3);
  for (int x = 0; x < 4; ++x) {
    long double mean = 0;
    for (int t = 0; t < 16; ++t) mean += out.at(t, 0, x);
    mean /= 16;
    CHECK(std::abs(static_cast<double>(mean) - (1.0 + 0.5 * x)) < 1e-6);
    // per-frame values stay constant: the only content is DC
    for (int t = 0; t < 16; ++t) {
      CHECK(out.at(t, 0, x) == doctest::Approx(1.0 + 0.5 * x).epsilon(1e-6));
    }
  }
}

TEST_CASE("denoiser shrinks high-band error while keeping the low band") {
  // band-limited ground truth plus high-frequency jitter on each trajectory
  const int frames = 64;
  std::mt19937 gen(62);
  std::uniform_real_distribution<double> phase(0.0, 2 * std::numbers::pi);
  std::vector<std::vector<double>> gt_traj(8), noisy_traj(8);
  for (int p = 0; p < 8; ++p) {
    const double ph1 = phase(gen), ph2 = phase(gen);
    gt_traj[p].resize(frames);
    noisy_traj[p].resize(frames);
    for (int t = 0; t < frames; ++t) {
      const double low = 2.0 + 0.3 * std::cos(2 * std::numbers::pi * t / frames + ph1);
      const double high = 0.15 * std::cos(2 * std::numbers::pi * 22 * t / frames + ph2);
      gt_traj[p][t] = low;
      noisy_traj[p][t] = low + high;
    }
  }
  DepthVideo gt = trajectory_video(gt_traj, frames);
  DepthVideo noisy = trajectory_video(noisy_traj, frames);

  DenoiserConfig cfg = test_denoiser(0.25, 0.05, false);  // keep bins <= 3
  const DepthVideo out = spectral_denoise_window(noisy, cfg, 5);

  // spectral bookkeeping on the per-pixel error trajectories
  const int k_split = 8;
  auto band_error_energy = [&](const DepthVideo& video, bool high) {
    long double acc = 0;
    for (int x = 0; x < 8; ++x) {
      std::vector<double> err(frames);
      for (int t = 0; t < frames; ++t) err[t] = video.at(t, 0, x) - gt_traj[x][t];
      const auto coeffs = dft_real(err);
      for (int k = 1; k < frames; ++k) {
        const int freq = std::min(k, frames - k);
        if ((freq > k_split) == high) acc += std::norm(coeffs[k]);
      }
    }
    return static_cast<double>(acc);
  };
  const double high_in = band_error_energy(noisy, true);
  const double high_out = band_error_energy(out, true);
  const double low_in = band_error_energy(noisy, false);
  const double low_out = band_error_energy(out, false);
  CHECK(high_out <= 0.3 * high_in);
  CHECK(low_out <= 1.1 * low_in + 1e-9);
}

TEST_CASE("null-noise energy never increases and DC is preserved") {
  std::mt19937 gen(63);
  std::uniform_real_distribution<double> dist(0.1, 0.9);

  // double-precision trajectory kernel: DC preserved to 1e-12
  for (double alpha : {0.1, 0.5, 0.9}) {
    DenoiserConfig cfg = test_denoiser(alpha, 0.08, true);
    std::vector<double> u(24);
    for (double& v : u) v = dist(gen);
    const std::vector<double> out = denoise_trajectory(u, cfg, 1);
    long double mean_in = 0, mean_out = 0;
    for (int t = 0; t < 24; ++t) {
      mean_in += u[t];
      mean_out += out[t];
    }
    mean_in /= 24;
    mean_out /= 24;
    CHECK(std::abs(static_cast<double>(mean_out - mean_in)) < 1e-12);
    long double e_in = 0, e_out = 0;
    for (int t = 0; t < 24; ++t) {
      e_in += std::pow(u[t] - static_cast<double>(mean_in), 2);
      e_out += std::pow(out[t] - static_cast<double>(mean_out), 2);
    }
    CHECK(static_cast<double>(e_out) <= static_cast<double>(e_in) + 1e-12);
  }

  // video path: same invariants at float32 storage precision
  std::uniform_real_distribution<float> fdist(1.0f, 3.0f);
  DepthVideo video(5, 4, 24);
  for (int t = 0; t < 24; ++t) {
    for (int y = 0; y < 4; ++y) {
      for (int x = 0; x < 5; ++x) video.set(t, y, x, fdist(gen));
    }
  }
  const DepthVideo out =
      spectral_denoise_window(video, test_denoiser(0.3, 0.08, true), 1);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 5; ++x) {
      long double mean_in = 0, mean_out = 0;
      for (int t = 0; t < 24; ++t) {
        mean_in += video.at(t, y, x);
        mean_out += out.at(t, y, x);
      }
      CHECK(std::abs(static_cast<double>(mean_out - mean_in)) / 24 < 1e-6);
      long double e_in = 0, e_out = 0;
      for (int t = 0; t < 24; ++t) {
        e_in += std::pow(video.at(t, y, x) - static_cast<double>(mean_in) / 24, 2);
        e_out += std::pow(out.at(t, y, x) - static_cast<double>(mean_out) / 24, 2);
      }
      CHECK(static_cast<double>(e_out) <= static_cast<double>(e_in) + 1e-6);
    }
  }
}

TEST_CASE("trajectories with invalid samples pass through unchanged") {
  DepthVideo video(2, 1, 8);
  for (int t = 0; t < 8; ++t) {
    video.set(t, 0, 0, 2.0f + 0.5f * (t % 2));
    video.set(t, 0, 1, 3.0f);
  }
  video.invalidate(3, 0, 0);
  const DepthVideo out =
      spectral_denoise_window(video, test_denoiser(0.2, 0.1, true), 2);
  for (int t = 0; t < 8; ++t) {
    if (t == 3) {
      CHECK(!out.valid(t, 0, 0));
    } else {
      CHECK(out.at(t, 0, 0) == video.at(t, 0, 0));  // untouched
    }
  }
  CHECK(out.at(0, 0, 1) == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("window shorter than four frames is rejected") {
  DepthVideo tiny(2, 2, 3);
  for (int t = 0; t < 3; ++t)
    for (int y = 0; y < 2; ++y)
      for (int x = 0; x < 2; ++x) tiny.set(t, y, x, 1.0f);
  CHECK_THROWS_AS(spectral_denoise_window(tiny, test_denoiser(0.5, 0.1, true), 0),
                  DataError);
}

TEST_CASE("blending") {
  // single window: identity
  DepthVideo video(2, 1, 6);
  for (int t = 0; t < 6; ++t) {
    video.set(t, 0, 0, 1.0f + t);
    video.set(t, 0, 1, 2.0f);
  }
  WindowPlan plan = plan_windows(6, 10, 2);
  const DepthVideo same = blend_windows({video}, plan);
  for (int t = 0; t < 6; ++t) CHECK(same.at(t, 0, 0) == video.at(t, 0, 0));

  // two windows, identical in the overlap: unchanged
  WindowPlan two;
  two.window_length = 4;
  two.overlap = 2;
  two.windows = {{0, 3}, {2, 5}};
  DepthVideo a(1, 1, 4), b(1, 1, 4);
  for (int t = 0; t < 4; ++t) {
    a.set(t, 0, 0, 5.0f);
    b.set(t, 0, 0, 5.0f);
  }
  const DepthVideo merged = blend_windows({a, b}, two);
  REQUIRE(merged.frame_count() == 6);
  for (int t = 0; t < 6; ++t) CHECK(merged.at(t, 0, 0) == 5.0f);

  // constant offset in the overlap: linear ramp between the two levels
  DepthVideo c(1, 1, 4);
  for (int t = 0; t < 4; ++t) c.set(t, 0, 0, 7.0f);
  const DepthVideo ramped = blend_windows({a, c}, two);
  CHECK(ramped.at(0, 0, 0) == 5.0f);
  CHECK(ramped.at(1, 0, 0) == 5.0f);
  CHECK(ramped.at(2, 0, 0) == doctest::Approx(5.0).epsilon(1e-9));  // ramp 0
  CHECK(ramped.at(3, 0, 0) == doctest::Approx(7.0).epsilon(1e-9));  // ramp 1
  CHECK(ramped.at(4, 0, 0) == 7.0f);
  CHECK(ramped.at(5, 0, 0) == 7.0f);

  // hard cut: the later window wins across the whole overlap
  const DepthVideo cut = blend_windows({a, c}, two, false);
  CHECK(cut.at(2, 0, 0) == 7.0f);
  CHECK(cut.at(3, 0, 0) == 7.0f);

  DepthVideo wrong(1, 1, 3);
  CHECK_THROWS_AS(blend_windows({a, wrong}, two), DataError);
}

namespace {

SceneSpec fusion_scene(int frames) {
  SceneSpec spec;
  spec.width = 20;
  spec.height = 15;
  spec.frame_count = frames;
  spec.intrinsics = {18, 18, 9.5, 7.0};
  spec.camera.position_waypoints = {{0, 0, 0}, {0.4, 0.1, 0.2}};
  spec.camera.look_at_waypoints = {{0, 0, 4}};
  Primitive wall;
  wall.type = PrimitiveType::kPlane;
  wall.center = {0, 0, 5};
  wall.normal = {0, 0, -1};
  spec.static_primitives.push_back(wall);
  return spec;
}

}  // namespace

TEST_CASE("noise-free pairs with the identity denoiser reproduce stage 1") {
  const SceneSpec spec = fusion_scene(12);
  const GtBundle gt = render_gt(spec, 0);
  EstimatorSurrogateSpec clean;
  clean.kind = SurrogateKind::kGaussianPixel;
  const PairGraph graph = make_pairwise(gt.depth, gt.track, gt.masks, 2, clean);

  FusionConfig cfg;
  cfg.window_length = 8;
  cfg.overlap = 3;
  cfg.denoiser = test_denoiser(1.0, 0.2, true);
  const TwoStageResult result = run_two_stage(graph, cfg, 17);
  REQUIRE(result.fused.same_shape(result.stage1.depth));
  for (int t = 0; t < 12; ++t) {
    CHECK(std::memcmp(result.fused.frame(t).data(),
                      result.stage1.depth.frame(t).data(),
                      result.fused.pixels_per_frame() * sizeof(float)) == 0);
  }
}

TEST_CASE("two-stage output is deterministic across thread budgets") {
  const SceneSpec spec = fusion_scene(20);
  const GtBundle gt = render_gt(spec, 0);
  EstimatorSurrogateSpec noisy;
  noisy.kind = SurrogateKind::kStereoJitter;
  noisy.jitter_amplitude = 0.03;
  noisy.noise_sigma = 0.01;
  noisy.seed = 2;
  const PairGraph graph = make_pairwise(gt.depth, gt.track, gt.masks, 2, noisy);

  FusionConfig cfg;
  cfg.window_length = 10;
  cfg.overlap = 4;
  cfg.denoiser = test_denoiser(0.3, 0.08, false);

  set_thread_budget(1);
  const TwoStageResult a = run_two_stage(graph, cfg, 99);
  set_thread_budget(4);
  const TwoStageResult b = run_two_stage(graph, cfg, 99);
  set_thread_budget(0);
  for (int t = 0; t < 20; ++t) {
    CHECK(std::memcmp(a.fused.frame(t).data(), b.fused.frame(t).data(),
                      a.fused.pixels_per_frame() * sizeof(float)) == 0);
  }
}

TEST_CASE("stage 2 alone does not repair window drift") {
  const SceneSpec spec = fusion_scene(220);
  const GtBundle gt = render_gt(spec, 0);
  EstimatorSurrogateSpec drift;
  drift.kind = SurrogateKind::kWindowDrift;
  drift.drift_amplitude = 0.05;
  drift.drift_window_length = 110;
  drift.seed = 21;
  const DepthVideo drifted = corrupt(gt.depth, gt.masks, drift);

  FusionConfig cfg;  // default 110/25 windows
  cfg.denoiser = test_denoiser(0.3, 0.05, false);
  const DepthVideo out = denoise_video(drifted, cfg, 4);

  const int frames = 220;
  auto low_band_energy = [&](const DepthVideo& pred) {
    std::vector<double> err(frames);
    for (int t = 0; t < frames; ++t) {
      long double acc = 0;
      std::int64_t n = 0;
      for (int y = 0; y < 15; ++y) {
        for (int x = 0; x < 20; ++x) {
          if (!pred.valid(t, y, x)) continue;
          acc += (pred.at(t, y, x) - gt.depth.at(t, y, x)) / gt.depth.at(t, y, x);
          ++n;
        }
      }
      err[t] = static_cast<double>(acc / n);
    }
    const auto coeffs = dft_real(err);
    double energy = 0;
    for (int k = 0; k < frames; ++k) {
      if (std::min(k, frames - k) <= 3) energy += std::norm(coeffs[k]);
    }
    return energy;
  };
  const double before = low_band_energy(drifted);
  const double after = low_band_energy(out);
  CHECK(std::abs(after - before) <= 0.05 * before);
}
