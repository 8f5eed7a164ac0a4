#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "vdtk/parallel.hpp"
#include "vdtk/spectral.hpp"
#include "vdtk/synth.hpp"

using namespace vdtk;

namespace {

SceneSpec plane_scene(int width, int height, int frames) {
  SceneSpec spec;
  spec.width = width;
  spec.height = height;
  spec.frame_count = frames;
  spec.intrinsics = {0.9 * width, 0.9 * width, (width - 1) / 2.0,
                     (height - 1) / 2.0};
  spec.camera.position_waypoints = {{0, 0, 0}};
  spec.camera.look_at_waypoints = {{0, 0, 1}};
  Primitive wall;
  wall.type = PrimitiveType::kPlane;
  wall.center = {0, 0, 2};
  wall.normal = {0, 0, -1};
  spec.static_primitives.push_back(wall);
  return spec;
}

// Signed frame-mean relative error; the carrier the corrupt() models inject.
std::vector<double> mean_relative_error(const DepthVideo& pred,
                                        const DepthVideo& gt) {
  std::vector<double> out(gt.frame_count(), 0.0);
  for (int t = 0; t < gt.frame_count(); ++t) {
    long double acc = 0;
    std::int64_t n = 0;
    for (int y = 0; y < gt.height(); ++y) {
      for (int x = 0; x < gt.width(); ++x) {
        if (!gt.valid(t, y, x) || !pred.valid(t, y, x)) continue;
        acc += (pred.at(t, y, x) - gt.at(t, y, x)) / gt.at(t, y, x);
        ++n;
      }
    }
    out[t] = n > 0 ? static_cast<double>(acc / n) : 0.0;
  }
  return out;
}

}  // namespace

TEST_CASE("fronto-parallel plane renders constant depth") {
  const SceneSpec spec = plane_scene(16, 12, 3);
  const GtBundle gt = render_gt(spec, 0);
  for (int t = 0; t < 3; ++t) {
    for (int y = 0; y < 12; ++y) {
      for (int x = 0; x < 16; ++x) {
        REQUIRE(gt.depth.valid(t, y, x));
        CHECK(gt.depth.at(t, y, x) == doctest::Approx(2.0).epsilon(1e-9));
        CHECK(!gt.masks.dynamic(t, y, x));
      }
    }
  }
}

TEST_CASE("camera advancing toward the plane shortens depth linearly") {
  SceneSpec spec = plane_scene(8, 6, 5);
  spec.camera.position_waypoints = {{0, 0, 0}, {0, 0, 0.4}};  // 0.1 per frame
  const GtBundle gt = render_gt(spec, 0);
  for (int t = 0; t < 5; ++t) {
    // stored as float32, so compare at its quantization level
    CHECK(gt.depth.at(t, 3, 4) == doctest::Approx(2.0 - 0.1 * t).epsilon(1e-6));
  }
}

TEST_CASE("dynamic sphere mask area matches the analytic projection") {
  SceneSpec spec = plane_scene(320, 240, 3);
  spec.intrinsics = {300, 300, 159.5, 119.5};
  Primitive ball;
  ball.type = PrimitiveType::kSphere;
  ball.radius = 0.25;
  ball.position_waypoints = {{-0.1, 0, 1.5}, {0.1, 0, 1.5}};
  spec.dynamic_primitives.push_back(ball);
  const GtBundle gt = render_gt(spec, 0);
  for (int t = 0; t < 3; ++t) {
    std::int64_t area = 0;
    for (int y = 0; y < 240; ++y) {
      for (int x = 0; x < 320; ++x) area += gt.masks.dynamic(t, y, x);
    }
    const double d = 1.5;  // center distance along the optical axis
    const double expected = std::numbers::pi *
                            std::pow(300.0 * ball.radius, 2) /
                            (d * d - ball.radius * ball.radius);
    CHECK(std::abs(area - expected) / expected < 0.02);
  }
}

TEST_CASE("correspondence round trip closes to subpixel precision") {
  SceneSpec spec = plane_scene(32, 24, 21);
  spec.camera.position_waypoints = {{0, 0, 0}, {0.3, 0.1, 0.2}};
  spec.camera.look_at_waypoints = {{0, 0, 2.0}};
  const GtBundle gt = render_gt(spec, 10);
  REQUIRE(!gt.correspondences.records.empty());
  for (const CorrespondenceRecord& r : gt.correspondences.records) {
    const int i = static_cast<int>(r.frame_i);
    const int j = static_cast<int>(r.frame_j);
    const Eigen::Vector3d world = transform_point(
        gt.track.pose(i),
        backproject(gt.track.intrinsics(i), r.u, r.v, gt.depth.at(i, r.v, r.u)));
    const Eigen::Matrix3d rj = gt.track.pose(j).topLeftCorner<3, 3>();
    const Eigen::Vector3d tj = gt.track.pose(j).topRightCorner<3, 1>();
    const Eigen::Vector3d cam = rj.transpose() * (world - tj);
    const Eigen::Vector2d pix = project(gt.track.intrinsics(j), cam);
    CHECK(std::abs(pix.x() - r.xj) < 1e-6);
    CHECK(std::abs(pix.y() - r.yj) < 1e-6);
  }
}

TEST_CASE("correspondence table file round trip") {
  SceneSpec spec = plane_scene(16, 12, 11);
  const GtBundle gt = render_gt(spec, 5);
  const auto path =
      std::filesystem::temp_directory_path() / "vdtk_test_corr.bin";
  write_correspondences(gt.correspondences, path);
  const CorrespondenceTable back = read_correspondences(path);
  REQUIRE(back.records.size() == gt.correspondences.records.size());
  CHECK(back.delta == gt.correspondences.delta);
  for (std::size_t k = 0; k < back.records.size(); ++k) {
    CHECK(back.records[k].u == gt.correspondences.records[k].u);
    CHECK(back.records[k].xj == gt.correspondences.records[k].xj);
  }
}

TEST_CASE("rendering is deterministic across thread budgets") {
  SceneSpec spec = plane_scene(24, 18, 6);
  spec.camera.position_waypoints = {{0, 0, 0}, {0.2, 0, 0.1}};
  Primitive ball;
  ball.type = PrimitiveType::kSphere;
  ball.radius = 0.2;
  ball.position_waypoints = {{-0.3, 0, 1.4}, {0.3, 0, 1.4}};
  spec.dynamic_primitives.push_back(ball);

  set_thread_budget(1);
  const GtBundle a = render_gt(spec, 0);
  set_thread_budget(4);
  const GtBundle b = render_gt(spec, 0);
  set_thread_budget(0);
  for (int t = 0; t < 6; ++t) {
    CHECK(std::memcmp(a.depth.frame(t).data(), b.depth.frame(t).data(),
                      a.depth.pixels_per_frame() * sizeof(float)) == 0);
  }
}

TEST_CASE("scene validation rejects bad specs") {
  CHECK_THROWS_AS(scene_spec_from_json_string("{\"width\": 4}"), UsageError);
  CHECK_THROWS_AS(scene_spec_from_json_string("not json"), UsageError);
  SceneSpec behind = plane_scene(8, 6, 4);
  behind.static_primitives[0].center = {0, 0, -2};  // behind the camera
  CHECK_THROWS_AS(behind.validate(), UsageError);
  SceneSpec empty = plane_scene(8, 6, 0);
  CHECK_THROWS_AS(empty.validate(), UsageError);
}

TEST_CASE("corrupt with zero amplitudes is the identity") {
  const SceneSpec spec = plane_scene(12, 9, 8);
  const GtBundle gt = render_gt(spec, 0);
  for (SurrogateKind kind :
       {SurrogateKind::kStereoJitter, SurrogateKind::kWindowDrift,
        SurrogateKind::kGaussianPixel}) {
    EstimatorSurrogateSpec s;
    s.kind = kind;
    s.seed = 5;
    const DepthVideo out = corrupt(gt.depth, gt.masks, s);
    for (int t = 0; t < 8; ++t) {
      CHECK(std::memcmp(out.frame(t).data(), gt.depth.frame(t).data(),
                        gt.depth.pixels_per_frame() * sizeof(float)) == 0);
    }
  }
}

TEST_CASE("corrupt preserves validity and positivity") {
  SceneSpec spec = plane_scene(16, 12, 30);
  spec.static_primitives[0].half_extent = {0.8, 0.5, 0};  // some rays miss
  const GtBundle gt = render_gt(spec, 0);
  EstimatorSurrogateSpec s;
  s.kind = SurrogateKind::kGaussianPixel;
  s.noise_sigma = 0.8;  // large enough to hit the clamp
  s.seed = 6;
  const DepthVideo out = corrupt(gt.depth, gt.masks, s);
  for (int t = 0; t < 30; ++t) {
    for (int y = 0; y < 12; ++y) {
      for (int x = 0; x < 16; ++x) {
        CHECK(out.valid(t, y, x) == gt.depth.valid(t, y, x));
        if (out.valid(t, y, x)) CHECK(out.at(t, y, x) > 0.0f);
      }
    }
  }
}

TEST_CASE("window drift produces two levels on a 220-frame video") {
  const SceneSpec spec = plane_scene(16, 12, 220);
  const GtBundle gt = render_gt(spec, 0);
  EstimatorSurrogateSpec s;
  s.kind = SurrogateKind::kWindowDrift;
  s.drift_amplitude = 0.05;
  s.drift_window_length = 110;
  s.seed = 11;
  const DepthVideo out = corrupt(gt.depth, gt.masks, s);

  const std::vector<double> err = mean_relative_error(out, gt.depth);
  // piecewise constant: two levels, constant inside each window
  for (int t = 1; t < 110; ++t) CHECK(err[t] == doctest::Approx(err[0]).epsilon(1e-9));
  for (int t = 111; t < 220; ++t) CHECK(err[t] == doctest::Approx(err[110]).epsilon(1e-9));
  CHECK(std::abs(err[0]) >= 0.024);
  CHECK(std::abs(err[0]) <= 0.051);

  // spectral bookkeeping: energy concentrated in the three lowest of 11 bands
  BandPartition p = make_band_partition(220, 11, BandScheme::kExponential);
  const std::vector<double> energy = band_energies(err, p);
  double low = energy[0] + energy[1] + energy[2];
  double total = 0;
  for (double e : energy) total += e;
  CHECK(low / total >= 0.90);
}

TEST_CASE("stereo jitter concentrates energy in the configured band") {
  const SceneSpec spec = plane_scene(16, 12, 220);
  const GtBundle gt = render_gt(spec, 0);
  EstimatorSurrogateSpec s;
  s.kind = SurrogateKind::kStereoJitter;
  s.jitter_amplitude = 0.04;
  s.jitter_band_lo = 0.3;
  s.jitter_band_hi = 0.5;
  s.seed = 12;
  const DepthVideo out = corrupt(gt.depth, gt.masks, s);

  const std::vector<double> err = mean_relative_error(out, gt.depth);
  BandPartition p = make_band_partition(220, 11, BandScheme::kExponential);
  const std::vector<double> energy = band_energies(err, p);
  double total = 0, above_midpoint = 0;
  for (int b = 0; b < p.band_count; ++b) {
    total += energy[b];
    const auto [lo, hi] = p.band_range(b);
    if (lo > p.max_bin / 2) above_midpoint += energy[b];
  }
  CHECK(above_midpoint / total >= 0.80);
}

TEST_CASE("jitter doubles inside dynamic regions") {
  SceneSpec spec = plane_scene(32, 24, 64);
  Primitive ball;
  ball.type = PrimitiveType::kSphere;
  ball.radius = 0.45;
  ball.position_waypoints = {{-0.15, 0, 1.3}, {0.15, 0, 1.3}};
  spec.dynamic_primitives.push_back(ball);
  const GtBundle gt = render_gt(spec, 0);
  EstimatorSurrogateSpec s;
  s.kind = SurrogateKind::kStereoJitter;
  s.jitter_amplitude = 0.05;
  s.seed = 13;
  const DepthVideo out = corrupt(gt.depth, gt.masks, s);
  long double dyn = 0, stat = 0;
  std::int64_t dyn_n = 0, stat_n = 0;
  for (int t = 0; t < 64; ++t) {
    for (int y = 0; y < 24; ++y) {
      for (int x = 0; x < 32; ++x) {
        if (!gt.depth.valid(t, y, x)) continue;
        const double rel = std::abs(out.at(t, y, x) - gt.depth.at(t, y, x)) /
                           gt.depth.at(t, y, x);
        if (gt.masks.dynamic(t, y, x)) {
          dyn += rel;
          ++dyn_n;
        } else {
          stat += rel;
          ++stat_n;
        }
      }
    }
  }
  REQUIRE(dyn_n > 0);
  const double mean_dyn = static_cast<double>(dyn / dyn_n);
  const double mean_stat = static_cast<double>(stat / stat_n);
  CHECK(mean_dyn > 1.6 * mean_stat);
  CHECK(mean_dyn < 2.4 * mean_stat);
}

TEST_CASE("make_pairwise edge count and confidence rules") {
  const SceneSpec spec = plane_scene(12, 9, 5);
  GtBundle gt = render_gt(spec, 0);
  gt.masks.set_dynamic(0, 2, 3, true);
  EstimatorSurrogateSpec clean;
  clean.kind = SurrogateKind::kGaussianPixel;
  const PairGraph graph = make_pairwise(gt.depth, gt.track, gt.masks, 2, clean);
  CHECK(graph.edges.size() == 7);
  const PairwisePrediction& first = graph.edges.front();
  CHECK(first.confidence_i[2 * 12 + 3] == 0.0);
  for (std::size_t p = 0; p < first.confidence_i.size(); ++p) {
    if (p == 2 * 12 + 3) continue;
    CHECK(first.confidence_i[p] > 0.5);
    CHECK(first.confidence_i[p] <= 1.0);
  }
}
