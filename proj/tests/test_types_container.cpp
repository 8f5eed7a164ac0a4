#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

#include "vdtk/container.hpp"
#include "vdtk/types.hpp"

using namespace vdtk;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("vdtk_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

DepthVideo random_video(std::mt19937& gen, int w, int h, int t,
                        double invalid_rate = 0.1) {
  DepthVideo video(w, h, t);
  std::uniform_real_distribution<float> dist(0.1f, 10.0f);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (int f = 0; f < t; ++f) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (coin(gen) < invalid_rate) {
          video.invalidate(f, y, x);
        } else {
          video.set(f, y, x, dist(gen));
        }
      }
    }
  }
  return video;
}

}  // namespace

TEST_CASE("smallest container payload is exactly four bytes") {
  const fs::path dir = temp_dir("tiny");
  DepthVideo video(1, 1, 1);
  video.set(0, 0, 0, 2.0f);
  write_container(video, nullptr, nullptr, dir);
  std::ifstream in(dir / "depth_000000.f32", std::ios::binary | std::ios::ate);
  REQUIRE(in.good());
  CHECK(in.tellg() == std::streampos(4));
  in.seekg(0);
  float value = 0;
  in.read(reinterpret_cast<char*>(&value), 4);
  CHECK(value == 2.0f);
}

TEST_CASE("container round trip is bit exact") {
  const fs::path dir = temp_dir("roundtrip");
  std::mt19937 gen(3);
  DepthVideo video = random_video(gen, 16, 12, 5);

  CameraTrack track(5);
  for (int t = 0; t < 5; ++t) {
    track.intrinsics(t) = {50.0 + t, 51.0, 7.5, 5.5};
    Eigen::Matrix4d pose = Eigen::Matrix4d::Identity();
    const double a = 0.03 * t;
    pose.topLeftCorner<3, 3>() =
        Eigen::AngleAxisd(a, Eigen::Vector3d(0, 1, 0)).toRotationMatrix();
    pose.topRightCorner<3, 1>() = Eigen::Vector3d(0.1 * t, 0, -0.2 * t);
    track.pose(t) = pose;
  }
  RegionMasks masks(16, 12, 5);
  masks.set_dynamic(2, 3, 4, true);
  masks.set_dynamic(4, 0, 0, true);

  write_container(video, &track, &masks, dir);
  ContainerContents back = read_container(dir);

  REQUIRE(back.video.same_shape(video));
  for (int t = 0; t < 5; ++t) {
    CHECK(std::memcmp(back.video.frame(t).data(), video.frame(t).data(),
                      video.pixels_per_frame() * sizeof(float)) == 0);
    CHECK(std::memcmp(back.video.frame_validity(t).data(),
                      video.frame_validity(t).data(),
                      video.pixels_per_frame()) == 0);
  }
  REQUIRE(back.track.has_value());
  for (int t = 0; t < 5; ++t) {
    CHECK((back.track->pose(t) - track.pose(t)).cwiseAbs().maxCoeff() == 0.0);
    CHECK(back.track->intrinsics(t).fx == track.intrinsics(t).fx);
  }
  REQUIRE(back.masks.has_value());
  CHECK(back.masks->dynamic(2, 3, 4));
  CHECK(back.masks->dynamic(4, 0, 0));
  CHECK(!back.masks->dynamic(0, 0, 0));
}

TEST_CASE("missing payload file is a structural error") {
  const fs::path dir = temp_dir("missing");
  std::mt19937 gen(4);
  DepthVideo video = random_video(gen, 4, 4, 5, 0.0);
  write_container(video, nullptr, nullptr, dir);
  fs::remove(dir / "depth_000004.f32");
  CHECK_THROWS_AS(read_container(dir), DataError);
}

TEST_CASE("truncated payload names the offending frame") {
  const fs::path dir = temp_dir("truncated");
  std::mt19937 gen(5);
  DepthVideo video = random_video(gen, 4, 4, 5, 0.0);
  write_container(video, nullptr, nullptr, dir);
  fs::resize_file(dir / "depth_000002.f32", 10);
  try {
    read_container(dir);
    FAIL("expected a load error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("frame 2") != std::string::npos);
  }
}

TEST_CASE("unknown-major format version is rejected") {
  const fs::path dir = temp_dir("version");
  DepthVideo video(2, 2, 1);
  for (int y = 0; y < 2; ++y)
    for (int x = 0; x < 2; ++x) video.set(0, y, x, 1.0f);
  write_container(video, nullptr, nullptr, dir);
  std::string manifest;
  {
    std::ifstream in(dir / "manifest.json");
    manifest.assign(std::istreambuf_iterator<char>(in),
                    std::istreambuf_iterator<char>());
  }
  const auto pos = manifest.find("\"1.0\"");
  REQUIRE(pos != std::string::npos);
  manifest.replace(pos, 5, "\"9.0\"");
  std::ofstream(dir / "manifest.json", std::ios::trunc) << manifest;
  CHECK_THROWS_AS(read_container(dir), DataError);
}

TEST_CASE("unknown manifest keys are ignored") {
  const fs::path dir = temp_dir("extrakeys");
  DepthVideo video(2, 2, 1);
  for (int y = 0; y < 2; ++y)
    for (int x = 0; x < 2; ++x) video.set(0, y, x, 1.0f);
  write_container(video, nullptr, nullptr, dir);
  std::string manifest;
  {
    std::ifstream in(dir / "manifest.json");
    manifest.assign(std::istreambuf_iterator<char>(in),
                    std::istreambuf_iterator<char>());
  }
  manifest.insert(manifest.find('{') + 1, "\"future_field\": [1, 2, 3],");
  std::ofstream(dir / "manifest.json", std::ios::trunc) << manifest;
  CHECK_NOTHROW(read_container(dir));
}

TEST_CASE("negative payload values are a load error naming the frame") {
  const fs::path dir = temp_dir("badvalue");
  DepthVideo video(2, 1, 2);
  video.set(0, 0, 0, 1.0f);
  video.set(0, 0, 1, 1.0f);
  video.set(1, 0, 0, 1.0f);
  video.set(1, 0, 1, 1.0f);
  write_container(video, nullptr, nullptr, dir);
  {
    std::fstream f(dir / "depth_000001.f32",
                   std::ios::binary | std::ios::in | std::ios::out);
    const float bad = -3.0f;
    f.seekp(4);
    f.write(reinterpret_cast<const char*>(&bad), 4);
  }
  try {
    read_container(dir);
    FAIL("expected a load error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("frame 1") != std::string::npos);
  }
}

TEST_CASE("resize_nearest identity and block upscale") {
  std::mt19937 gen(6);
  DepthVideo video = random_video(gen, 6, 4, 2);
  DepthVideo same = resize_nearest(video, 6, 4);
  for (int t = 0; t < 2; ++t) {
    CHECK(std::memcmp(same.frame(t).data(), video.frame(t).data(),
                      video.pixels_per_frame() * sizeof(float)) == 0);
  }

  DepthVideo small(2, 2, 1);
  small.set(0, 0, 0, 1.0f);
  small.set(0, 0, 1, 2.0f);
  small.set(0, 1, 0, 3.0f);
  small.set(0, 1, 1, 4.0f);
  DepthVideo big = resize_nearest(small, 4, 4);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 4; ++x) {
      CHECK(big.at(0, y, x) == small.at(0, y / 2, x / 2));
    }
  }
}

TEST_CASE("resize_nearest matches the index-arithmetic oracle") {
  std::mt19937 gen(7);
  DepthVideo video = random_video(gen, 7, 5, 3);
  DepthVideo out = resize_nearest(video, 3, 2);
  for (int t = 0; t < 3; ++t) {
    for (int y = 0; y < 2; ++y) {
      for (int x = 0; x < 3; ++x) {
        const int sx = static_cast<int>((x + 0.5) * 7.0 / 3.0);
        const int sy = static_cast<int>((y + 0.5) * 5.0 / 2.0);
        CHECK(out.valid(t, y, x) == video.valid(t, sy, sx));
        if (out.valid(t, y, x)) {
          CHECK(out.at(t, y, x) == video.at(t, sy, sx));
        }
      }
    }
  }
  // idempotent at fixed size
  DepthVideo twice = resize_nearest(out, 3, 2);
  for (int t = 0; t < 3; ++t) {
    CHECK(std::memcmp(twice.frame(t).data(), out.frame(t).data(),
                      out.pixels_per_frame() * sizeof(float)) == 0);
  }
}

TEST_CASE("camera track validation catches bad rotations") {
  CameraTrack track(1);
  track.intrinsics(0) = {10, 10, 1, 1};
  track.pose(0)(0, 0) = 2.0;  // breaks orthonormality
  CHECK_THROWS_AS(track.validate(), DataError);

  CameraTrack reflected(1);
  reflected.intrinsics(0) = {10, 10, 1, 1};
  reflected.pose(0).topLeftCorner<3, 3>() =
      Eigen::Vector3d(1, 1, -1).asDiagonal();  // det -1
  CHECK_THROWS_AS(reflected.validate(), DataError);
}

TEST_CASE("reciprocal flips value kind on valid pixels") {
  DepthVideo depth(2, 1, 1, ValueKind::kDepth);
  depth.set(0, 0, 0, 4.0f);
  depth.invalidate(0, 0, 1);
  DepthVideo disp = reciprocal(depth);
  CHECK(disp.kind() == ValueKind::kDisparity);
  CHECK(disp.at(0, 0, 0) == 0.25f);
  CHECK(!disp.valid(0, 0, 1));
}

TEST_CASE("video validate names the offending frame") {
  DepthVideo video(1, 1, 3);
  video.set(0, 0, 0, 1.0f);
  video.set(1, 0, 0, 1.0f);
  video.set(2, 0, 0, 1.0f);
  video.frame(1)[0] = -2.0f;  // corrupt in place while still flagged valid
  try {
    video.validate();
    FAIL("expected validation failure");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("frame 1") != std::string::npos);
  }
}
