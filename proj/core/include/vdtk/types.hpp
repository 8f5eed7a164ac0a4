#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vdtk/error.hpp"

namespace vdtk {

enum class ValueKind { kDepth, kDisparity };

std::string to_string(ValueKind kind);
ValueKind value_kind_from_string(const std::string& s);

// A time-ordered stack of scalar grids (depth in meters or disparity in 1/m)
// with a per-pixel validity flag. Valid values are finite and strictly
// positive; invalid pixels store 0.
class DepthVideo {
 public:
  DepthVideo() = default;
  DepthVideo(int width, int height, int frame_count,
             ValueKind kind = ValueKind::kDepth);

  int width() const { return width_; }
  int height() const { return height_; }
  int frame_count() const { return frame_count_; }
  ValueKind kind() const { return kind_; }
  void set_kind(ValueKind kind) { kind_ = kind; }
  std::int64_t pixels_per_frame() const {
    return static_cast<std::int64_t>(width_) * height_;
  }

  float at(int t, int y, int x) const { return values_[index(t, y, x)]; }
  float& at(int t, int y, int x) { return values_[index(t, y, x)]; }
  bool valid(int t, int y, int x) const { return valid_[index(t, y, x)] != 0; }

  // Marks a pixel valid/invalid; invalidation zeroes the stored value.
  void set(int t, int y, int x, float value) {
    values_[index(t, y, x)] = value;
    valid_[index(t, y, x)] = 1;
  }
  void invalidate(int t, int y, int x) {
    values_[index(t, y, x)] = 0.0f;
    valid_[index(t, y, x)] = 0;
  }

  std::span<const float> frame(int t) const {
    return {values_.data() + index(t, 0, 0),
            static_cast<std::size_t>(pixels_per_frame())};
  }
  std::span<float> frame(int t) {
    return {values_.data() + index(t, 0, 0),
            static_cast<std::size_t>(pixels_per_frame())};
  }
  std::span<const std::uint8_t> frame_validity(int t) const {
    return {valid_.data() + index(t, 0, 0),
            static_cast<std::size_t>(pixels_per_frame())};
  }
  std::span<std::uint8_t> frame_validity(int t) {
    return {valid_.data() + index(t, 0, 0),
            static_cast<std::size_t>(pixels_per_frame())};
  }

  std::int64_t valid_count() const;
  bool same_shape(const DepthVideo& other) const {
    return width_ == other.width_ && height_ == other.height_ &&
           frame_count_ == other.frame_count_;
  }

  // Throws DataError if any valid value is non-finite or <= 0, naming the
  // offending frame.
  void validate() const;

  std::int64_t index(int t, int y, int x) const {
    return (static_cast<std::int64_t>(t) * height_ + y) * width_ + x;
  }

 private:
  int width_ = 0;
  int height_ = 0;
  int frame_count_ = 0;
  ValueKind kind_ = ValueKind::kDepth;
  std::vector<float> values_;
  std::vector<std::uint8_t> valid_;
};

struct Intrinsics {
  double fx = 0, fy = 0, cx = 0, cy = 0;
};

// Per-frame pinhole intrinsics and rigid camera-to-world poses.
// Convention: right-handed, +x right, +y down, +z forward; poses stored as
// 4x4 with orthonormal rotation, det +1.
class CameraTrack {
 public:
  CameraTrack() = default;
  explicit CameraTrack(int frame_count)
      : intrinsics_(frame_count),
        poses_(frame_count, Eigen::Matrix4d::Identity()) {}

  int frame_count() const { return static_cast<int>(poses_.size()); }
  const Intrinsics& intrinsics(int t) const { return intrinsics_[t]; }
  Intrinsics& intrinsics(int t) { return intrinsics_[t]; }
  const Eigen::Matrix4d& pose(int t) const { return poses_[t]; }
  Eigen::Matrix4d& pose(int t) { return poses_[t]; }

  // Orthonormality/determinant to 1e-9 plus positive focal lengths; the
  // optional video binds principal-point bounds.
  void validate(const DepthVideo* bound = nullptr) const;

 private:
  std::vector<Intrinsics> intrinsics_;
  std::vector<Eigen::Matrix4d> poses_;
};

// Per-frame boolean grid marking moving content; static is the complement
// restricted to valid pixels.
class RegionMasks {
 public:
  RegionMasks() = default;
  RegionMasks(int width, int height, int frame_count)
      : width_(width),
        height_(height),
        frame_count_(frame_count),
        dynamic_(static_cast<std::size_t>(width) * height * frame_count, 0) {}

  int width() const { return width_; }
  int height() const { return height_; }
  int frame_count() const { return frame_count_; }
  bool dynamic(int t, int y, int x) const { return dynamic_[index(t, y, x)] != 0; }
  void set_dynamic(int t, int y, int x, bool d) {
    dynamic_[index(t, y, x)] = d ? 1 : 0;
  }
  std::span<const std::uint8_t> frame(int t) const {
    return {dynamic_.data() + index(t, 0, 0),
            static_cast<std::size_t>(width_) * height_};
  }
  std::span<std::uint8_t> frame(int t) {
    return {dynamic_.data() + index(t, 0, 0),
            static_cast<std::size_t>(width_) * height_};
  }
  bool same_shape(const DepthVideo& v) const {
    return width_ == v.width() && height_ == v.height() &&
           frame_count_ == v.frame_count();
  }

 private:
  std::int64_t index(int t, int y, int x) const {
    return (static_cast<std::int64_t>(t) * height_ + y) * width_ + x;
  }
  int width_ = 0;
  int height_ = 0;
  int frame_count_ = 0;
  std::vector<std::uint8_t> dynamic_;
};

// Nearest-neighbour resample: output pixel (x,y) copies the source pixel at
// floor((x + 0.5) * src / dst) per axis; validity resampled identically.
DepthVideo resize_nearest(const DepthVideo& video, int new_width,
                          int new_height);

// Reciprocal transform on valid pixels, flipping value_kind.
DepthVideo reciprocal(const DepthVideo& video);

}  // namespace vdtk
