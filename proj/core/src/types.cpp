#include "vdtk/types.hpp"

#include <cmath>

namespace vdtk {

std::string to_string(ValueKind kind) {
  return kind == ValueKind::kDepth ? "depth" : "disparity";
}

ValueKind value_kind_from_string(const std::string& s) {
  if (s == "depth") return ValueKind::kDepth;
  if (s == "disparity") return ValueKind::kDisparity;
  throw DataError("unknown value_kind: " + s);
}

DepthVideo::DepthVideo(int width, int height, int frame_count, ValueKind kind)
    : width_(width), height_(height), frame_count_(frame_count), kind_(kind) {
  if (width <= 0 || height <= 0 || frame_count <= 0) {
    throw DataError("DepthVideo dimensions must be positive");
  }
  const std::size_t n =
      static_cast<std::size_t>(width) * height * frame_count;
  values_.assign(n, 0.0f);
  valid_.assign(n, 1);
}

std::int64_t DepthVideo::valid_count() const {
  std::int64_t n = 0;
  for (std::uint8_t v : valid_) n += v != 0;
  return n;
}

void DepthVideo::validate() const {
  for (int t = 0; t < frame_count_; ++t) {
    auto vals = frame(t);
    auto mask = frame_validity(t);
    for (std::size_t i = 0; i < vals.size(); ++i) {
      if (mask[i] && (!std::isfinite(vals[i]) || vals[i] <= 0.0f)) {
        throw DataError("frame " + std::to_string(t) +
                        ": valid value not finite and positive");
      }
    }
  }
}

void CameraTrack::validate(const DepthVideo* bound) const {
  constexpr double kTol = 1e-9;
  for (int t = 0; t < frame_count(); ++t) {
    const Eigen::Matrix3d r = poses_[t].topLeftCorner<3, 3>();
    const double ortho = (r.transpose() * r - Eigen::Matrix3d::Identity())
                             .cwiseAbs()
                             .maxCoeff();
    if (ortho > kTol) {
      throw DataError("pose " + std::to_string(t) + ": rotation not orthonormal");
    }
    if (std::abs(r.determinant() - 1.0) > kTol) {
      throw DataError("pose " + std::to_string(t) + ": rotation determinant != 1");
    }
    const Eigen::RowVector4d bottom = poses_[t].row(3);
    if ((bottom - Eigen::RowVector4d(0, 0, 0, 1)).cwiseAbs().maxCoeff() > kTol) {
      throw DataError("pose " + std::to_string(t) + ": bottom row not [0 0 0 1]");
    }
    const Intrinsics& k = intrinsics_[t];
    if (!(k.fx > 0.0) || !(k.fy > 0.0)) {
      throw DataError("intrinsics " + std::to_string(t) + ": fx, fy must be positive");
    }
    if (bound != nullptr) {
      if (k.cx < 0.0 || k.cx >= bound->width() || k.cy < 0.0 ||
          k.cy >= bound->height()) {
        throw DataError("intrinsics " + std::to_string(t) +
                        ": principal point outside image");
      }
    }
  }
}

DepthVideo resize_nearest(const DepthVideo& video, int new_width,
                          int new_height) {
  if (new_width <= 0 || new_height <= 0) {
    throw DataError("resize_nearest: target dimensions must be positive");
  }
  DepthVideo out(new_width, new_height, video.frame_count(), video.kind());
  const double sx = static_cast<double>(video.width()) / new_width;
  const double sy = static_cast<double>(video.height()) / new_height;
  for (int t = 0; t < video.frame_count(); ++t) {
    for (int y = 0; y < new_height; ++y) {
      int src_y = static_cast<int>((y + 0.5) * sy);
      if (src_y >= video.height()) src_y = video.height() - 1;
      for (int x = 0; x < new_width; ++x) {
        int src_x = static_cast<int>((x + 0.5) * sx);
        if (src_x >= video.width()) src_x = video.width() - 1;
        if (video.valid(t, src_y, src_x)) {
          out.set(t, y, x, video.at(t, src_y, src_x));
        } else {
          out.invalidate(t, y, x);
        }
      }
    }
  }
  return out;
}

DepthVideo reciprocal(const DepthVideo& video) {
  DepthVideo out(video.width(), video.height(), video.frame_count(),
                 video.kind() == ValueKind::kDepth ? ValueKind::kDisparity
                                                   : ValueKind::kDepth);
  for (int t = 0; t < video.frame_count(); ++t) {
    for (int y = 0; y < video.height(); ++y) {
      for (int x = 0; x < video.width(); ++x) {
        if (video.valid(t, y, x)) {
          out.set(t, y, x, 1.0f / video.at(t, y, x));
        } else {
          out.invalidate(t, y, x);
        }
      }
    }
  }
  return out;
}

}  // namespace vdtk
