#pragma once

#include <Eigen/Dense>

#include "vdtk/types.hpp"

namespace vdtk {

// scale * R * p + t with R orthonormal, det +1, scale > 0.
struct SimilarityTransform {
  double scale = 1.0;
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  Eigen::Vector3d apply(const Eigen::Vector3d& p) const {
    return scale * (rotation * p) + translation;
  }
  SimilarityTransform inverse() const {
    SimilarityTransform inv;
    inv.scale = 1.0 / scale;
    inv.rotation = rotation.transpose();
    inv.translation = -(inv.rotation * translation) / scale;
    return inv;
  }
  SimilarityTransform compose(const SimilarityTransform& inner) const {
    // this(inner(p))
    SimilarityTransform out;
    out.scale = scale * inner.scale;
    out.rotation = rotation * inner.rotation;
    out.translation = scale * (rotation * inner.translation) + translation;
    return out;
  }
  Eigen::Matrix4d rigid_matrix() const {
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    m.topLeftCorner<3, 3>() = rotation;
    m.topRightCorner<3, 1>() = translation;
    return m;
  }
};

// Pixel (x, y) with depth d and the pinned pixel-center convention
// (integer coordinates are pixel centers) lifts to camera coordinates
// ((x - cx)/fx * d, (y - cy)/fy * d, d).
inline Eigen::Vector3d backproject(const Intrinsics& k, double x, double y,
                                   double depth) {
  return {(x - k.cx) / k.fx * depth, (y - k.cy) / k.fy * depth, depth};
}

// Camera-space point to pixel coordinates; caller checks z > 0.
inline Eigen::Vector2d project(const Intrinsics& k, const Eigen::Vector3d& p) {
  return {k.fx * p.x() / p.z() + k.cx, k.fy * p.y() / p.z() + k.cy};
}

inline Eigen::Vector3d transform_point(const Eigen::Matrix4d& m,
                                       const Eigen::Vector3d& p) {
  return m.topLeftCorner<3, 3>() * p + m.topRightCorner<3, 1>();
}

// Nearest rotation matrix in the Frobenius sense.
inline Eigen::Matrix3d orthonormalize(const Eigen::Matrix3d& m) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(
      m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d r = svd.matrixU() * svd.matrixV().transpose();
  if (r.determinant() < 0) {
    Eigen::Matrix3d flip = Eigen::Matrix3d::Identity();
    flip(2, 2) = -1.0;
    r = svd.matrixU() * flip * svd.matrixV().transpose();
  }
  return r;
}

}  // namespace vdtk
