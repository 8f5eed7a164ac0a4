#pragma once

#include <span>
#include <vector>

#include "vdtk/geometry.hpp"

namespace vdtk {

struct ProcrustesResult {
  SimilarityTransform transform;
  double residual = 0;  // weighted RMS of ||s R p + t - q||
};

// Weighted least-squares similarity registration source -> target via the
// closed-form centered-covariance SVD solution, determinant-corrected so the
// rotation is proper. Needs >= 3 effective points spanning at least a plane
// (covariance rank >= 2); throws DataError otherwise.
ProcrustesResult procrustes_similarity(std::span<const Eigen::Vector3d> source,
                                       std::span<const Eigen::Vector3d> target,
                                       std::span<const double> weights);

// Weighted sum of squared residuals of an arbitrary candidate transform.
double registration_objective(std::span<const Eigen::Vector3d> source,
                              std::span<const Eigen::Vector3d> target,
                              std::span<const double> weights,
                              const SimilarityTransform& transform);

// Robust focal estimate from a pointmap in its own camera frame: minimizes
// sum_i ||(u_i - cx, v_i - cy) - f (x_i/z_i, y_i/z_i)|| by iteratively
// reweighted updates, initialized from the median of per-pixel ratios.
// Points with z <= 0 (or weight 0) are ignored. Fixed iteration budget.
double weiszfeld_focal(std::span<const Eigen::Vector3d> pointmap, int width,
                       int height, double cx, double cy, int iterations = 10,
                       std::span<const double> weights = {});

struct ResectionResult {
  Eigen::Matrix4d pose = Eigen::Matrix4d::Identity();  // camera-to-world
  double focal = 0;
};

// Recovers a pinhole camera (f, R, t) from dense pixel-grid / world-point
// correspondences by weighted DLT with K = diag(f, f, 1) after shifting out
// the known principal point. Exact on clean data.
ResectionResult resect_camera(std::span<const Eigen::Vector3d> world_points,
                              int width, int height, double cx, double cy,
                              std::span<const double> weights);

}  // namespace vdtk
