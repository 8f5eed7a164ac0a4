#include "vdtk/registration.hpp"

#include <algorithm>
#include <cmath>

namespace vdtk {

ProcrustesResult procrustes_similarity(std::span<const Eigen::Vector3d> source,
                                       std::span<const Eigen::Vector3d> target,
                                       std::span<const double> weights) {
  if (source.size() != target.size() || source.size() != weights.size()) {
    throw DataError("procrustes: input spans differ in length");
  }
  double wsum = 0;
  std::size_t effective = 0;
  Eigen::Vector3d mu_p = Eigen::Vector3d::Zero();
  Eigen::Vector3d mu_q = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < source.size(); ++i) {
    if (weights[i] < 0) throw DataError("procrustes: negative weight");
    if (weights[i] == 0) continue;
    wsum += weights[i];
    mu_p += weights[i] * source[i];
    mu_q += weights[i] * target[i];
    ++effective;
  }
  if (effective < 3 || wsum <= 0) {
    throw DataError("procrustes: need at least 3 weighted correspondences");
  }
  mu_p /= wsum;
  mu_q /= wsum;

  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  double var_p = 0;
  for (std::size_t i = 0; i < source.size(); ++i) {
    if (weights[i] == 0) continue;
    const Eigen::Vector3d p = source[i] - mu_p;
    const Eigen::Vector3d q = target[i] - mu_q;
    cov += weights[i] * (q * p.transpose());
    var_p += weights[i] * p.squaredNorm();
  }
  cov /= wsum;
  var_p /= wsum;

  Eigen::JacobiSVD<Eigen::Matrix3d> svd(
      cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Vector3d d = svd.singularValues();
  if (!(d(1) > 1e-12 * std::max(1.0, d(0)))) {
    throw DataError("procrustes: degenerate configuration (covariance rank < 2)");
  }
  Eigen::Vector3d sign_fix = Eigen::Vector3d::Ones();
  if (svd.matrixU().determinant() * svd.matrixV().determinant() < 0) {
    sign_fix(2) = -1.0;
  }
  ProcrustesResult result;
  result.transform.rotation =
      svd.matrixU() * sign_fix.asDiagonal() * svd.matrixV().transpose();
  const double trace_ds = d.dot(sign_fix);
  if (!(var_p > 0) || !(trace_ds > 0)) {
    throw DataError("procrustes: degenerate scale");
  }
  result.transform.scale = trace_ds / var_p;
  result.transform.translation =
      mu_q - result.transform.scale * (result.transform.rotation * mu_p);

  double rss = 0;
  for (std::size_t i = 0; i < source.size(); ++i) {
    if (weights[i] == 0) continue;
    rss += weights[i] *
           (result.transform.apply(source[i]) - target[i]).squaredNorm();
  }
  result.residual = std::sqrt(rss / wsum);
  return result;
}

double registration_objective(std::span<const Eigen::Vector3d> source,
                              std::span<const Eigen::Vector3d> target,
                              std::span<const double> weights,
                              const SimilarityTransform& transform) {
  double acc = 0;
  for (std::size_t i = 0; i < source.size(); ++i) {
    acc += weights[i] * (transform.apply(source[i]) - target[i]).squaredNorm();
  }
  return acc;
}

double weiszfeld_focal(std::span<const Eigen::Vector3d> pointmap, int width,
                       int height, double cx, double cy, int iterations,
                       std::span<const double> weights) {
  if (pointmap.size() != static_cast<std::size_t>(width) * height) {
    throw DataError("weiszfeld_focal: pointmap size != width*height");
  }
  struct Term {
    Eigen::Vector2d pix;  // (u - cx, v - cy)
    Eigen::Vector2d dir;  // (x/z, y/z)
    double w;
  };
  std::vector<Term> terms;
  terms.reserve(pointmap.size());
  std::vector<double> ratios;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * width + x;
      const double w = weights.empty() ? 1.0 : weights[i];
      const Eigen::Vector3d& p = pointmap[i];
      if (w <= 0 || !(p.z() > 0)) continue;
      Term t{{x - cx, y - cy}, {p.x() / p.z(), p.y() / p.z()}, w};
      const double gg = t.dir.squaredNorm();
      if (gg < 1e-12) continue;  // principal-point ray carries no focal signal
      terms.push_back(t);
      ratios.push_back(t.pix.dot(t.dir) / gg);
    }
  }
  if (terms.size() < 10) {
    throw DataError("weiszfeld_focal: need >= 10 usable points with z > 0");
  }

  std::nth_element(ratios.begin(), ratios.begin() + ratios.size() / 2,
                   ratios.end());
  double focal = ratios[ratios.size() / 2];

  for (int it = 0; it < iterations; ++it) {
    double num = 0, den = 0;
    for (const Term& t : terms) {
      const double dis = (t.pix - focal * t.dir).norm();
      const double w = t.w / std::max(dis, 1e-12);
      num += w * t.pix.dot(t.dir);
      den += w * t.dir.squaredNorm();
    }
    if (!(den > 0)) break;
    focal = num / den;
  }
  if (!(focal > 0) || !std::isfinite(focal)) {
    throw DataError("weiszfeld_focal: estimate did not converge to a positive focal");
  }
  return focal;
}

ResectionResult resect_camera(std::span<const Eigen::Vector3d> world_points,
                              int width, int height, double cx, double cy,
                              std::span<const double> weights) {
  if (world_points.size() != static_cast<std::size_t>(width) * height) {
    throw DataError("resect_camera: pointmap size != width*height");
  }
  // Normalize world coordinates for conditioning.
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  double wsum = 0;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * width + x;
      const double w = weights.empty() ? 1.0 : weights[i];
      if (w <= 0) continue;
      centroid += w * world_points[i];
      wsum += w;
    }
  }
  if (wsum <= 0) throw DataError("resect_camera: no weighted points");
  centroid /= wsum;
  double spread = 0;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * width + x;
      const double w = weights.empty() ? 1.0 : weights[i];
      if (w <= 0) continue;
      spread += w * (world_points[i] - centroid).norm();
    }
  }
  spread /= wsum;
  if (!(spread > 0)) throw DataError("resect_camera: degenerate point cloud");
  const double inv_scale = 1.0 / spread;

  // Rows of the 12-parameter DLT system (pixel coordinates pre-shifted by the
  // principal point), accumulated as normal equations.
  Eigen::Matrix<double, 12, 12> ata = Eigen::Matrix<double, 12, 12>::Zero();
  auto add_row = [&ata](const Eigen::Matrix<double, 12, 1>& row, double w) {
    ata.selfadjointView<Eigen::Lower>().rankUpdate(row, w);
  };
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * width + x;
      const double w = weights.empty() ? 1.0 : weights[i];
      if (w <= 0) continue;
      const Eigen::Vector3d p = (world_points[i] - centroid) * inv_scale;
      const double u = x - cx;
      const double v = y - cy;
      Eigen::Matrix<double, 12, 1> r1 = Eigen::Matrix<double, 12, 1>::Zero();
      Eigen::Matrix<double, 12, 1> r2 = Eigen::Matrix<double, 12, 1>::Zero();
      // m1 . [p,1] - u * m3 . [p,1] = 0 ; m2 . [p,1] - v * m3 . [p,1] = 0
      r1.segment<3>(0) = p;
      r1(3) = 1.0;
      r1.segment<3>(8) = -u * p;
      r1(11) = -u;
      r2.segment<3>(4) = p;
      r2(7) = 1.0;
      r2.segment<3>(8) = -v * p;
      r2(11) = -v;
      add_row(r1, w);
      add_row(r2, w);
    }
  }
  const Eigen::Matrix<double, 12, 12> full =
      ata.selfadjointView<Eigen::Lower>();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 12, 12>> eig(full);
  const Eigen::Matrix<double, 12, 1> m = eig.eigenvectors().col(0);

  Eigen::Matrix<double, 3, 4> proj;
  proj << m(0), m(1), m(2), m(3), m(4), m(5), m(6), m(7), m(8), m(9), m(10),
      m(11);

  // Fix sign so points sit in front of the camera.
  double z_vote = 0;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * width + x;
      const double w = weights.empty() ? 1.0 : weights[i];
      if (w <= 0) continue;
      const Eigen::Vector3d p = (world_points[i] - centroid) * inv_scale;
      z_vote += w * (proj.block<1, 3>(2, 0).dot(p) + proj(2, 3));
    }
  }
  if (z_vote < 0) proj = -proj;

  // Decompose with K = diag(f, f, 1): m3 = r3, f = ||m1 - (m1.m3) m3||.
  const double lambda = proj.block<1, 3>(2, 0).norm();
  if (!(lambda > 0)) throw DataError("resect_camera: singular projection");
  proj /= lambda;
  const Eigen::Vector3d m1 = proj.block<1, 3>(0, 0).transpose();
  const Eigen::Vector3d m2 = proj.block<1, 3>(1, 0).transpose();
  const Eigen::Vector3d m3 = proj.block<1, 3>(2, 0).transpose();
  const double f1 = (m1 - m1.dot(m3) * m3).norm();
  const double f2 = (m2 - m2.dot(m3) * m3).norm();
  const double f = 0.5 * (f1 + f2);
  if (!(f > 0)) throw DataError("resect_camera: non-positive focal");

  Eigen::Matrix3d r_wc;  // world-to-camera rows
  r_wc.row(0) = ((m1 - m1.dot(m3) * m3) / f).transpose();
  r_wc.row(1) = ((m2 - m2.dot(m3) * m3) / f).transpose();
  r_wc.row(2) = m3.transpose();
  r_wc = orthonormalize(r_wc);
  Eigen::Vector3d t_wc;
  t_wc.x() = (proj(0, 3) - m1.dot(m3) * proj(2, 3)) / f;
  t_wc.y() = (proj(1, 3) - m2.dot(m3) * proj(2, 3)) / f;
  t_wc.z() = proj(2, 3);

  // Undo the normalization: camera in original world coordinates.
  ResectionResult result;
  result.focal = f;
  const Eigen::Matrix3d r_cw = r_wc.transpose();
  const Eigen::Vector3d cam_center_norm = -r_cw * t_wc;
  const Eigen::Vector3d cam_center = cam_center_norm * spread + centroid;
  result.pose = Eigen::Matrix4d::Identity();
  result.pose.topLeftCorner<3, 3>() = r_cw;
  result.pose.topRightCorner<3, 1>() = cam_center;
  return result;
}

}  // namespace vdtk
