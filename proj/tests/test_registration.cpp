#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>
#include <random>

#include "vdtk/registration.hpp"

using namespace vdtk;

namespace {

std::vector<Eigen::Vector3d> random_points(std::mt19937& gen, std::size_t n,
                                           double spread = 2.0) {
  std::uniform_real_distribution<double> dist(-spread, spread);
  std::vector<Eigen::Vector3d> pts(n);
  for (auto& p : pts) p = {dist(gen), dist(gen), dist(gen) + 4.0};
  return pts;
}

SimilarityTransform random_similarity(std::mt19937& gen) {
  std::uniform_real_distribution<double> angle(-std::numbers::pi,
                                               std::numbers::pi);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> scale(0.3, 3.0);
  Eigen::Vector3d axis(unit(gen), unit(gen), unit(gen));
  while (axis.norm() < 1e-6) axis = {unit(gen), unit(gen), unit(gen)};
  SimilarityTransform s;
  s.scale = scale(gen);
  s.rotation = Eigen::AngleAxisd(angle(gen), axis.normalized()).toRotationMatrix();
  s.translation = {2.0 * unit(gen), 2.0 * unit(gen), 2.0 * unit(gen)};
  return s;
}

}  // namespace

TEST_CASE("procrustes identity and constructed transform") {
  std::mt19937 gen(41);
  const auto pts = random_points(gen, 40);
  std::vector<double> w(pts.size(), 1.0);

  ProcrustesResult id = procrustes_similarity(pts, pts, w);
  CHECK(id.residual < 1e-12);
  CHECK(std::abs(id.transform.scale - 1.0) < 1e-12);
  CHECK((id.transform.rotation - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() <
        1e-12);

  SimilarityTransform truth;
  truth.scale = 2.0;
  truth.rotation =
      Eigen::AngleAxisd(std::numbers::pi / 2, Eigen::Vector3d(0, 0, 1))
          .toRotationMatrix();
  truth.translation = {1, 2, 3};
  std::vector<Eigen::Vector3d> target(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) target[i] = truth.apply(pts[i]);
  ProcrustesResult rec = procrustes_similarity(pts, target, w);
  CHECK(rec.residual < 1e-9);
  CHECK(std::abs(rec.transform.scale - 2.0) < 1e-9);
  CHECK((rec.transform.rotation - truth.rotation).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((rec.transform.translation - truth.translation).norm() < 1e-9);
}

TEST_CASE("procrustes recovers many random similarities exactly") {
  std::mt19937 gen(42);
  for (int trial = 0; trial < 100; ++trial) {
    const auto pts = random_points(gen, 25);
    std::uniform_real_distribution<double> wdist(0.1, 2.0);
    std::vector<double> w(pts.size());
    for (double& v : w) v = wdist(gen);
    const SimilarityTransform truth = random_similarity(gen);
    std::vector<Eigen::Vector3d> target(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) target[i] = truth.apply(pts[i]);
    ProcrustesResult rec = procrustes_similarity(pts, target, w);
    CHECK(rec.residual < 1e-9);
    CHECK(std::abs(rec.transform.scale - truth.scale) < 1e-9 * truth.scale);
  }
}

TEST_CASE("procrustes beats random probes on noisy correspondences") {
  std::mt19937 gen(43);
  const auto pts = random_points(gen, 60);
  const SimilarityTransform truth = random_similarity(gen);
  std::normal_distribution<double> noise(0.0, 0.05);
  std::vector<Eigen::Vector3d> target(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    target[i] = truth.apply(pts[i]) +
                Eigen::Vector3d(noise(gen), noise(gen), noise(gen));
  }
  std::vector<double> w(pts.size(), 1.0);
  ProcrustesResult rec = procrustes_similarity(pts, target, w);
  const double best = registration_objective(pts, target, w, rec.transform);
  std::normal_distribution<double> wiggle(0.0, 0.02);
  for (int probe = 0; probe < 1000; ++probe) {
    SimilarityTransform cand = rec.transform;
    cand.scale *= 1.0 + wiggle(gen);
    Eigen::Vector3d axis(wiggle(gen), wiggle(gen), wiggle(gen));
    if (axis.norm() > 1e-12) {
      cand.rotation =
          Eigen::AngleAxisd(axis.norm(), axis.normalized()).toRotationMatrix() *
          cand.rotation;
    }
    cand.translation += Eigen::Vector3d(wiggle(gen), wiggle(gen), wiggle(gen));
    CHECK(best <= registration_objective(pts, target, w, cand) + 1e-12);
  }
}

TEST_CASE("procrustes conjugation invariance") {
  std::mt19937 gen(44);
  const auto pts = random_points(gen, 30);
  const SimilarityTransform truth = random_similarity(gen);
  std::normal_distribution<double> noise(0.0, 0.03);
  std::vector<Eigen::Vector3d> target(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    target[i] = truth.apply(pts[i]) +
                Eigen::Vector3d(noise(gen), noise(gen), noise(gen));
  }
  std::vector<double> w(pts.size(), 1.0);
  const ProcrustesResult base = procrustes_similarity(pts, target, w);

  // rigid conjugation: identical residual, conjugated optimum
  SimilarityTransform rigid = random_similarity(gen);
  rigid.scale = 1.0;
  std::vector<Eigen::Vector3d> src2(pts.size()), dst2(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    src2[i] = rigid.apply(pts[i]);
    dst2[i] = rigid.apply(target[i]);
  }
  const ProcrustesResult conj = procrustes_similarity(src2, dst2, w);
  CHECK(std::abs(conj.residual - base.residual) < 1e-9);
  const SimilarityTransform expected =
      rigid.compose(base.transform.compose(rigid.inverse()));
  CHECK((conj.transform.rotation - expected.rotation).cwiseAbs().maxCoeff() < 1e-7);
  CHECK(std::abs(conj.transform.scale - expected.scale) < 1e-7);

  // scaled conjugation: residual scales by the conjugating scale
  SimilarityTransform scaled = random_similarity(gen);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    src2[i] = scaled.apply(pts[i]);
    dst2[i] = scaled.apply(target[i]);
  }
  const ProcrustesResult conj2 = procrustes_similarity(src2, dst2, w);
  CHECK(conj2.residual ==
        doctest::Approx(scaled.scale * base.residual).epsilon(1e-7));
}

TEST_CASE("procrustes degeneracy") {
  // collinear points: covariance rank < 2
  std::vector<Eigen::Vector3d> line;
  for (int i = 0; i < 10; ++i) line.push_back({static_cast<double>(i), 0, 1});
  std::vector<double> w(line.size(), 1.0);
  CHECK_THROWS_AS(procrustes_similarity(line, line, w), DataError);

  std::vector<Eigen::Vector3d> two = {{0, 0, 0}, {1, 1, 1}};
  std::vector<double> w2(2, 1.0);
  CHECK_THROWS_AS(procrustes_similarity(two, two, w2), DataError);
}

namespace {

std::vector<Eigen::Vector3d> pinhole_pointmap(int width, int height, double f,
                                              double cx, double cy,
                                              const std::vector<double>& depth) {
  std::vector<Eigen::Vector3d> pm(static_cast<std::size_t>(width) * height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * width + x;
      const double z = depth[i];
      pm[i] = {(x - cx) / f * z, (y - cy) / f * z, z};
    }
  }
  return pm;
}

}  // namespace

TEST_CASE("weiszfeld focal recovers a clean pinhole") {
  const int w = 24, h = 18;
  const double f = 500.0, cx = (w - 1) / 2.0, cy = (h - 1) / 2.0;
  std::mt19937 gen(45);
  std::uniform_real_distribution<double> dist(1.0, 9.0);
  std::vector<double> depth(static_cast<std::size_t>(w) * h);
  for (double& d : depth) d = dist(gen);
  const auto pm = pinhole_pointmap(w, h, f, cx, cy, depth);
  const double est = weiszfeld_focal(pm, w, h, cx, cy, 10);
  CHECK(std::abs(est - f) / f < 1e-3);
}

TEST_CASE("weiszfeld on a symmetric configuration equals the pointwise ratio") {
  // All selected pixels satisfy the pinhole relation with the same focal and
  // identical residuals, so the estimate equals the single-point ratio.
  const double f = 320.0;
  const double z = 2.0;
  const int gw = 21, gh = 21;
  const double cx = 10, cy = 10;
  std::vector<Eigen::Vector3d> pm(static_cast<std::size_t>(gw) * gh,
                                  {0, 0, -1});  // z < 0: ignored
  std::vector<double> weights(pm.size(), 0.0);
  auto put = [&](int u, int v) {
    const std::size_t i = static_cast<std::size_t>(v) * gw + u;
    pm[i] = {(u - cx) / f * z, (v - cy) / f * z, z};
    weights[i] = 1.0;
  };
  for (int du : {-10, 10}) put(static_cast<int>(cx) + du, static_cast<int>(cy));
  for (int dv : {-10, 10}) put(static_cast<int>(cx), static_cast<int>(cy) + dv);
  for (int s1 : {-1, 1}) {
    for (int s2 : {-1, 1}) {
      put(static_cast<int>(cx) + 7 * s1, static_cast<int>(cy) + 7 * s2);
      put(static_cast<int>(cx) + 4 * s1, static_cast<int>(cy) + 4 * s2);
    }
  }
  const double est = weiszfeld_focal(pm, gw, gh, cx, cy, 10, weights);
  CHECK(est == doctest::Approx(f).epsilon(1e-9));
}

TEST_CASE("weiszfeld resists gross outliers where least squares fails") {
  const int w = 32, h = 24;
  const double f = 500.0, cx = (w - 1) / 2.0, cy = (h - 1) / 2.0;
  std::mt19937 gen(46);
  std::uniform_real_distribution<double> dist(1.0, 6.0);
  std::vector<double> depth(static_cast<std::size_t>(w) * h);
  for (double& d : depth) d = dist(gen);
  auto pm = pinhole_pointmap(w, h, f, cx, cy, depth);

  // 10% of pixels with grossly wrong depth (pointmap stretched away from the
  // pinhole relation)
  std::uniform_real_distribution<double> gross(6.0, 12.0);
  std::size_t corrupted = 0;
  for (std::size_t i = 0; i < pm.size() && corrupted < pm.size() / 10; ++i) {
    const double g = gross(gen);
    pm[i].x() *= g;
    pm[i].y() *= g;
    ++corrupted;
  }

  const double robust = weiszfeld_focal(pm, w, h, cx, cy, 10);
  CHECK(std::abs(robust - f) / f < 0.01);

  // plain least squares over the same terms
  double num = 0, den = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const auto& p = pm[static_cast<std::size_t>(y) * w + x];
      const Eigen::Vector2d pix(x - cx, y - cy);
      const Eigen::Vector2d dir(p.x() / p.z(), p.y() / p.z());
      num += pix.dot(dir);
      den += dir.squaredNorm();
    }
  }
  const double ls = num / den;
  CHECK(std::abs(ls - f) / f >= 0.05);
}

TEST_CASE("weiszfeld input validation") {
  std::vector<Eigen::Vector3d> behind(20, {0.1, 0.1, -1.0});
  CHECK_THROWS_AS(weiszfeld_focal(behind, 5, 4, 2, 1.5, 10), DataError);
}

TEST_CASE("camera resection recovers an exact camera") {
  const int w = 16, h = 12;
  const double f = 90.0, cx = (w - 1) / 2.0, cy = (h - 1) / 2.0;
  std::mt19937 gen(47);
  std::uniform_real_distribution<double> dist(2.0, 8.0);
  Eigen::Matrix3d r_cw =
      Eigen::AngleAxisd(0.4, Eigen::Vector3d(1, 2, 3).normalized())
          .toRotationMatrix();
  Eigen::Vector3d center(0.5, -0.3, 1.0);
  std::vector<Eigen::Vector3d> world(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double z = dist(gen);
      const Eigen::Vector3d cam((x - cx) / f * z, (y - cy) / f * z, z);
      world[static_cast<std::size_t>(y) * w + x] = r_cw * cam + center;
    }
  }
  std::vector<double> wgt(world.size(), 1.0);
  const ResectionResult res = resect_camera(world, w, h, cx, cy, wgt);
  CHECK(std::abs(res.focal - f) / f < 1e-9);
  CHECK((res.pose.topLeftCorner<3, 3>() - r_cw).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((res.pose.topRightCorner<3, 1>() - center).norm() < 1e-9);
}
