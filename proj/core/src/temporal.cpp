#include "vdtk/temporal.hpp"

#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <map>

namespace vdtk {

namespace {

// Bilinear depth sample; false when any of the four neighbours is invalid.
bool sample_depth(const DepthVideo& video, int t, double x, double y,
                  double* out) {
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const int x1 = std::min(x0 + 1, video.width() - 1);
  const int y1 = std::min(y0 + 1, video.height() - 1);
  if (x0 < 0 || y0 < 0 || x0 >= video.width() || y0 >= video.height()) {
    return false;
  }
  if (!video.valid(t, y0, x0) || !video.valid(t, y0, x1) ||
      !video.valid(t, y1, x0) || !video.valid(t, y1, x1)) {
    return false;
  }
  const double fx = x - x0;
  const double fy = y - y0;
  const double v00 = video.at(t, y0, x0);
  const double v01 = video.at(t, y0, x1);
  const double v10 = video.at(t, y1, x0);
  const double v11 = video.at(t, y1, x1);
  *out = (1 - fy) * ((1 - fx) * v00 + fx * v01) +
         fy * ((1 - fx) * v10 + fx * v11);
  return true;
}

}  // namespace

TempConsReport temporal_consistency(const DepthVideo& pred,
                                    const CameraTrack& track,
                                    const CorrespondenceTable& correspondences,
                                    bool static_only, int delta) {
  (void)static_only;  // tables carry static correspondences only
  if (track.frame_count() != pred.frame_count()) {
    throw DataError("temporal_consistency: track frame count mismatch");
  }
  if (delta <= 0 || delta >= pred.frame_count()) {
    throw DataError("temporal_consistency: delta admits no frame pairs");
  }

  // Group records by (i, j); only delta-spaced pairs participate.
  std::map<std::pair<int, int>, std::vector<const CorrespondenceRecord*>> pairs;
  for (const CorrespondenceRecord& r : correspondences.records) {
    const int i = static_cast<int>(r.frame_i);
    const int j = static_cast<int>(r.frame_j);
    if (j - i == delta && i % delta == 0) pairs[{i, j}].push_back(&r);
  }

  TempConsReport report;
  report.delta = delta;
  long double total = 0;
  std::int64_t total_count = 0;
  for (int i = 0; i + delta < pred.frame_count(); i += delta) {
    const auto it = pairs.find({i, i + delta});
    if (it == pairs.end() || it->second.empty()) {
      ++report.skipped_pairs;
      continue;
    }
    const int j = i + delta;
    long double acc = 0;
    std::int64_t count = 0;
    for (const CorrespondenceRecord* r : it->second) {
      if (!pred.valid(i, r->v, r->u)) continue;
      double depth_j = 0;
      if (!sample_depth(pred, j, r->xj, r->yj, &depth_j)) continue;
      const Eigen::Vector3d pi = transform_point(
          track.pose(i),
          backproject(track.intrinsics(i), r->u, r->v, pred.at(i, r->v, r->u)));
      const Eigen::Vector3d pj = transform_point(
          track.pose(j), backproject(track.intrinsics(j), r->xj, r->yj, depth_j));
      acc += (pi - pj).norm();
      ++count;
    }
    if (count == 0) {
      ++report.skipped_pairs;
      continue;
    }
    report.per_pair.push_back(
        {i, j, static_cast<double>(acc / count), count});
    total += acc;
    total_count += count;
  }
  if (total_count == 0) {
    throw DataError("temporal_consistency: no usable correspondences");
  }
  report.mean_distance = static_cast<double>(total / total_count);
  return report;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string TempConsReport::csv() const {
  std::string out = "frame_i,frame_j,distance,count\n";
  for (const PairDistance& p : per_pair) {
    out += std::to_string(p.frame_i) + "," + std::to_string(p.frame_j) + "," +
           fmt(p.mean_distance) + "," + std::to_string(p.count) + "\n";
  }
  out += "aggregate,," + fmt(mean_distance) + "," +
         std::to_string(skipped_pairs) + "\n";
  return out;
}

std::string TempConsReport::json() const {
  nlohmann::ordered_json j;
  j["mean_distance"] = mean_distance;
  j["delta"] = delta;
  j["skipped_pairs"] = skipped_pairs;
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const PairDistance& p : per_pair) {
    arr.push_back({{"frame_i", p.frame_i},
                   {"frame_j", p.frame_j},
                   {"distance", p.mean_distance},
                   {"count", p.count}});
  }
  j["per_pair"] = std::move(arr);
  return j.dump(2) + "\n";
}

}  // namespace vdtk
