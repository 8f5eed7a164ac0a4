#include "vdtk/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <json.hpp>
#include <limits>

#include "vdtk/parallel.hpp"
#include "vdtk/rng.hpp"
#include "vdtk/spectral.hpp"

namespace vdtk {

namespace fs = std::filesystem;

namespace {

// Uniform Catmull-Rom with clamped ends; s in [0, 1]. Two waypoints
// degenerate to linear interpolation.
Eigen::Vector3d spline_eval(const std::vector<Eigen::Vector3d>& pts, double s) {
  if (pts.empty()) throw DataError("spline: no waypoints");
  if (pts.size() == 1) return pts[0];
  if (pts.size() == 2) return pts[0] + s * (pts[1] - pts[0]);
  const int segments = static_cast<int>(pts.size()) - 1;
  double u = s * segments;
  int seg = std::min(static_cast<int>(u), segments - 1);
  u -= seg;
  auto at = [&](int i) {
    return pts[std::clamp(i, 0, static_cast<int>(pts.size()) - 1)];
  };
  const Eigen::Vector3d p0 = at(seg - 1);
  const Eigen::Vector3d p1 = at(seg);
  const Eigen::Vector3d p2 = at(seg + 1);
  const Eigen::Vector3d p3 = at(seg + 2);
  const double u2 = u * u;
  const double u3 = u2 * u;
  return 0.5 * ((2.0 * p1) + (-p0 + p2) * u +
                (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * u2 +
                (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * u3);
}

Eigen::Matrix3d axis_angle(const Eigen::Vector3d& axis_times_angle) {
  const double angle = axis_times_angle.norm();
  if (angle < 1e-15) return Eigen::Matrix3d::Identity();
  return Eigen::AngleAxisd(angle, axis_times_angle / angle).toRotationMatrix();
}

// Plane tangent basis chosen deterministically from the normal.
void plane_basis(const Eigen::Vector3d& n, Eigen::Vector3d& t1,
                 Eigen::Vector3d& t2) {
  const Eigen::Vector3d pick =
      std::abs(n.z()) < 0.9 ? Eigen::Vector3d(0, 0, 1) : Eigen::Vector3d(1, 0, 0);
  t1 = n.cross(pick).normalized();
  t2 = n.cross(t1).normalized();
}

struct PrimitiveState {
  const Primitive* prim = nullptr;
  bool dynamic = false;
  Eigen::Vector3d center;
  Eigen::Matrix3d rotation;  // local-to-world
};

PrimitiveState primitive_at(const Primitive& prim, bool dynamic, double s,
                            double seconds) {
  PrimitiveState state;
  state.prim = &prim;
  state.dynamic = dynamic;
  state.center = dynamic && !prim.position_waypoints.empty()
                     ? spline_eval(prim.position_waypoints, s)
                     : prim.center;
  Eigen::Matrix3d base =
      prim.rotation_angle != 0.0
          ? axis_angle(prim.rotation_axis.normalized() * prim.rotation_angle)
          : Eigen::Matrix3d::Identity();
  if (dynamic && prim.angular_velocity.norm() > 0) {
    base = axis_angle(prim.angular_velocity * seconds) * base;
  }
  state.rotation = base;
  return state;
}

// Ray o + t*d with unnormalized d (camera z = 1), so the hit parameter is
// the camera-frame depth directly.
double intersect(const PrimitiveState& state, const Eigen::Vector3d& o,
                 const Eigen::Vector3d& d) {
  constexpr double kMiss = std::numeric_limits<double>::infinity();
  const Primitive& p = *state.prim;
  switch (p.type) {
    case PrimitiveType::kSphere: {
      const Eigen::Vector3d oc = o - state.center;
      const double a = d.squaredNorm();
      const double b = 2.0 * d.dot(oc);
      const double c = oc.squaredNorm() - p.radius * p.radius;
      const double disc = b * b - 4.0 * a * c;
      if (disc < 0) return kMiss;
      const double sq = std::sqrt(disc);
      const double t0 = (-b - sq) / (2.0 * a);
      const double t1 = (-b + sq) / (2.0 * a);
      if (t0 > 1e-9) return t0;
      if (t1 > 1e-9) return t1;
      return kMiss;
    }
    case PrimitiveType::kPlane: {
      const Eigen::Vector3d n = state.rotation * p.normal.normalized();
      const double denom = d.dot(n);
      if (std::abs(denom) < 1e-15) return kMiss;
      const double t = (state.center - o).dot(n) / denom;
      if (t <= 1e-9) return kMiss;
      if (p.half_extent.x() > 0 || p.half_extent.y() > 0) {
        Eigen::Vector3d t1v, t2v;
        plane_basis(n, t1v, t2v);
        const Eigen::Vector3d local = o + t * d - state.center;
        if (std::abs(local.dot(t1v)) > p.half_extent.x() ||
            std::abs(local.dot(t2v)) > p.half_extent.y()) {
          return kMiss;
        }
      }
      return t;
    }
    case PrimitiveType::kBox: {
      const Eigen::Matrix3d rt = state.rotation.transpose();
      const Eigen::Vector3d lo_ = rt * (o - state.center);
      const Eigen::Vector3d ld = rt * d;
      double tmin = -kMiss, tmax = kMiss;
      for (int a = 0; a < 3; ++a) {
        const double h = p.half_extent(a);
        if (std::abs(ld(a)) < 1e-15) {
          if (std::abs(lo_(a)) > h) return kMiss;
          continue;
        }
        double t0 = (-h - lo_(a)) / ld(a);
        double t1 = (h - lo_(a)) / ld(a);
        if (t0 > t1) std::swap(t0, t1);
        tmin = std::max(tmin, t0);
        tmax = std::min(tmax, t1);
        if (tmin > tmax) return kMiss;
      }
      if (tmin > 1e-9) return tmin;
      if (tmax > 1e-9) return tmax;
      return kMiss;
    }
  }
  return kMiss;
}

struct FrameScene {
  Eigen::Matrix4d pose;  // camera-to-world
  std::vector<PrimitiveState> primitives;
};

FrameScene scene_at(const SceneSpec& spec, int frame) {
  const double s =
      spec.frame_count <= 1
          ? 0.0
          : static_cast<double>(frame) / (spec.frame_count - 1);
  const double seconds = frame / spec.fps;
  FrameScene fsc;
  fsc.pose = camera_pose_at(spec, frame);
  fsc.primitives.reserve(spec.static_primitives.size() +
                         spec.dynamic_primitives.size());
  for (const Primitive& p : spec.static_primitives) {
    fsc.primitives.push_back(primitive_at(p, false, s, seconds));
  }
  for (const Primitive& p : spec.dynamic_primitives) {
    fsc.primitives.push_back(primitive_at(p, true, s, seconds));
  }
  return fsc;
}

struct Hit {
  double depth = std::numeric_limits<double>::infinity();
  bool dynamic = false;
  bool valid() const { return std::isfinite(depth); }
};

Hit trace(const FrameScene& fsc, const Intrinsics& k, double px, double py) {
  const Eigen::Vector3d o = fsc.pose.topRightCorner<3, 1>();
  const Eigen::Matrix3d r = fsc.pose.topLeftCorner<3, 3>();
  const Eigen::Vector3d dir_cam((px - k.cx) / k.fx, (py - k.cy) / k.fy, 1.0);
  const Eigen::Vector3d d = r * dir_cam;
  Hit hit;
  for (const PrimitiveState& prim : fsc.primitives) {
    const double t = intersect(prim, o, d);
    if (t < hit.depth) {
      hit.depth = t;
      hit.dynamic = prim.dynamic;
    }
  }
  return hit;
}

}  // namespace

Eigen::Matrix4d camera_pose_at(const SceneSpec& spec, int frame) {
  const double s =
      spec.frame_count <= 1
          ? 0.0
          : static_cast<double>(frame) / (spec.frame_count - 1);
  const Eigen::Vector3d eye = spline_eval(spec.camera.position_waypoints, s);
  const Eigen::Vector3d target = spline_eval(spec.camera.look_at_waypoints, s);
  const Eigen::Vector3d z = (target - eye).normalized();
  const Eigen::Vector3d down = -spec.camera.up.normalized();
  Eigen::Vector3d x = down.cross(z);
  if (x.norm() < 1e-12) {
    throw DataError("camera path: view direction parallel to up vector");
  }
  x.normalize();
  const Eigen::Vector3d y = z.cross(x);
  Eigen::Matrix4d pose = Eigen::Matrix4d::Identity();
  pose.topLeftCorner<3, 3>() << x, y, z;
  pose.topRightCorner<3, 1>() = eye;
  return pose;
}

void SceneSpec::validate() const {
  if (width <= 0 || height <= 0) throw UsageError("scene: dimensions must be positive");
  if (frame_count <= 0) throw UsageError("scene: frame_count must be positive");
  if (!(fps > 0)) throw UsageError("scene: fps must be positive");
  if (!(intrinsics.fx > 0) || !(intrinsics.fy > 0)) {
    throw UsageError("scene: focal lengths must be positive");
  }
  if (camera.position_waypoints.empty()) {
    throw UsageError("scene: camera needs at least one position waypoint");
  }
  if (static_primitives.empty() && dynamic_primitives.empty()) {
    throw UsageError("scene: needs at least one primitive");
  }
  // Visibility: every primitive's center in front of the camera for >= 95%
  // of frames.
  auto check = [&](const Primitive& p, bool dynamic, const std::string& what) {
    int in_front = 0;
    for (int f = 0; f < frame_count; ++f) {
      const double s = frame_count <= 1 ? 0.0
                                        : static_cast<double>(f) / (frame_count - 1);
      const PrimitiveState st = primitive_at(p, dynamic, s, f / fps);
      const Eigen::Matrix4d pose = camera_pose_at(*this, f);
      const Eigen::Vector3d cam =
          pose.topLeftCorner<3, 3>().transpose() *
          (st.center - pose.topRightCorner<3, 1>());
      in_front += cam.z() > 0;
    }
    if (in_front < 0.95 * frame_count) {
      throw UsageError("scene: " + what + " behind the camera in more than 5% of frames");
    }
  };
  for (std::size_t i = 0; i < static_primitives.size(); ++i) {
    check(static_primitives[i], false, "static primitive " + std::to_string(i));
  }
  for (std::size_t i = 0; i < dynamic_primitives.size(); ++i) {
    check(dynamic_primitives[i], true, "dynamic primitive " + std::to_string(i));
  }
}

namespace {

Eigen::Vector3d parse_vec3(const nlohmann::json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) {
    throw UsageError(std::string("scene: ") + what + " must be a 3-array");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

std::vector<Eigen::Vector3d> parse_waypoints(const nlohmann::json& j,
                                             const char* what) {
  std::vector<Eigen::Vector3d> out;
  if (!j.is_array() || j.empty()) {
    throw UsageError(std::string("scene: ") + what + " must be a non-empty array");
  }
  for (const auto& e : j) out.push_back(parse_vec3(e, what));
  return out;
}

Primitive parse_primitive(const nlohmann::json& j, bool dynamic) {
  Primitive p;
  const std::string type = j.at("type").get<std::string>();
  if (type == "plane") {
    p.type = PrimitiveType::kPlane;
  } else if (type == "sphere") {
    p.type = PrimitiveType::kSphere;
  } else if (type == "box") {
    p.type = PrimitiveType::kBox;
  } else {
    throw UsageError("scene: unknown primitive type " + type);
  }
  if (j.contains("center")) p.center = parse_vec3(j["center"], "center");
  if (j.contains("normal")) p.normal = parse_vec3(j["normal"], "normal");
  if (j.contains("radius")) p.radius = j["radius"].get<double>();
  if (j.contains("half_extent")) {
    const auto& he = j["half_extent"];
    if (he.size() == 2) {
      p.half_extent = {he[0].get<double>(), he[1].get<double>(), 0.0};
    } else {
      p.half_extent = parse_vec3(he, "half_extent");
    }
  }
  if (j.contains("rotation_axis")) {
    p.rotation_axis = parse_vec3(j["rotation_axis"], "rotation_axis");
  }
  if (j.contains("rotation_angle")) {
    p.rotation_angle = j["rotation_angle"].get<double>();
  }
  if (dynamic) {
    if (j.contains("positions")) {
      p.position_waypoints = parse_waypoints(j["positions"], "positions");
    } else {
      p.position_waypoints = {p.center};
    }
    if (j.contains("angular_velocity")) {
      p.angular_velocity = parse_vec3(j["angular_velocity"], "angular_velocity");
    }
  }
  return p;
}

}  // namespace

SceneSpec scene_spec_from_json_string(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw UsageError(std::string("scene: malformed JSON: ") + e.what());
  }
  SceneSpec spec;
  try {
    spec.width = j.at("width").get<int>();
    spec.height = j.at("height").get<int>();
    spec.frame_count = j.at("frame_count").get<int>();
    spec.fps = j.value("fps", 30.0);
    spec.seed = j.value("seed", 0ULL);
    if (j.contains("intrinsics")) {
      const auto& k = j["intrinsics"];
      spec.intrinsics = {k.at("fx").get<double>(), k.at("fy").get<double>(),
                         k.at("cx").get<double>(), k.at("cy").get<double>()};
    } else {
      spec.intrinsics = {0.9 * spec.width, 0.9 * spec.width,
                         (spec.width - 1) / 2.0, (spec.height - 1) / 2.0};
    }
    const auto& cam = j.at("camera");
    spec.camera.position_waypoints =
        parse_waypoints(cam.at("positions"), "camera positions");
    if (cam.contains("look_at")) {
      spec.camera.look_at_waypoints =
          parse_waypoints(cam["look_at"], "camera look_at");
    }
    if (cam.contains("up")) spec.camera.up = parse_vec3(cam["up"], "up");
    for (const auto& e : j.value("static_primitives", nlohmann::json::array())) {
      spec.static_primitives.push_back(parse_primitive(e, false));
    }
    for (const auto& e : j.value("dynamic_primitives", nlohmann::json::array())) {
      spec.dynamic_primitives.push_back(parse_primitive(e, true));
    }
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("scene: ") + e.what());
  }
  spec.validate();
  return spec;
}

SceneSpec scene_spec_from_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("scene: cannot open " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return scene_spec_from_json_string(text);
}

namespace {

constexpr char kCorrMagic[4] = {'V', 'D', 'C', 'T'};

}  // namespace

void write_correspondences(const CorrespondenceTable& table,
                           const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write: " + path.string());
  out.write(kCorrMagic, 4);
  const std::uint32_t version = 1;
  const std::uint32_t delta = static_cast<std::uint32_t>(table.delta);
  const std::uint32_t width = static_cast<std::uint32_t>(table.width);
  const std::uint32_t height = static_cast<std::uint32_t>(table.height);
  const std::uint64_t count = table.records.size();
  out.write(reinterpret_cast<const char*>(&version), 4);
  out.write(reinterpret_cast<const char*>(&delta), 4);
  out.write(reinterpret_cast<const char*>(&width), 4);
  out.write(reinterpret_cast<const char*>(&height), 4);
  out.write(reinterpret_cast<const char*>(&count), 8);
  for (const CorrespondenceRecord& r : table.records) {
    out.write(reinterpret_cast<const char*>(&r.frame_i), 4);
    out.write(reinterpret_cast<const char*>(&r.frame_j), 4);
    out.write(reinterpret_cast<const char*>(&r.u), 2);
    out.write(reinterpret_cast<const char*>(&r.v), 2);
    out.write(reinterpret_cast<const char*>(&r.xj), 4);
    out.write(reinterpret_cast<const char*>(&r.yj), 4);
  }
  if (!out) throw IoError("write failed: " + path.string());
}

CorrespondenceTable read_correspondences(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kCorrMagic, 4) != 0) {
    throw DataError("correspondences: bad magic in " + path.string());
  }
  std::uint32_t version = 0, delta = 0, width = 0, height = 0;
  std::uint64_t count = 0;
  in.read(reinterpret_cast<char*>(&version), 4);
  in.read(reinterpret_cast<char*>(&delta), 4);
  in.read(reinterpret_cast<char*>(&width), 4);
  in.read(reinterpret_cast<char*>(&height), 4);
  in.read(reinterpret_cast<char*>(&count), 8);
  if (!in || version != 1) throw DataError("correspondences: unsupported version");
  CorrespondenceTable table;
  table.delta = static_cast<int>(delta);
  table.width = static_cast<int>(width);
  table.height = static_cast<int>(height);
  table.records.resize(count);
  for (CorrespondenceRecord& r : table.records) {
    in.read(reinterpret_cast<char*>(&r.frame_i), 4);
    in.read(reinterpret_cast<char*>(&r.frame_j), 4);
    in.read(reinterpret_cast<char*>(&r.u), 2);
    in.read(reinterpret_cast<char*>(&r.v), 2);
    in.read(reinterpret_cast<char*>(&r.xj), 4);
    in.read(reinterpret_cast<char*>(&r.yj), 4);
  }
  if (!in) throw DataError("correspondences: truncated file " + path.string());
  return table;
}

GtBundle render_gt(const SceneSpec& spec, int correspondence_delta) {
  spec.validate();
  GtBundle bundle{
      DepthVideo(spec.width, spec.height, spec.frame_count, ValueKind::kDepth),
      CameraTrack(spec.frame_count),
      RegionMasks(spec.width, spec.height, spec.frame_count),
      CorrespondenceTable{correspondence_delta, spec.width, spec.height, {}}};

  std::vector<FrameScene> scenes(spec.frame_count);
  for (int f = 0; f < spec.frame_count; ++f) scenes[f] = scene_at(spec, f);

  parallel_for(spec.frame_count, [&](std::int64_t f) {
    const FrameScene& fsc = scenes[f];
    for (int y = 0; y < spec.height; ++y) {
      for (int x = 0; x < spec.width; ++x) {
        const Hit hit = trace(fsc, spec.intrinsics, x, y);
        if (hit.valid()) {
          bundle.depth.set(static_cast<int>(f), y, x,
                           static_cast<float>(hit.depth));
          bundle.masks.set_dynamic(static_cast<int>(f), y, x, hit.dynamic);
        } else {
          bundle.depth.invalidate(static_cast<int>(f), y, x);
        }
      }
    }
  });

  for (int f = 0; f < spec.frame_count; ++f) {
    bundle.track.intrinsics(f) = spec.intrinsics;
    bundle.track.pose(f) = scenes[f].pose;
  }

  // Correspondence tables for (i, i + delta), i = 0, delta, 2*delta, ...
  // World points come from the stored float32 depths; visibility is checked
  // by re-intersecting the scene along the frame-j ray.
  if (correspondence_delta > 0 && correspondence_delta < spec.frame_count) {
    for (int i = 0; i + correspondence_delta < spec.frame_count;
         i += correspondence_delta) {
      const int j = i + correspondence_delta;
      const FrameScene& si = scenes[i];
      const FrameScene& sj = scenes[j];
      const Eigen::Matrix3d rj = sj.pose.topLeftCorner<3, 3>();
      const Eigen::Vector3d tj = sj.pose.topRightCorner<3, 1>();
      for (int v = 0; v < spec.height; ++v) {
        for (int u = 0; u < spec.width; ++u) {
          if (!bundle.depth.valid(i, v, u) || bundle.masks.dynamic(i, v, u)) {
            continue;
          }
          const double depth = bundle.depth.at(i, v, u);
          const Eigen::Vector3d world = transform_point(
              si.pose, backproject(spec.intrinsics, u, v, depth));
          const Eigen::Vector3d cam_j = rj.transpose() * (world - tj);
          if (!(cam_j.z() > 1e-6)) continue;
          const Eigen::Vector2d pix = project(spec.intrinsics, cam_j);
          if (pix.x() < 0 || pix.x() > spec.width - 1 || pix.y() < 0 ||
              pix.y() > spec.height - 1) {
            continue;
          }
          const Hit hit = trace(sj, spec.intrinsics, pix.x(), pix.y());
          if (!hit.valid() || hit.dynamic) continue;
          if (std::abs(hit.depth - cam_j.z()) >
              1e-5 * std::max(1.0, cam_j.z())) {
            continue;  // occluded in frame j
          }
          bundle.correspondences.records.push_back(
              {static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j),
               static_cast<std::uint16_t>(u), static_cast<std::uint16_t>(v),
               static_cast<float>(pix.x()), static_cast<float>(pix.y())});
        }
      }
    }
  }
  return bundle;
}

std::string to_string(SurrogateKind k) {
  switch (k) {
    case SurrogateKind::kStereoJitter: return "stereo_jitter";
    case SurrogateKind::kWindowDrift: return "window_drift";
    case SurrogateKind::kGaussianPixel: return "gaussian_pixel";
  }
  return "gaussian_pixel";
}

SurrogateKind surrogate_kind_from_string(const std::string& s) {
  if (s == "stereo_jitter") return SurrogateKind::kStereoJitter;
  if (s == "window_drift") return SurrogateKind::kWindowDrift;
  if (s == "gaussian_pixel") return SurrogateKind::kGaussianPixel;
  throw UsageError("unknown surrogate kind: " + s);
}

void EstimatorSurrogateSpec::validate() const {
  if (jitter_amplitude < 0 || drift_amplitude < 0 || noise_sigma < 0) {
    throw UsageError("surrogate: amplitudes must be >= 0");
  }
  if (!(jitter_band_lo > 0) || jitter_band_hi > 0.5 ||
      jitter_band_lo > jitter_band_hi) {
    throw UsageError("surrogate: jitter band must satisfy 0 < lo <= hi <= 0.5");
  }
  if (drift_window_length <= 0) {
    throw UsageError("surrogate: drift window length must be positive");
  }
}

EstimatorSurrogateSpec surrogate_spec_from_json_string(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw UsageError(std::string("surrogate: malformed JSON: ") + e.what());
  }
  EstimatorSurrogateSpec spec;
  spec.kind = surrogate_kind_from_string(j.at("kind").get<std::string>());
  spec.jitter_amplitude = j.value("jitter_amplitude", 0.0);
  if (j.contains("jitter_band")) {
    spec.jitter_band_lo = j["jitter_band"][0].get<double>();
    spec.jitter_band_hi = j["jitter_band"][1].get<double>();
  }
  spec.drift_amplitude = j.value("drift_amplitude", 0.0);
  spec.drift_window_length = j.value("drift_window_length", 110);
  spec.noise_sigma = j.value("noise_sigma", 0.0);
  spec.seed = j.value("seed", 0ULL);
  spec.validate();
  return spec;
}

namespace {

// Unit-RMS band-limited series from random conjugate-symmetric spectra.
std::vector<double> band_noise(int frames, double band_lo, double band_hi,
                               std::uint64_t seed, std::uint64_t stream,
                               std::uint64_t id) {
  const int half = frames / 2;
  int k_lo = static_cast<int>(std::ceil(band_lo * frames));
  int k_hi = static_cast<int>(std::floor(band_hi * frames));
  k_lo = std::clamp(k_lo, 1, half);
  k_hi = std::clamp(k_hi, k_lo, half);
  std::vector<std::complex<double>> coeffs(frames, {0.0, 0.0});
  for (int k = k_lo; k <= k_hi; ++k) {
    const std::uint64_t base = (id * static_cast<std::uint64_t>(frames) + k) * 2;
    const double re = rng::normal(seed, stream, base);
    const double im = rng::normal(seed, stream, base + 1);
    if (2 * k == frames) {
      coeffs[k] = {re, 0.0};  // Nyquist bin must stay real
    } else {
      coeffs[k] = {re, im};
      coeffs[frames - k] = std::conj(coeffs[k]);
    }
  }
  std::vector<double> series = idft_real(coeffs);
  long double energy = 0;
  for (double v : series) energy += static_cast<long double>(v) * v;
  const double rms = std::sqrt(static_cast<double>(energy) / frames);
  if (rms > 0) {
    for (double& v : series) v /= rms;
  }
  return series;
}

float clamp_positive(double gt_value, double factor) {
  return static_cast<float>(gt_value * std::max(factor, 0.05));
}

}  // namespace

DepthVideo corrupt(const DepthVideo& gt, const RegionMasks& masks,
                   const EstimatorSurrogateSpec& spec) {
  spec.validate();
  if (!masks.same_shape(gt)) throw DataError("corrupt: mask shape mismatch");
  const int frames = gt.frame_count();
  DepthVideo out = gt;

  switch (spec.kind) {
    case SurrogateKind::kStereoJitter: {
      // Mostly frame-coherent band noise plus a smaller per-pixel component,
      // both confined to the configured band. Dynamic pixels get double
      // amplitude.
      constexpr double kCoherent = 0.8;
      const double mix_pixel = std::sqrt(1.0 - kCoherent * kCoherent);
      const std::vector<double> carrier =
          band_noise(frames, spec.jitter_band_lo, spec.jitter_band_hi,
                     spec.seed, rng::kJitterCarrier, 0);
      const std::int64_t pixels = gt.pixels_per_frame();
      std::vector<std::vector<double>> pixel_noise(pixels);
      parallel_for(pixels, [&](std::int64_t p) {
        pixel_noise[p] =
            band_noise(frames, spec.jitter_band_lo, spec.jitter_band_hi,
                       spec.seed, rng::kJitterPixel,
                       static_cast<std::uint64_t>(p) + 1);
      });
      for (int t = 0; t < frames; ++t) {
        for (int y = 0; y < gt.height(); ++y) {
          for (int x = 0; x < gt.width(); ++x) {
            if (!gt.valid(t, y, x)) continue;
            const std::int64_t p =
                static_cast<std::int64_t>(y) * gt.width() + x;
            const double n =
                kCoherent * carrier[t] + mix_pixel * pixel_noise[p][t];
            const double amp =
                spec.jitter_amplitude * (masks.dynamic(t, y, x) ? 2.0 : 1.0);
            out.set(t, y, x, clamp_positive(gt.at(t, y, x), 1.0 + amp * n));
          }
        }
      }
      break;
    }
    case SurrogateKind::kWindowDrift: {
      const int window = spec.drift_window_length;
      const int n_windows = (frames + window - 1) / window;
      std::vector<double> offsets(n_windows);
      for (int w = 0; w < n_windows; ++w) {
        const double mag = rng::uniform_in(spec.seed, rng::kDriftOffset,
                                           2 * static_cast<std::uint64_t>(w),
                                           0.5 * spec.drift_amplitude,
                                           spec.drift_amplitude);
        const double sign =
            rng::uniform(spec.seed, rng::kDriftOffset,
                         2 * static_cast<std::uint64_t>(w) + 1) < 0.5
                ? -1.0
                : 1.0;
        offsets[w] = sign * mag;
      }
      for (int t = 0; t < frames; ++t) {
        const double o = offsets[t / window];
        for (int y = 0; y < gt.height(); ++y) {
          for (int x = 0; x < gt.width(); ++x) {
            if (!gt.valid(t, y, x)) continue;
            // Seam drift hits static background fully; dynamic content is
            // re-estimated per window and drifts half as much.
            const double scale = masks.dynamic(t, y, x) ? 0.5 : 1.0;
            out.set(t, y, x,
                    clamp_positive(gt.at(t, y, x), 1.0 + scale * o));
          }
        }
      }
      break;
    }
    case SurrogateKind::kGaussianPixel: {
      for (int t = 0; t < frames; ++t) {
        for (int y = 0; y < gt.height(); ++y) {
          for (int x = 0; x < gt.width(); ++x) {
            if (!gt.valid(t, y, x)) continue;
            const std::uint64_t counter =
                static_cast<std::uint64_t>(gt.index(t, y, x));
            const double g =
                rng::normal(spec.seed, rng::kGaussianPixel, counter);
            out.set(t, y, x,
                    clamp_positive(gt.at(t, y, x), 1.0 + spec.noise_sigma * g));
          }
        }
      }
      break;
    }
  }
  return out;
}

PairGraph make_pairwise(const DepthVideo& gt, const CameraTrack& track,
                        const RegionMasks& masks, int n,
                        const EstimatorSurrogateSpec& noise) {
  noise.validate();
  if (track.frame_count() != gt.frame_count()) {
    throw DataError("make_pairwise: track frame count mismatch");
  }
  if (!masks.same_shape(gt)) throw DataError("make_pairwise: mask shape mismatch");

  PairGraph graph;
  graph.frame_count = gt.frame_count();
  graph.width = gt.width();
  graph.height = gt.height();
  graph.neighbor_span = n;
  const auto pairs = enumerate_pairs(gt.frame_count(), n);
  graph.edges.resize(pairs.size());
  const std::int64_t pixels = gt.pixels_per_frame();

  parallel_for(static_cast<std::int64_t>(pairs.size()), [&](std::int64_t e) {
    const auto [i, j] = pairs[e];
    PairwisePrediction& pred = graph.edges[e];
    pred.frame_i = i;
    pred.frame_j = j;
    pred.pointmap_i.resize(pixels);
    pred.pointmap_j.resize(pixels);
    pred.confidence_i.assign(pixels, 0.0);
    pred.confidence_j.assign(pixels, 0.0);

    const double pair_scale =
        1.0 + (noise.jitter_amplitude > 0
                   ? rng::uniform_in(noise.seed, rng::kPairScale,
                                     static_cast<std::uint64_t>(e),
                                     -noise.jitter_amplitude,
                                     noise.jitter_amplitude)
                   : 0.0);
    // j's camera coordinates -> i's camera coordinates
    const Eigen::Matrix4d rel = track.pose(i).inverse() * track.pose(j);

    auto fill = [&](int frame, int role, std::vector<Eigen::Vector3d>& pm,
                    std::vector<double>& conf) {
      for (int y = 0; y < gt.height(); ++y) {
        for (int x = 0; x < gt.width(); ++x) {
          const std::int64_t p = static_cast<std::int64_t>(y) * gt.width() + x;
          const bool ok = gt.valid(frame, y, x);
          const bool dyn = masks.dynamic(frame, y, x);
          double depth = ok ? gt.at(frame, y, x) : 1.0;
          if (ok && noise.noise_sigma > 0) {
            const std::uint64_t counter =
                (static_cast<std::uint64_t>(e) * 2 + role) * pixels + p;
            const double sigma = noise.noise_sigma * (dyn ? 2.0 : 1.0);
            const double g =
                rng::normal(noise.seed, rng::kPointmapNoise, counter);
            depth *= std::max(1.0 + sigma * g, 0.05);
          }
          Eigen::Vector3d point =
              backproject(track.intrinsics(frame), x, y, depth);
          if (role == 1) point = transform_point(rel, point);
          pm[p] = pair_scale * point;
          if (ok && !dyn) {
            const std::uint64_t counter =
                (static_cast<std::uint64_t>(e) * 2 + role) * pixels + p;
            conf[p] = 0.5 + 0.5 * rng::uniform(noise.seed,
                                               rng::kPairConfidence, counter);
          }
        }
      }
    };
    fill(i, 0, pred.pointmap_i, pred.confidence_i);
    fill(j, 1, pred.pointmap_j, pred.confidence_j);
    pred.recompute_mean_confidence();
  });
  return graph;
}

}  // namespace vdtk
