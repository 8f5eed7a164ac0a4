#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vdtk/geometry.hpp"
#include "vdtk/pair_graph.hpp"
#include "vdtk/types.hpp"

namespace vdtk {

enum class PrimitiveType { kPlane, kSphere, kBox };

// One analytic primitive. Planes are rectangles (half_extent.x/.y in the
// local tangent frame; zero extent means unbounded); boxes use half_extent
// in their local frame with an optional fixed axis-angle rotation.
struct Primitive {
  PrimitiveType type = PrimitiveType::kSphere;
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  Eigen::Vector3d normal = {0, 0, -1};  // planes
  Eigen::Vector3d half_extent = Eigen::Vector3d::Zero();
  double radius = 1.0;  // spheres
  Eigen::Vector3d rotation_axis = {0, 1, 0};
  double rotation_angle = 0.0;

  // Dynamic objects: world-position waypoints (Catmull-Rom over the video)
  // and a constant angular velocity (rad/s about the object's center).
  std::vector<Eigen::Vector3d> position_waypoints;
  Eigen::Vector3d angular_velocity = Eigen::Vector3d::Zero();
};

struct CameraPath {
  std::vector<Eigen::Vector3d> position_waypoints;
  std::vector<Eigen::Vector3d> look_at_waypoints = {{0, 0, 1}};
  Eigen::Vector3d up = {0, -1, 0};  // world-space up (camera +y points down)
};

struct SceneSpec {
  int width = 64;
  int height = 48;
  int frame_count = 60;
  double fps = 30.0;
  std::uint64_t seed = 0;
  Intrinsics intrinsics{60.0, 60.0, 31.5, 23.5};
  CameraPath camera;
  std::vector<Primitive> static_primitives;
  std::vector<Primitive> dynamic_primitives;

  void validate() const;
};

SceneSpec scene_spec_from_json_file(const std::filesystem::path& path);
SceneSpec scene_spec_from_json_string(const std::string& text);

// (frame i, pixel) -> (frame j, subpixel) for static surface points that are
// visible in both frames; generated from the stored float32 depths so the
// lift-transport-project round trip closes to double precision.
struct CorrespondenceRecord {
  std::uint32_t frame_i = 0;
  std::uint32_t frame_j = 0;
  std::uint16_t u = 0;
  std::uint16_t v = 0;
  float xj = 0;
  float yj = 0;
};

struct CorrespondenceTable {
  int delta = 10;
  int width = 0;
  int height = 0;
  std::vector<CorrespondenceRecord> records;
};

void write_correspondences(const CorrespondenceTable& table,
                           const std::filesystem::path& path);
CorrespondenceTable read_correspondences(const std::filesystem::path& path);

struct GtBundle {
  DepthVideo depth;
  CameraTrack track;
  RegionMasks masks;
  CorrespondenceTable correspondences;
};

// Closed-form ray-primitive rendering at pixel centers (integer pixel
// coordinates). Depth is the camera-frame z of the nearest hit; pixels that
// miss every primitive are invalid. Dynamic mask marks pixels whose nearest
// hit is a dynamic primitive.
GtBundle render_gt(const SceneSpec& spec, int correspondence_delta = 10);

// The camera pose used for frame t (exposed for oracle tests).
Eigen::Matrix4d camera_pose_at(const SceneSpec& spec, int frame);

enum class SurrogateKind { kStereoJitter, kWindowDrift, kGaussianPixel };

std::string to_string(SurrogateKind k);
SurrogateKind surrogate_kind_from_string(const std::string& s);

// Controlled estimator-error models. All noise is multiplicative and
// clamped so depth stays positive; draws are counter-based on the seed.
//   stereo_jitter  band-limited temporal noise on per-pixel trajectories,
//                  mostly frame-coherent, amplitude doubled on dynamic pixels
//   window_drift   per-window constant offset (magnitude in [A/2, A], random
//                  sign), full on static pixels and halved on dynamic ones
//   gaussian_pixel i.i.d. relative noise per pixel per frame
struct EstimatorSurrogateSpec {
  SurrogateKind kind = SurrogateKind::kGaussianPixel;
  double jitter_amplitude = 0.0;           // relative depth, RMS
  double jitter_band_lo = 0.25;            // cycles/frame
  double jitter_band_hi = 0.5;
  double drift_amplitude = 0.0;            // relative depth
  int drift_window_length = 110;
  double noise_sigma = 0.0;                // relative depth
  std::uint64_t seed = 0;

  void validate() const;
};

EstimatorSurrogateSpec surrogate_spec_from_json_string(const std::string& text);

DepthVideo corrupt(const DepthVideo& gt, const RegionMasks& masks,
                   const EstimatorSurrogateSpec& spec);

// Pairwise stereo surrogate: backprojects the (noise-perturbed) ground-truth
// depths of both frames into frame i's camera, applies a random per-pair
// scale (half-range = jitter_amplitude), and assigns zero confidence to
// dynamic or invalid pixels, uniform (0.5, 1] elsewhere. noise_sigma drives
// per-pixel pointmap noise, doubled on dynamic pixels.
PairGraph make_pairwise(const DepthVideo& gt, const CameraTrack& track,
                        const RegionMasks& masks, int n,
                        const EstimatorSurrogateSpec& noise);

}  // namespace vdtk
