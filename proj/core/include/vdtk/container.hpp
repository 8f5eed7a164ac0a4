#pragma once

#include <filesystem>
#include <optional>

#include "vdtk/types.hpp"

namespace vdtk {

// VDC container: a directory holding manifest.json plus per-frame raw
// payloads. Layout:
//   manifest.json              UTF-8, numbers as JSON doubles
//   depth_%06d.f32             little-endian float32, row-major, top-left
//                              origin; invalid pixels store exactly 0.0
//   mask_%06d.u8               optional dynamic-region masks, 0/255
//   conf_%06d.f32              optional per-pixel confidence
// The manifest records width, height, frame_count, value_kind, depth_unit,
// fps, format_version, and optional per-frame intrinsics/poses (16 row-major
// doubles each). Unknown manifest keys are ignored on read.

struct ContainerContents {
  DepthVideo video;
  std::optional<CameraTrack> track;
  std::optional<RegionMasks> masks;
  std::optional<DepthVideo> confidence;  // same shape, validity all-true
  double fps = 30.0;
};

inline constexpr int kContainerFormatMajor = 1;
inline constexpr int kContainerFormatMinor = 0;

void write_container(const DepthVideo& video,
                     const CameraTrack* track,
                     const RegionMasks* masks,
                     const std::filesystem::path& dir,
                     const DepthVideo* confidence = nullptr,
                     double fps = 30.0);

ContainerContents read_container(const std::filesystem::path& dir);

}  // namespace vdtk
