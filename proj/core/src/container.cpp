#include "vdtk/container.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <json.hpp>

namespace vdtk {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

static_assert(std::endian::native == std::endian::little,
              "payload encoding assumes a little-endian host");

std::string frame_name(const char* prefix, int t, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%06d.%s", prefix, t, ext);
  return buf;
}

void write_bytes(const fs::path& path, const void* data, std::size_t size) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<char> read_bytes(const fs::path& path, std::size_t expected,
                             const std::string& what) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw IoError("cannot open: " + path.string());
  const auto size = static_cast<std::size_t>(in.tellg());
  if (size != expected) {
    throw DataError(what + ": payload size " + std::to_string(size) +
                    " != expected " + std::to_string(expected) + " (" +
                    path.string() + ")");
  }
  std::vector<char> buf(size);
  in.seekg(0);
  in.read(buf.data(), static_cast<std::streamsize>(size));
  if (!in) throw IoError("read failed: " + path.string());
  return buf;
}

}  // namespace

void write_container(const DepthVideo& video, const CameraTrack* track,
                     const RegionMasks* masks, const fs::path& dir,
                     const DepthVideo* confidence, double fps) {
  if (track != nullptr && track->frame_count() != video.frame_count()) {
    throw DataError("write_container: track frame count mismatch");
  }
  if (masks != nullptr && !masks->same_shape(video)) {
    throw DataError("write_container: mask dimensions mismatch");
  }
  if (confidence != nullptr && !confidence->same_shape(video)) {
    throw DataError("write_container: confidence dimensions mismatch");
  }
  video.validate();

  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory: " + dir.string());

  ordered_json manifest;
  manifest["format_version"] = std::to_string(kContainerFormatMajor) + "." +
                               std::to_string(kContainerFormatMinor);
  manifest["width"] = video.width();
  manifest["height"] = video.height();
  manifest["frame_count"] = video.frame_count();
  manifest["value_kind"] = to_string(video.kind());
  manifest["depth_unit"] = video.kind() == ValueKind::kDepth ? "m" : "1/m";
  manifest["fps"] = fps;
  manifest["has_masks"] = masks != nullptr;
  manifest["has_confidence"] = confidence != nullptr;
  if (track != nullptr) {
    track->validate();
    ordered_json intr = ordered_json::array();
    ordered_json poses = ordered_json::array();
    for (int t = 0; t < track->frame_count(); ++t) {
      const Intrinsics& k = track->intrinsics(t);
      intr.push_back({k.fx, k.fy, k.cx, k.cy});
      ordered_json p = ordered_json::array();
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) p.push_back(track->pose(t)(r, c));
      poses.push_back(std::move(p));
    }
    manifest["intrinsics"] = std::move(intr);
    manifest["poses"] = std::move(poses);
  }

  const std::size_t n = static_cast<std::size_t>(video.pixels_per_frame());
  for (int t = 0; t < video.frame_count(); ++t) {
    write_bytes(dir / frame_name("depth", t, "f32"), video.frame(t).data(),
                n * sizeof(float));
  }
  if (masks != nullptr) {
    std::vector<std::uint8_t> buf(n);
    for (int t = 0; t < masks->frame_count(); ++t) {
      auto m = masks->frame(t);
      for (std::size_t i = 0; i < n; ++i) buf[i] = m[i] ? 255 : 0;
      write_bytes(dir / frame_name("mask", t, "u8"), buf.data(), n);
    }
  }
  if (confidence != nullptr) {
    for (int t = 0; t < confidence->frame_count(); ++t) {
      write_bytes(dir / frame_name("conf", t, "f32"),
                  confidence->frame(t).data(), n * sizeof(float));
    }
  }

  std::ofstream out(dir / "manifest.json", std::ios::trunc);
  if (!out) throw IoError("cannot write manifest: " + dir.string());
  out << manifest.dump(2) << "\n";
}

ContainerContents read_container(const fs::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw IoError("cannot open manifest: " + (dir / "manifest.json").string());
  ordered_json manifest;
  try {
    in >> manifest;
  } catch (const std::exception& e) {
    throw DataError(std::string("malformed manifest: ") + e.what());
  }

  const std::string version = manifest.value("format_version", "");
  int major = -1;
  if (std::sscanf(version.c_str(), "%d", &major) != 1 ||
      major != kContainerFormatMajor) {
    throw DataError("unsupported container format_version: '" + version + "'");
  }

  for (const char* key : {"width", "height", "frame_count", "value_kind"}) {
    if (!manifest.contains(key)) {
      throw DataError(std::string("manifest missing key: ") + key);
    }
  }
  const int width = manifest["width"].get<int>();
  const int height = manifest["height"].get<int>();
  const int frames = manifest["frame_count"].get<int>();
  if (width <= 0 || height <= 0 || frames <= 0) {
    throw DataError("manifest dimensions must be positive");
  }

  ContainerContents result{
      DepthVideo(width, height, frames,
                 value_kind_from_string(manifest["value_kind"].get<std::string>())),
      std::nullopt, std::nullopt, std::nullopt,
      manifest.value("fps", 30.0)};

  const std::size_t n = static_cast<std::size_t>(width) * height;
  for (int t = 0; t < frames; ++t) {
    auto buf = read_bytes(dir / frame_name("depth", t, "f32"),
                          n * sizeof(float), "frame " + std::to_string(t));
    auto dst = result.video.frame(t);
    auto mask = result.video.frame_validity(t);
    std::memcpy(dst.data(), buf.data(), buf.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (dst[i] == 0.0f) {
        mask[i] = 0;  // 0 payload encodes an invalid pixel
      } else if (!std::isfinite(dst[i]) || dst[i] < 0.0f) {
        throw DataError("frame " + std::to_string(t) +
                        ": non-finite or negative depth value");
      }
    }
  }

  if (manifest.contains("poses") || manifest.contains("intrinsics")) {
    if (!manifest.contains("poses") || !manifest.contains("intrinsics")) {
      throw DataError("manifest must carry both intrinsics and poses");
    }
    const auto& intr = manifest["intrinsics"];
    const auto& poses = manifest["poses"];
    if (static_cast<int>(intr.size()) != frames ||
        static_cast<int>(poses.size()) != frames) {
      throw DataError("intrinsics/poses length != frame_count");
    }
    CameraTrack track(frames);
    for (int t = 0; t < frames; ++t) {
      if (intr[t].size() != 4 || poses[t].size() != 16) {
        throw DataError("pose/intrinsics record " + std::to_string(t) +
                        " malformed");
      }
      track.intrinsics(t) = {intr[t][0].get<double>(), intr[t][1].get<double>(),
                             intr[t][2].get<double>(), intr[t][3].get<double>()};
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
          track.pose(t)(r, c) = poses[t][4 * r + c].get<double>();
    }
    track.validate(&result.video);
    result.track = std::move(track);
  }

  if (manifest.value("has_masks", false)) {
    RegionMasks masks(width, height, frames);
    for (int t = 0; t < frames; ++t) {
      auto buf = read_bytes(dir / frame_name("mask", t, "u8"), n,
                            "mask frame " + std::to_string(t));
      auto m = masks.frame(t);
      for (std::size_t i = 0; i < n; ++i) {
        m[i] = static_cast<std::uint8_t>(buf[i]) != 0 ? 1 : 0;
      }
    }
    result.masks = std::move(masks);
  }

  if (manifest.value("has_confidence", false)) {
    DepthVideo conf(width, height, frames, ValueKind::kDepth);
    for (int t = 0; t < frames; ++t) {
      auto buf = read_bytes(dir / frame_name("conf", t, "f32"),
                            n * sizeof(float), "conf frame " + std::to_string(t));
      std::memcpy(conf.frame(t).data(), buf.data(), buf.size());
    }
    result.confidence = std::move(conf);
  }

  return result;
}

}  // namespace vdtk
